//! Dense exact linear algebra over the scalar field.
//!
//! Echelon reduction visits columns in a caller-supplied order (ascending by
//! default). The order fixes which columns become pivots, which makes every
//! downstream basis choice deterministic; passing a different order is how
//! the pivot-independence properties are exercised.

use crate::error::{Error, Result};
use crate::freealg::{Field, FieldScalar};
use std::collections::BTreeMap;

/// Dense row-major matrix over one field.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mat {
    field: Field,
    nrows: usize,
    ncols: usize,
    a: Vec<FieldScalar>,
}

impl Mat {
    pub fn zeros(field: Field, nrows: usize, ncols: usize) -> Mat {
        Mat { field, nrows, ncols, a: vec![FieldScalar::zero(field); nrows * ncols] }
    }

    pub fn identity(field: Field, n: usize) -> Mat {
        let mut m = Mat::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldScalar::one(field));
        }
        m
    }

    pub fn from_rows(field: Field, rows: Vec<Vec<FieldScalar>>) -> Mat {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut a = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            a.extend(r);
        }
        Mat { field, nrows, ncols, a }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> &FieldScalar {
        &self.a[r * self.ncols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: FieldScalar) {
        self.a[r * self.ncols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[FieldScalar] {
        &self.a[r * self.ncols..(r + 1) * self.ncols]
    }

    pub fn col(&self, c: usize) -> Vec<FieldScalar> {
        (0..self.nrows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.field, self.ncols, self.nrows);
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Mat) -> Result<Mat> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch(format!(
                "matrix product {}x{} by {}x{}",
                self.nrows, self.ncols, other.nrows, other.ncols
            )));
        }
        let mut out = Mat::zeros(self.field, self.nrows, other.ncols);
        for r in 0..self.nrows {
            for k in 0..self.ncols {
                let lhs = self.get(r, k);
                if lhs.is_zero() {
                    continue;
                }
                for c in 0..other.ncols {
                    let rhs = other.get(k, c);
                    if rhs.is_zero() {
                        continue;
                    }
                    let v = out.get(r, c).add(&lhs.mul(rhs));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[FieldScalar]) -> Vec<FieldScalar> {
        assert_eq!(v.len(), self.ncols, "vector length mismatch");
        let mut out = vec![FieldScalar::zero(self.field); self.nrows];
        for r in 0..self.nrows {
            for c in 0..self.ncols {
                let e = self.get(r, c);
                if !e.is_zero() && !v[c].is_zero() {
                    out[r] = out[r].add(&e.mul(&v[c]));
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.is_zero())
    }

    pub fn scale(&self, s: &FieldScalar) -> Mat {
        let a = self.a.iter().map(|x| x.mul(s)).collect();
        Mat { field: self.field, nrows: self.nrows, ncols: self.ncols, a }
    }

    pub fn add(&self, other: &Mat) -> Result<Mat> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch("matrix sum".to_string()));
        }
        let a = self.a.iter().zip(&other.a).map(|(x, y)| x.add(y)).collect();
        Ok(Mat { field: self.field, nrows: self.nrows, ncols: self.ncols, a })
    }

    fn swap_rows(&mut self, r1: usize, r2: usize) {
        if r1 == r2 {
            return;
        }
        for c in 0..self.ncols {
            self.a.swap(r1 * self.ncols + c, r2 * self.ncols + c);
        }
    }

    fn scale_row(&mut self, r: usize, s: &FieldScalar) {
        for c in 0..self.ncols {
            let v = self.get(r, c).mul(s);
            self.set(r, c, v);
        }
    }

    /// row[dst] += s * row[src]
    fn add_multiple(&mut self, dst: usize, src: usize, s: &FieldScalar) {
        for c in 0..self.ncols {
            let v = self.get(dst, c).add(&self.get(src, c).mul(s));
            self.set(dst, c, v);
        }
    }
}

/// Fully reduced echelon form together with the row transform producing it:
/// `transform * original = rref`.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rref: Mat,
    pub transform: Mat,
    /// (row, column) of each pivot, in elimination order.
    pub pivots: Vec<(usize, usize)>,
}

pub fn echelon(m: &Mat) -> Echelon {
    let order: Vec<usize> = (0..m.ncols()).collect();
    echelon_with_order(m, &order)
}

/// Reduced echelon form visiting candidate pivot columns in `col_order`.
/// Within a column the first nonzero row (top to bottom) becomes the pivot.
pub fn echelon_with_order(m: &Mat, col_order: &[usize]) -> Echelon {
    debug_assert_eq!(col_order.len(), m.ncols(), "column order must be a permutation");
    let mut rref = m.clone();
    let mut transform = Mat::identity(m.field(), m.nrows());
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut next_row = 0usize;
    for &c in col_order {
        if next_row >= m.nrows() {
            break;
        }
        let Some(pr) = (next_row..m.nrows()).find(|&r| !rref.get(r, c).is_zero()) else {
            continue;
        };
        rref.swap_rows(pr, next_row);
        transform.swap_rows(pr, next_row);
        let inv = rref.get(next_row, c).inv().expect("pivot is nonzero");
        rref.scale_row(next_row, &inv);
        transform.scale_row(next_row, &inv);
        for r in 0..m.nrows() {
            if r != next_row && !rref.get(r, c).is_zero() {
                let s = rref.get(r, c).neg();
                rref.add_multiple(r, next_row, &s);
                transform.add_multiple(r, next_row, &s);
            }
        }
        pivots.push((next_row, c));
        next_row += 1;
    }
    Echelon { rref, transform, pivots }
}

pub fn rank(m: &Mat) -> usize {
    echelon(m).pivots.len()
}

/// Inverse of a square matrix, when it exists.
pub fn inverse(m: &Mat) -> Option<Mat> {
    if m.nrows() != m.ncols() {
        return None;
    }
    let ech = echelon(m);
    if ech.pivots.len() == m.nrows() {
        Some(ech.transform)
    } else {
        None
    }
}

/// Kernel basis in the standard form determined by the pivot choice: one
/// vector per free column f (ascending), with coordinate 1 at f and the
/// negated reduced column elsewhere.
pub fn kernel_basis_with_order(m: &Mat, col_order: &[usize]) -> Vec<Vec<FieldScalar>> {
    let ech = echelon_with_order(m, col_order);
    kernel_from_echelon(m, &ech)
}

pub fn kernel_basis(m: &Mat) -> Vec<Vec<FieldScalar>> {
    let ech = echelon(m);
    kernel_from_echelon(m, &ech)
}

fn kernel_from_echelon(m: &Mat, ech: &Echelon) -> Vec<Vec<FieldScalar>> {
    let field = m.field();
    let mut is_pivot = vec![false; m.ncols()];
    for &(_, c) in &ech.pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for f in 0..m.ncols() {
        if is_pivot[f] {
            continue;
        }
        let mut v = vec![FieldScalar::zero(field); m.ncols()];
        v[f] = FieldScalar::one(field);
        for &(r, c) in &ech.pivots {
            v[c] = ech.rref.get(r, f).neg();
        }
        basis.push(v);
    }
    basis
}

/// Incrementally built row-reduced spanning set. Insertion order is
/// significant: each candidate is reduced against the vectors already
/// present, and kept (normalized monic at its first nonzero coordinate)
/// only if independent. Deterministic given the insertion sequence.
#[derive(Clone, Debug)]
pub struct IncrementalSpan {
    dim: usize,
    rows: BTreeMap<usize, Vec<FieldScalar>>,
}

impl IncrementalSpan {
    pub fn new(dim: usize) -> IncrementalSpan {
        IncrementalSpan { dim, rows: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Remainder of `v` after elimination against the current span.
    pub fn reduce(&self, v: &[FieldScalar]) -> Vec<FieldScalar> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        let mut w = v.to_vec();
        for (&p, row) in &self.rows {
            if !w[p].is_zero() {
                let c = w[p].clone();
                for i in p..self.dim {
                    w[i] = w[i].sub(&c.mul(&row[i]));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[FieldScalar]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    /// Insert `v`; when independent of the current span, returns the
    /// reduced monic vector that was added.
    pub fn insert(&mut self, v: &[FieldScalar]) -> Option<Vec<FieldScalar>> {
        let w = self.reduce(v);
        let p = w.iter().position(|x| !x.is_zero())?;
        let inv = w[p].inv().expect("nonzero scalar");
        let monic: Vec<FieldScalar> = w.iter().map(|x| x.mul(&inv)).collect();
        self.rows.insert(p, monic.clone());
        Some(monic)
    }
}

/// Prepared linear-system solver for a fixed coefficient matrix.
#[derive(Clone, Debug)]
pub struct Solver {
    ncols: usize,
    ech: Echelon,
}

impl Solver {
    pub fn new(m: &Mat) -> Solver {
        Solver { ncols: m.ncols(), ech: echelon(m) }
    }

    pub fn with_order(m: &Mat, col_order: &[usize]) -> Solver {
        Solver { ncols: m.ncols(), ech: echelon_with_order(m, col_order) }
    }

    pub fn rank(&self) -> usize {
        self.ech.pivots.len()
    }

    /// Particular solution of `M x = b` with all free variables set to zero;
    /// `None` when `b` is outside the column span.
    pub fn solve(&self, b: &[FieldScalar]) -> Option<Vec<FieldScalar>> {
        let field = self.ech.rref.field();
        let c = self.ech.transform.mul_vec(b);
        for (r, val) in c.iter().enumerate() {
            if r >= self.ech.pivots.len() && !val.is_zero() {
                return None;
            }
        }
        let mut x = vec![FieldScalar::zero(field); self.ncols];
        for &(r, col) in &self.ech.pivots {
            x[col] = c[r].clone();
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> FieldScalar {
        FieldScalar::from_i64(Field::Q, v)
    }

    #[test]
    fn kernel_and_solve() {
        // x + y + z = 0, y - z = 0 has kernel spanned by (-2, 1, 1).
        let m = Mat::from_rows(
            Field::Q,
            vec![vec![q(1), q(1), q(1)], vec![q(0), q(1), q(-1)]],
        );
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        assert_eq!(k[0], vec![q(-2), q(1), q(1)]);
        let x = Solver::new(&m).solve(&[q(3), q(1)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(3), q(1)]);
        assert!(Solver::new(&m.transpose()).solve(&[q(1), q(0), q(1)]).is_none());
    }

    #[test]
    fn inverse_round_trip() {
        let m = Mat::from_rows(Field::Q, vec![vec![q(2), q(1)], vec![q(1), q(1)]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv).unwrap(), Mat::identity(Field::Q, 2));
        let sing = Mat::from_rows(Field::Q, vec![vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert!(inverse(&sing).is_none());
        assert_eq!(rank(&sing), 1);
    }

    #[test]
    fn perturbed_pivot_changes_particular_solution_not_correctness() {
        let m = Mat::from_rows(Field::Q, vec![vec![q(1), q(1), q(0)], vec![q(0), q(1), q(1)]]);
        let b = vec![q(2), q(3)];
        let x1 = Solver::new(&m).solve(&b).unwrap();
        let x2 = Solver::with_order(&m, &[2, 1, 0]).solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x1), b);
        assert_eq!(m.mul_vec(&x2), b);
        assert_ne!(x1, x2);
    }
}
