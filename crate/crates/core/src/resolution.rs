//! Minimal graded free resolution of the trivial module k, Betti data, and
//! the Gorenstein/regular signature read from the dualized resolution.
//!
//! Construction (degreewise exact linear algebra, truncated by the caps):
//! starting from P⁰ = A with augmentation kernel A_{≥1}, each step computes
//! the kernel K of the latest differential in every internal degree up to
//! the cap, the subspace A_{≥1}·K spanned by generator-multiples of
//! lower-degree kernel elements, and a complement of A_{≥1}·K in K chosen
//! by greedy pivoting in the generator-major normal-word coordinate order
//! (candidates are taken in ascending degree and basis order and normalized
//! monic at their first nonzero coordinate). The complement elements become
//! the free generators of the next term and the columns of the next
//! differential, so every differential entry lies in A_{≥1} and the
//! resolution is minimal by construction.

use crate::complexes::{ChainComplex, GradedFreeModule, ModuleMap};
use crate::error::{Error, Result};
use crate::freealg::{FieldScalar, NcPoly};
use crate::groebner::GroebnerData;
use crate::linalg::{kernel_basis, rank, IncrementalSpan, Mat};
use crate::presentation::AlgebraPresentation;
use std::collections::BTreeMap;

/// A minimal free resolution of k, truncated at the caps.
#[derive(Clone, Debug)]
pub struct Resolution {
    /// Terms at cohomological positions 0, −1, …, −D.
    pub complex: ChainComplex,
    /// For each homological position i (index into the vector), the internal
    /// degrees of the minimal generators of the i-th term.
    pub v_degrees: Vec<Vec<i64>>,
    /// Per position: true when the generator list had genuine headroom below
    /// the internal cap, i.e. no generator sits within one algebra-generator
    /// degree of the cap, so hidden higher syzygies at this position are not
    /// suspected.
    pub complete: Vec<bool>,
    /// True when the kernel of the last differential vanished identically in
    /// the visible window, i.e. the resolution terminates at position −D
    /// (certified within the caps).
    pub terminated: bool,
    pub cap_internal: u32,
    pub cap_homological: u32,
}

impl Resolution {
    /// Homological length D actually constructed.
    pub fn length(&self) -> u32 {
        (self.v_degrees.len() - 1) as u32
    }
}

/// The detected Artin–Schelter data of the algebra.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GorensteinSignature {
    /// Cohomological position of the concentrated dual class.
    pub d: u32,
    /// Internal-degree index of the concentrated class: the class of the
    /// dualized resolution lives in internal degree −ell.
    pub ell: i64,
    /// Dual cohomology concentrated in one position with total dimension 1.
    pub gorenstein_ok: bool,
    /// The resolution terminates at −d with a rank-1 top term.
    pub regular: bool,
    /// False when the caps prevented a decision; `gorenstein_ok` and
    /// `regular` are then reported as false but mean "not determined", never
    /// a certified failure.
    pub conclusive: bool,
}

/// Matrix of the action of generator `t` on the degree-`n` slice of a free
/// module (block-diagonal left multiplication on coefficients).
fn module_generator_action(
    gb: &GroebnerData,
    module: &GradedFreeModule,
    t: usize,
    n: i64,
) -> Result<Mat> {
    let field = gb.field();
    let dt = i64::from(gb.gen_degrees()[t]);
    let src = module.layout_at(gb, n)?;
    let tgt = module.layout_at(gb, n + dt)?;
    let mut m = Mat::zeros(field, tgt.total, src.total);
    let degs = gb.gen_degrees();
    let x_t = NcPoly::generator(field, t as u32, degs);
    for (c, &(c0, clen)) in src.spans.iter().enumerate() {
        if clen == 0 {
            continue;
        }
        let wdeg = (n - module.gen_degrees[c]) as u32;
        let block = gb.left_mult_matrix(&x_t, wdeg)?;
        let (r0, _) = tgt.spans[c];
        for k in 0..clen {
            for r in 0..block.nrows() {
                let v = block.get(r, k);
                if !v.is_zero() {
                    m.set(r0 + r, c0 + k, v.clone());
                }
            }
        }
    }
    Ok(m)
}

/// Kernel bases of one differential in every internal degree of the window.
fn kernel_by_degree(
    gb: &GroebnerData,
    d_out: &ModuleMap,
    cap_internal: u32,
) -> Result<BTreeMap<i64, Vec<Vec<FieldScalar>>>> {
    let mut kernels = BTreeMap::new();
    for n in 0..=i64::from(cap_internal) {
        let m = d_out.scalar_matrix_at(gb, n)?;
        if m.ncols() == 0 {
            continue;
        }
        let basis = kernel_basis(&m);
        if !basis.is_empty() {
            kernels.insert(n, basis);
        }
    }
    Ok(kernels)
}

/// Compute the minimal resolution of k over the presented algebra, up to
/// homological position `cap_homological` and internal degree
/// `cap_internal`.
pub fn minimal_resolution(
    pres: &AlgebraPresentation,
    gb: &GroebnerData,
    cap_internal: u32,
    cap_homological: u32,
) -> Result<Resolution> {
    let field = gb.field();
    if pres.field != field {
        return Err(Error::FieldMismatch(pres.field.name(), field.name()));
    }
    let max_gen_degree = i64::from(*gb.gen_degrees().iter().max().unwrap_or(&1));
    if i64::from(cap_internal) <= max_gen_degree {
        return Err(Error::CapExceeded {
            context: "internal cap below the generator degrees".into(),
            needed: max_gen_degree as u32 + 1,
            cap: cap_internal,
        });
    }

    let p0 = GradedFreeModule::new(vec![0]);
    let mut terms: BTreeMap<i32, GradedFreeModule> = BTreeMap::new();
    let mut diffs: BTreeMap<i32, ModuleMap> = BTreeMap::new();
    terms.insert(0, p0.clone());
    let mut v_degrees: Vec<Vec<i64>> = vec![vec![0]];
    let mut complete: Vec<bool> = vec![true];
    let mut terminated = false;

    // Kernel of the augmentation A → k: everything of positive degree.
    let mut kernels: BTreeMap<i64, Vec<Vec<FieldScalar>>> = BTreeMap::new();
    for n in 1..=i64::from(cap_internal) {
        let dim = p0.dim_at(gb, n)?;
        let mut basis = Vec::with_capacity(dim);
        for k in 0..dim {
            let mut v = vec![FieldScalar::zero(field); dim];
            v[k] = FieldScalar::one(field);
            basis.push(v);
        }
        kernels.insert(n, basis);
    }

    let mut current = p0;
    for step in 1..=cap_homological {
        if kernels.values().all(|b| b.is_empty()) {
            terminated = true;
            break;
        }
        // Choose minimal generators degree by degree: seed the span with
        // A_{≥1}·K (generator-multiples of lower-degree kernel vectors),
        // then sweep the kernel basis.
        let mut new_gen_degrees: Vec<i64> = Vec::new();
        let mut new_gen_vectors: Vec<(i64, Vec<FieldScalar>)> = Vec::new();
        for (&n, basis) in &kernels {
            let ambient = current.dim_at(gb, n)?;
            let mut span = IncrementalSpan::new(ambient);
            for (t, &dt) in gb.gen_degrees().iter().enumerate() {
                let lower = n - i64::from(dt);
                if let Some(lower_basis) = kernels.get(&lower) {
                    let action = module_generator_action(gb, &current, t, lower)?;
                    for v in lower_basis {
                        span.insert(&action.mul_vec(v));
                    }
                }
            }
            for v in basis {
                if let Some(reduced) = span.insert(v) {
                    new_gen_degrees.push(n);
                    new_gen_vectors.push((n, reduced));
                }
            }
        }
        if new_gen_degrees.is_empty() {
            // A nonzero kernel with no minimal generators in the window
            // cannot happen: its lowest-degree elements are always minimal.
            return Err(Error::Internal("kernel without minimal generators".into()));
        }

        let next = GradedFreeModule::new(new_gen_degrees.clone());
        // Assemble the differential: column k sends the new generator to
        // the kernel element it was chosen from.
        let mut entries =
            vec![vec![NcPoly::zero(field); next.rank()]; current.rank()];
        for (k, (n, vec_ambient)) in new_gen_vectors.iter().enumerate() {
            let layout = current.layout_at(gb, *n)?;
            for (r, &(r0, rlen)) in layout.spans.iter().enumerate() {
                if rlen == 0 {
                    continue;
                }
                let coords = &vec_ambient[r0..r0 + rlen];
                let wdeg = (n - current.gen_degrees[r]) as u32;
                entries[r][k] = gb.element_from_coords(coords, wdeg)?;
            }
        }
        let d = ModuleMap::new(next.clone(), current.clone(), entries, None)?;
        if !d.entries_in_augmentation_ideal() {
            return Err(Error::Internal(
                "minimality violated: differential entry with a scalar part".into(),
            ));
        }
        let pos = -(step as i32);
        terms.insert(pos, next.clone());
        diffs.insert(pos, d.clone());
        complete.push(
            new_gen_degrees
                .iter()
                .all(|&n| n + max_gen_degree <= i64::from(cap_internal)),
        );
        v_degrees.push(new_gen_degrees);

        kernels = kernel_by_degree(gb, &d, cap_internal)?;
        current = next;
    }
    if !terminated && kernels.values().all(|b| b.is_empty()) {
        terminated = true;
    }

    let res = Resolution {
        complex: ChainComplex { terms, diffs },
        v_degrees,
        complete,
        terminated,
        cap_internal,
        cap_homological,
    };
    debug_assert!(res.complex.validate(gb).is_ok());
    Ok(res)
}

/// Betti table: count of minimal generators by (homological position,
/// internal degree).
pub fn betti_table(res: &Resolution) -> BTreeMap<(u32, i64), usize> {
    let mut table = BTreeMap::new();
    for (i, degs) in res.v_degrees.iter().enumerate() {
        for &n in degs {
            *table.entry((i as u32, n)).or_insert(0) += 1;
        }
    }
    table
}

/// Apply Hom_A(−, A) to the resolution and read off where its cohomology
/// concentrates. The dual of a term with generators ε_r is a free module on
/// duals u_r of internal degree −deg(ε_r); the dual of a differential with
/// matrix m acts by (δu)_c = Σ_r m[r][c]·u_r, i.e. entries left-multiply
/// right-module coordinates with transposed indexing.
pub fn gorenstein_signature(res: &Resolution, gb: &GroebnerData) -> Result<GorensteinSignature> {
    let top = res.length();
    let max_gen_degree: i64 = res
        .v_degrees
        .iter()
        .flat_map(|v| v.iter().copied())
        .max()
        .unwrap_or(0);
    // Window of internal degrees where every dual slice is computable: the
    // dual generator degrees lie in [−max_gen_degree, 0].
    let lo = -max_gen_degree;
    let hi = i64::from(res.cap_internal) - max_gen_degree;

    // Dual-slice dimension of the position −i term at internal degree n.
    let dual_dim = |i: u32, n: i64| -> Result<usize> {
        let module = res.complex.term(-(i as i32)).expect("term exists");
        let mut total = 0usize;
        for &d in &module.gen_degrees {
            let wdeg = n + d;
            if wdeg >= 0 {
                total += gb.dim(wdeg as u32)?;
            }
        }
        Ok(total)
    };
    // Scalar matrix of the dual differential Q^{i} → Q^{i+1} at degree n.
    let dual_matrix = |i: u32, n: i64| -> Result<Mat> {
        let field = gb.field();
        let d = res.complex.diff(-((i + 1) as i32)).expect("differential exists");
        // Primal: P^{(−i−1)} → P^{(−i)}; dual: Hom(P^{(−i)}) → Hom(P^{(−i+1)})
        // is indexed the other way: source duals u_r over d.target, target
        // duals over d.source.
        let src_mod = &d.target;
        let tgt_mod = &d.source;
        let mut src_spans = Vec::new();
        let mut total_src = 0usize;
        for &gd in &src_mod.gen_degrees {
            let wdeg = n + gd;
            let len = if wdeg >= 0 { gb.dim(wdeg as u32)? } else { 0 };
            src_spans.push((total_src, len));
            total_src += len;
        }
        let mut tgt_spans = Vec::new();
        let mut total_tgt = 0usize;
        for &gd in &tgt_mod.gen_degrees {
            let wdeg = n + gd;
            let len = if wdeg >= 0 { gb.dim(wdeg as u32)? } else { 0 };
            tgt_spans.push((total_tgt, len));
            total_tgt += len;
        }
        let mut m = Mat::zeros(field, total_tgt, total_src);
        for r in 0..src_mod.gen_degrees.len() {
            let (r0, rlen) = src_spans[r];
            if rlen == 0 {
                continue;
            }
            let wdeg = (n + src_mod.gen_degrees[r]) as u32;
            for c in 0..tgt_mod.gen_degrees.len() {
                let (c0, clen) = tgt_spans[c];
                if clen == 0 || d.entries[r][c].is_zero() {
                    continue;
                }
                let block = gb.left_mult_matrix(&d.entries[r][c], wdeg)?;
                debug_assert_eq!(block.nrows(), clen);
                for br in 0..block.nrows() {
                    for bc in 0..rlen.min(block.ncols()) {
                        let v = block.get(br, bc);
                        if !v.is_zero() {
                            m.set(c0 + br, r0 + bc, v.clone());
                        }
                    }
                }
            }
        }
        Ok(m)
    };

    // Cohomology dimensions by (position, internal degree).
    let mut nonzero: BTreeMap<u32, Vec<(i64, usize)>> = BTreeMap::new();
    for i in 0..=top {
        for n in lo..=hi {
            let dim_here = dual_dim(i, n)?;
            if dim_here == 0 {
                continue;
            }
            let ker = if i < top {
                let out = dual_matrix(i, n)?;
                dim_here - rank(&out)
            } else {
                dim_here
            };
            let im = if i > 0 {
                rank(&dual_matrix(i - 1, n)?)
            } else {
                0
            };
            let h = ker - im;
            if h > 0 {
                nonzero.entry(i).or_default().push((n, h));
            }
        }
    }

    let positions: Vec<u32> = nonzero.keys().copied().collect();
    let inconclusive_ok = !res.terminated || res.complete.iter().any(|c| !c);
    match positions.as_slice() {
        [] => {
            // No visible cohomology at all: either the window is too small
            // or something is inconsistent; never certify.
            Ok(GorensteinSignature { d: 0, ell: 0, gorenstein_ok: false, regular: false, conclusive: false })
        }
        [d_pos] => {
            let classes = &nonzero[d_pos];
            let total: usize = classes.iter().map(|&(_, h)| h).sum();
            if total == 1 {
                if inconclusive_ok {
                    // A later differential hidden by the caps could change
                    // the picture; do not certify success.
                    return Ok(GorensteinSignature {
                        d: *d_pos,
                        ell: -classes[0].0,
                        gorenstein_ok: false,
                        regular: false,
                        conclusive: false,
                    });
                }
                let regular = res.terminated
                    && res.length() == *d_pos
                    && res.v_degrees[*d_pos as usize].len() == 1;
                Ok(GorensteinSignature {
                    d: *d_pos,
                    ell: -classes[0].0,
                    gorenstein_ok: true,
                    regular,
                    conclusive: true,
                })
            } else {
                // More than one class at a single position: decisive failure
                // (the window computation is exact).
                Ok(GorensteinSignature { d: *d_pos, ell: 0, gorenstein_ok: false, regular: false, conclusive: true })
            }
        }
        _ => Ok(GorensteinSignature {
            d: *positions.last().unwrap(),
            ell: 0,
            gorenstein_ok: false,
            regular: false,
            conclusive: true,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groebner::compute_gb;
    use crate::presentation::parse_presentation;

    fn resolve(text: &str, cap_i: u32, cap_h: u32) -> (Resolution, GroebnerData) {
        let pres = parse_presentation(text).unwrap();
        let gb = compute_gb(&pres, cap_i).unwrap();
        let res = minimal_resolution(&pres, &gb, cap_i, cap_h).unwrap();
        (res, gb)
    }

    #[test]
    fn commutative_plane_koszul_shape() {
        let (res, gb) = resolve("field Q\ngen x 1\ngen y 1\nrel y*x - x*y\n", 8, 5);
        assert!(res.terminated);
        assert_eq!(res.length(), 2);
        let betti = betti_table(&res);
        let expected: BTreeMap<(u32, i64), usize> =
            [((0, 0), 1), ((1, 1), 2), ((2, 2), 1)].into_iter().collect();
        assert_eq!(betti, expected);
        // The second differential is the chosen monic kernel generator
        // y·e_x − x·e_y.
        let d2 = res.complex.diff(-2).unwrap();
        let degs = vec![1, 1];
        let x = NcPoly::generator(gb.field(), 0, &degs);
        let y = NcPoly::generator(gb.field(), 1, &degs);
        assert_eq!(d2.entries[0][0], y);
        assert_eq!(d2.entries[1][0], x.neg());
    }

    #[test]
    fn free_algebra_length_one() {
        let (res, _) = resolve("field Q\ngen x 1\ngen y 1\n", 6, 5);
        assert!(res.terminated);
        assert_eq!(res.length(), 1);
        let betti = betti_table(&res);
        let expected: BTreeMap<(u32, i64), usize> =
            [((0, 0), 1), ((1, 1), 2)].into_iter().collect();
        assert_eq!(betti, expected);
    }

    #[test]
    fn polynomial_line() {
        let pres = parse_presentation("field Q\ngen x 1\n").unwrap();
        let gb = compute_gb(&pres, 6).unwrap();
        // k[x] == free algebra on one generator.
        let res = minimal_resolution(&pres, &gb, 6, 4).unwrap();
        assert!(res.terminated);
        assert_eq!(res.length(), 1);
        let sig = gorenstein_signature(&res, &gb).unwrap();
        assert!(sig.conclusive);
        assert!(sig.gorenstein_ok);
        assert!(sig.regular);
        assert_eq!((sig.d, sig.ell), (1, 1));
    }

    #[test]
    fn commutative_plane_signature() {
        let (res, gb) = resolve("field Q\ngen x 1\ngen y 1\nrel y*x - x*y\n", 8, 5);
        let sig = gorenstein_signature(&res, &gb).unwrap();
        assert!(sig.conclusive && sig.gorenstein_ok && sig.regular);
        assert_eq!((sig.d, sig.ell), (2, 2));
    }

    #[test]
    fn quantum_plane_same_betti_as_commutative() {
        let (res, gb) = resolve("field Q\ngen x 1\ngen y 1\nrel y*x - 3*x*y\n", 8, 5);
        let betti = betti_table(&res);
        let expected: BTreeMap<(u32, i64), usize> =
            [((0, 0), 1), ((1, 1), 2), ((2, 2), 1)].into_iter().collect();
        assert_eq!(betti, expected);
        let sig = gorenstein_signature(&res, &gb).unwrap();
        assert!(sig.gorenstein_ok && sig.regular);
        assert_eq!((sig.d, sig.ell), (2, 2));
    }

    #[test]
    fn three_variables_signature_and_symmetry() {
        let (res, gb) = resolve(
            "field Q\ngen x 1\ngen y 1\ngen z 1\nrel y*x - x*y\nrel z*x - x*z\nrel z*y - y*z\n",
            8,
            5,
        );
        assert!(res.terminated);
        assert_eq!(res.length(), 3);
        let betti = betti_table(&res);
        let expected: BTreeMap<(u32, i64), usize> = [
            ((0, 0), 1),
            ((1, 1), 3),
            ((2, 2), 3),
            ((3, 3), 1),
        ]
        .into_iter()
        .collect();
        assert_eq!(betti, expected);
        let sig = gorenstein_signature(&res, &gb).unwrap();
        assert!(sig.gorenstein_ok && sig.regular);
        assert_eq!((sig.d, sig.ell), (3, 3));
        // Gorenstein symmetry of the Betti table.
        for (&(i, n), &count) in &betti {
            let mirror = (sig.d - i, sig.ell - n);
            assert_eq!(betti.get(&mirror), Some(&count));
        }
    }

    #[test]
    fn monomial_quotient_fails_gorenstein() {
        let (res, gb) = resolve("field Q\ngen x 1\ngen y 1\nrel x*y\n", 8, 5);
        // The resolution itself is short …
        assert!(res.terminated);
        assert_eq!(res.length(), 2);
        let betti = betti_table(&res);
        let expected: BTreeMap<(u32, i64), usize> =
            [((0, 0), 1), ((1, 1), 2), ((2, 2), 1)].into_iter().collect();
        assert_eq!(betti, expected);
        // … but the dual complex has cohomology at more than one position.
        let sig = gorenstein_signature(&res, &gb).unwrap();
        assert!(sig.conclusive);
        assert!(!sig.gorenstein_ok);
        assert!(!sig.regular);
    }

    #[test]
    fn euler_characteristic_degreewise() {
        let (res, gb) = resolve("field Q\ngen x 1\ngen y 1\nrel y*x - x*y\n", 8, 5);
        for n in 0..=6i64 {
            let mut chi = 0i64;
            for (i, _) in res.v_degrees.iter().enumerate() {
                let m = res.complex.term(-(i as i32)).unwrap();
                let dim = m.dim_at(&gb, n).unwrap() as i64;
                chi += if i % 2 == 0 { dim } else { -dim };
            }
            assert_eq!(chi, if n == 0 { 1 } else { 0 });
        }
    }

    #[test]
    fn jordan_plane_resolves_like_the_plane() {
        let (res, gb) = resolve("field Q\ngen x 1\ngen y 1\nrel y*x - x*y - x*x\n", 8, 5);
        let betti = betti_table(&res);
        let expected: BTreeMap<(u32, i64), usize> =
            [((0, 0), 1), ((1, 1), 2), ((2, 2), 1)].into_iter().collect();
        assert_eq!(betti, expected);
        let d2 = res.complex.diff(-2).unwrap();
        // Chosen generator: (x − y)·e_x + x·e_y after monic normalization.
        let degs = vec![1, 1];
        let x = NcPoly::generator(gb.field(), 0, &degs);
        let y = NcPoly::generator(gb.field(), 1, &degs);
        assert_eq!(d2.entries[0][0], x.sub(&y).unwrap());
        assert_eq!(d2.entries[1][0], x);
        let sig = gorenstein_signature(&res, &gb).unwrap();
        assert!(sig.gorenstein_ok && sig.regular);
        assert_eq!((sig.d, sig.ell), (2, 2));
    }
}
