//! The bigraded Ext-algebra of the trivial module, with its product
//! computed by lifting cocycles to chain maps of the minimal resolution.
//!
//! Because the resolution is minimal, the dual complex Hom(P, k) has zero
//! differentials, so a basis of E^{i,j} is the dual basis of the degree-(−j)
//! generators of the i-th resolution term. A basis element is lifted to a
//! chain map `P → Σ^i T^j P` whose top component sends the chosen generator
//! to 1, solving the sign-twisted chain condition downward position by
//! position (each solve is a degreewise linear system whose right side is a
//! boundary by exactness). Products are graded compositions of lifts; the
//! class of the composite is read from the constant terms of its component
//! at the product's homological position. The class is independent of the
//! homotopy freedom in the lifts, which the tests exercise by perturbing
//! the solver's pivot order.

use crate::complexes::{graded_compose, ChainMap, ModuleMap};
use crate::error::{Error, Result};
use crate::freealg::{Field, FieldScalar, NcPoly};
use crate::groebner::GroebnerData;
use crate::linalg::Solver;
use crate::resolution::Resolution;
use std::collections::BTreeMap;

/// One basis element of E: the dual of generator `column` of the resolution
/// term at position −i, sitting in bidegree (i, j) with j the negated
/// generator degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtElement {
    pub i: u32,
    pub j: i64,
    pub column: usize,
}

/// The bigraded Ext-algebra with its structure constants.
#[derive(Clone, Debug)]
pub struct ExtAlgebra {
    pub field: Field,
    /// Homological length of the underlying resolution.
    pub d: u32,
    /// Internal-degree index of the top term when it has rank one (the
    /// socle bidegree is then (d, −ell)); 0 otherwise.
    pub ell: i64,
    pub elements: Vec<ExtElement>,
    /// Global element indices grouped by bidegree, in basis order.
    pub bidegrees: BTreeMap<(u32, i64), Vec<usize>>,
    pub unit: usize,
    /// (a, b) → coordinates of a·b in the basis of the target bidegree.
    /// Pairs whose homological degrees add beyond d are absent.
    pub products: BTreeMap<(usize, usize), Vec<FieldScalar>>,
}

impl ExtAlgebra {
    pub fn dim(&self, i: u32, j: i64) -> usize {
        self.bidegrees.get(&(i, j)).map_or(0, |v| v.len())
    }

    /// Total dimension across all bidegrees.
    pub fn total_dim(&self) -> usize {
        self.elements.len()
    }

    pub fn label(&self, idx: usize) -> String {
        let e = &self.elements[idx];
        format!("e{}_{}", e.i, e.column)
    }

    pub fn index_of(&self, i: u32, column: usize) -> Option<usize> {
        self.elements.iter().position(|e| e.i == i && e.column == column)
    }

    /// Product of two basis elements from the filled table.
    pub fn product(&self, a: usize, b: usize) -> Option<&Vec<FieldScalar>> {
        self.products.get(&(a, b))
    }

    /// Bilinear extension of the table to coordinate vectors in fixed
    /// bidegrees. Returns the coordinates in the target bidegree.
    pub fn product_vec(
        &self,
        (ia, ja): (u32, i64),
        va: &[FieldScalar],
        (ib, jb): (u32, i64),
        vb: &[FieldScalar],
    ) -> Result<Vec<FieldScalar>> {
        let ta = self.bidegrees.get(&(ia, ja)).cloned().unwrap_or_default();
        let tb = self.bidegrees.get(&(ib, jb)).cloned().unwrap_or_default();
        if ta.len() != va.len() || tb.len() != vb.len() {
            return Err(Error::DimensionMismatch("coordinate vector length".into()));
        }
        let target_dim = self.dim(ia + ib, ja + jb);
        let mut out = vec![FieldScalar::zero(self.field); target_dim];
        for (pa, &ga) in ta.iter().enumerate() {
            if va[pa].is_zero() {
                continue;
            }
            for (pb, &gb) in tb.iter().enumerate() {
                if vb[pb].is_zero() {
                    continue;
                }
                let table = self.products.get(&(ga, gb)).ok_or_else(|| {
                    Error::HomologicalCapExceeded {
                        context: "product outside the computed table".into(),
                        needed: ia + ib,
                        cap: self.d,
                    }
                })?;
                let c = va[pa].mul(&vb[pb]);
                for (t, coef) in table.iter().enumerate() {
                    out[t] = out[t].add(&coef.mul(&c));
                }
            }
        }
        Ok(out)
    }
}

/// Read the basis of E off the minimal resolution; products are left empty.
pub fn ext_basis(res: &Resolution, field: Field) -> ExtAlgebra {
    let d = res.length();
    let mut elements = Vec::new();
    let mut bidegrees: BTreeMap<(u32, i64), Vec<usize>> = BTreeMap::new();
    for (i, degs) in res.v_degrees.iter().enumerate() {
        for (column, &n) in degs.iter().enumerate() {
            let idx = elements.len();
            elements.push(ExtElement { i: i as u32, j: -n, column });
            bidegrees.entry((i as u32, -n)).or_default().push(idx);
        }
    }
    let ell = if res.v_degrees[d as usize].len() == 1 {
        res.v_degrees[d as usize][0]
    } else {
        0
    };
    ExtAlgebra {
        field,
        d,
        ell,
        elements,
        bidegrees,
        unit: 0,
        products: BTreeMap::new(),
    }
}

/// Deterministic pseudo-shuffle of 0..n from a seed (xorshift steps);
/// used to perturb pivot orders when exercising lift-independence.
pub fn seeded_permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut s = seed | 1;
    for k in (1..n).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        let j = (s % (k as u64 + 1)) as usize;
        order.swap(k, j);
    }
    order
}

/// Lift the basis element `idx` to a chain map `P → Σ^i T^j P` built down
/// to homological position −depth. With `pivot_seed` set, every linear
/// solve uses a perturbed pivot order, choosing a different (homotopic)
/// representative.
pub fn lift_class(
    e: &ExtAlgebra,
    res: &Resolution,
    gb: &GroebnerData,
    idx: usize,
    depth: u32,
    pivot_seed: Option<u64>,
) -> Result<ChainMap> {
    let field = e.field;
    let elem = &e.elements[idx];
    let (k, l) = (elem.i, elem.j);
    if depth > res.length() {
        return Err(Error::HomologicalCapExceeded {
            context: "lift depth".into(),
            needed: depth,
            cap: res.length(),
        });
    }

    let mut components: BTreeMap<i32, ModuleMap> = BTreeMap::new();
    // Top component: kill every generator except the chosen one.
    let src_top = res.complex.term(-(k as i32)).expect("term exists").clone();
    let tgt_top = res.complex.term(0).expect("term exists").shifted(l);
    let mut top_entries = vec![vec![NcPoly::zero(field); src_top.rank()]];
    top_entries[0][elem.column] = NcPoly::one(field);
    components.insert(-(k as i32), ModuleMap::new(src_top, tgt_top, top_entries, None)?);

    let sign = if k % 2 == 0 { 1i64 } else { -1 };
    for m in (k + 1)..=depth {
        let n = -(m as i32);
        let src = res.complex.term(n).expect("term exists").clone();
        let prev = components.get(&(n + 1)).expect("previous component");
        let dx = res.complex.diff(n).expect("differential exists");
        let rhs = prev.compose(dx, gb)?;
        // Solve (−1)^k T^l(∂^{(n+k)}) ∘ g = rhs column by column.
        let d_target = res
            .complex
            .diff(n + k as i32)
            .expect("target differential exists");
        let tgt = d_target.source.shifted(l);
        let mut entries = vec![vec![NcPoly::zero(field); src.rank()]; tgt.rank()];
        for c in 0..src.rank() {
            let nc = src.gen_degrees[c];
            let slice_deg = nc + l;
            if slice_deg < 0 {
                continue;
            }
            if slice_deg > i64::from(gb.complete_to_degree) {
                return Err(Error::CapExceeded {
                    context: "cocycle lifting".into(),
                    needed: slice_deg as u32,
                    cap: gb.complete_to_degree,
                });
            }
            // Right side: coordinates of rhs(e_c) in the shifted slice.
            let rhs_layout = rhs.target.layout_at(gb, nc)?;
            let mut b = vec![FieldScalar::zero(field); rhs_layout.total];
            for (r, &(r0, rlen)) in rhs_layout.spans.iter().enumerate() {
                if rlen == 0 || rhs.entries[r][c].is_zero() {
                    continue;
                }
                let wdeg = (nc - rhs.target.gen_degrees[r]) as u32;
                for (t, v) in gb
                    .coords_in_degree(&rhs.entries[r][c], wdeg)?
                    .into_iter()
                    .enumerate()
                {
                    b[r0 + t] = v;
                }
            }
            if sign == -1 {
                for v in b.iter_mut() {
                    *v = v.neg();
                }
            }
            let mat = d_target.scalar_matrix_at(gb, slice_deg)?;
            let solver = match pivot_seed {
                Some(seed) => {
                    let order = seeded_permutation(mat.ncols(), seed ^ (m as u64) << 8 ^ c as u64);
                    Solver::with_order(&mat, &order)
                }
                None => Solver::new(&mat),
            };
            let u = solver.solve(&b).ok_or_else(|| {
                Error::Internal("cocycle lift: right side is not a boundary".into())
            })?;
            // Distribute the solution across the target generators.
            let tgt_layout = d_target.source.layout_at(gb, slice_deg)?;
            for (r, &(r0, rlen)) in tgt_layout.spans.iter().enumerate() {
                if rlen == 0 {
                    continue;
                }
                let wdeg = (slice_deg - d_target.source.gen_degrees[r]) as u32;
                let p = gb.element_from_coords(&u[r0..r0 + rlen], wdeg)?;
                entries[r][c] = p;
            }
        }
        components.insert(n, ModuleMap::new(src, tgt, entries, None)?);
    }
    Ok(ChainMap { components, shift_i: k as i32, shift_j: l })
}

/// Class of a chain map `P → Σ^i T^j P` in bidegree (i, j): constant terms
/// of the component at −i on the degree-matching generators.
pub fn class_of(
    e: &ExtAlgebra,
    res: &Resolution,
    map: &ChainMap,
) -> Result<Vec<FieldScalar>> {
    let i = map.shift_i;
    let j = map.shift_j;
    let i_u32 = u32::try_from(i).map_err(|_| Error::Internal("negative homological shift".into()))?;
    let members = e
        .bidegrees
        .get(&(i_u32, j))
        .cloned()
        .unwrap_or_default();
    let mut out = vec![FieldScalar::zero(e.field); members.len()];
    let Some(comp) = map.component(-i) else {
        return Ok(out);
    };
    let consts = comp.constant_term_matrix(e.field);
    for (pos, &g) in members.iter().enumerate() {
        let col = e.elements[g].column;
        out[pos] = consts.get(0, col).clone();
    }
    let _ = res;
    Ok(out)
}

/// Yoneda product of two basis elements: coordinates of a·b in the basis
/// of E^{i_a+i_b, j_a+j_b}. `pivot_seed` perturbs the lifting solves; the
/// class must not change.
pub fn yoneda_product_with_seed(
    e: &ExtAlgebra,
    res: &Resolution,
    gb: &GroebnerData,
    a: usize,
    b: usize,
    pivot_seed: Option<u64>,
) -> Result<Vec<FieldScalar>> {
    let ea = &e.elements[a];
    let eb = &e.elements[b];
    let depth = ea.i + eb.i;
    if depth > res.length() {
        return Err(Error::HomologicalCapExceeded {
            context: "product beyond the resolved range".into(),
            needed: depth,
            cap: res.length(),
        });
    }
    let lift_a = lift_class(e, res, gb, a, ea.i + eb.i, pivot_seed)?;
    let lift_b = lift_class(e, res, gb, b, ea.i + eb.i, pivot_seed.map(|s| s.wrapping_add(1)))?;
    let composite = graded_compose(&lift_a, &lift_b, gb)?;
    class_of(e, res, &composite)
}

/// Yoneda product with the default deterministic pivoting.
pub fn yoneda_product(
    e: &ExtAlgebra,
    res: &Resolution,
    gb: &GroebnerData,
    a: usize,
    b: usize,
) -> Result<Vec<FieldScalar>> {
    yoneda_product_with_seed(e, res, gb, a, b, None)
}

/// Fill the whole product table (all pairs whose homological degrees sum
/// within the resolved range).
pub fn fill_products(e: &mut ExtAlgebra, res: &Resolution, gb: &GroebnerData) -> Result<()> {
    for a in 0..e.elements.len() {
        for b in 0..e.elements.len() {
            if e.elements[a].i + e.elements[b].i <= res.length() {
                let v = yoneda_product(e, res, gb, a, b)?;
                e.products.insert((a, b), v);
            } else if res.terminated {
                // The algebra vanishes beyond the top homological degree of
                // a terminated resolution, so the product is zero in a
                // zero-dimensional bidegree.
                e.products.insert((a, b), Vec::new());
            }
        }
    }
    Ok(())
}

/// Exact associativity of the filled table: (a·b)·c = a·(b·c) for every
/// triple inside the computed range.
pub fn check_associativity(e: &ExtAlgebra) -> bool {
    let n = e.elements.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let (ia, ib, ic) = (e.elements[a].i, e.elements[b].i, e.elements[c].i);
                if ia + ib + ic > e.d {
                    continue;
                }
                let (ja, jb, jc) = (e.elements[a].j, e.elements[b].j, e.elements[c].j);
                let ab = match e.products.get(&(a, b)) {
                    Some(v) => v.clone(),
                    None => return false,
                };
                let bc = match e.products.get(&(b, c)) {
                    Some(v) => v.clone(),
                    None => return false,
                };
                let mut vc = vec![FieldScalar::zero(e.field); e.dim(ic, jc)];
                if let Some(pos) = e.bidegrees[&(ic, jc)].iter().position(|&g| g == c) {
                    vc[pos] = FieldScalar::one(e.field);
                }
                let mut va = vec![FieldScalar::zero(e.field); e.dim(ia, ja)];
                if let Some(pos) = e.bidegrees[&(ia, ja)].iter().position(|&g| g == a) {
                    va[pos] = FieldScalar::one(e.field);
                }
                let left = e
                    .product_vec((ia + ib, ja + jb), &ab, (ic, jc), &vc)
                    .unwrap_or_default();
                let right = e
                    .product_vec((ia, ja), &va, (ib + ic, jb + jc), &bc)
                    .unwrap_or_default();
                if left != right {
                    return false;
                }
            }
        }
    }
    true
}
