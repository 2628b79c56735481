//! Bounded complexes of finitely generated graded free left A-modules,
//! chain maps with cohomological and internal shifts, homotopies, and the
//! sign conventions for the suspension.
//!
//! Conventions fixed here and relied on everywhere downstream:
//!
//! * A free module is `⊕_c A·e_c` with each generator `e_c` carrying an
//!   internal degree. A map sends `e_c ↦ Σ_r m[r][c]·ε_r`; entry `(r, c)` is
//!   homogeneous of degree `deg(e_c) − deg(ε_r)` and is stored in Gröbner
//!   normal form, so map equality is entrywise equality.
//! * A σ-twisted map satisfies `f(a·m) = σ(a)·f(m)`. Composing `g∘f`
//!   twists by `σ_g∘σ_f` and applies `σ_g` to the entries of `f`:
//!   `(g∘f)[r][c] = Σ_s σ_g(f[s][c]) · g[r][s]`.
//! * Complexes are cohomologically indexed with differential `∂: X^n →
//!   X^{n+1}`; resolutions live at positions `0, −1, …`.
//! * The suspension `Σ` re-indexes `(ΣX)^n = X^{n+1}` and sends a map of
//!   cohomological shift `i` to `(−1)^i` times its re-indexed components;
//!   in particular the differential of `ΣX` is `−∂`. The internal shift `T`
//!   lowers generator degrees by one per step and never introduces signs.
//! * Graded composition is `g * f = Σ^{i_f} T^{j_f}(g) ∘ f`, i.e. the
//!   components compose with the sign `(−1)^{i_f · i_g}`.

use crate::error::{Error, Result};
use crate::freealg::{FieldScalar, NcPoly, Word};
use crate::groebner::GroebnerData;
use crate::linalg::{Mat, Solver};
use crate::presentation::{apply_automorphism, AutomorphismSpec};
use std::collections::BTreeMap;

/// A finitely generated graded free module, recorded by the internal
/// degrees of its free generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedFreeModule {
    pub gen_degrees: Vec<i64>,
}

/// Index layout of one internal degree of a free module: for each
/// generator, the starting offset and length of its normal-word span.
#[derive(Clone, Debug)]
pub struct DegreeLayout {
    pub spans: Vec<(usize, usize)>,
    pub total: usize,
}

impl GradedFreeModule {
    pub fn new(gen_degrees: Vec<i64>) -> GradedFreeModule {
        GradedFreeModule { gen_degrees }
    }

    pub fn rank(&self) -> usize {
        self.gen_degrees.len()
    }

    /// The module with all generator degrees lowered by `j`.
    pub fn shifted(&self, j: i64) -> GradedFreeModule {
        GradedFreeModule { gen_degrees: self.gen_degrees.iter().map(|d| d - j).collect() }
    }

    /// Basis layout in internal degree `n`: generator `c` spans the normal
    /// words of `A` in degree `n − deg(e_c)` (empty when that is negative).
    pub fn layout_at(&self, gb: &GroebnerData, n: i64) -> Result<DegreeLayout> {
        let mut spans = Vec::with_capacity(self.rank());
        let mut total = 0usize;
        for &d in &self.gen_degrees {
            let wdeg = n - d;
            let len = if wdeg < 0 {
                0
            } else {
                let wdeg = u32::try_from(wdeg).map_err(|_| {
                    Error::Internal("internal degree out of range".into())
                })?;
                gb.dim(wdeg)?
            };
            spans.push((total, len));
            total += len;
        }
        Ok(DegreeLayout { spans, total })
    }

    pub fn dim_at(&self, gb: &GroebnerData, n: i64) -> Result<usize> {
        Ok(self.layout_at(gb, n)?.total)
    }
}

/// A homogeneous degree-0 map of graded free left modules, optionally
/// σ-linear.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModuleMap {
    pub source: GradedFreeModule,
    pub target: GradedFreeModule,
    /// `entries[r][c]` is the ε_r-component of the image of e_c.
    pub entries: Vec<Vec<NcPoly>>,
    pub sigma_twist: Option<AutomorphismSpec>,
}

impl ModuleMap {
    pub fn new(
        source: GradedFreeModule,
        target: GradedFreeModule,
        entries: Vec<Vec<NcPoly>>,
        sigma_twist: Option<AutomorphismSpec>,
    ) -> Result<ModuleMap> {
        let m = ModuleMap { source, target, entries, sigma_twist };
        m.check_shape()?;
        Ok(m)
    }

    pub fn zero(source: GradedFreeModule, target: GradedFreeModule, field: crate::freealg::Field) -> ModuleMap {
        let entries = (0..target.rank())
            .map(|_| (0..source.rank()).map(|_| NcPoly::zero(field)).collect())
            .collect();
        ModuleMap { source, target, entries, sigma_twist: None }
    }

    pub fn identity(module: GradedFreeModule, field: crate::freealg::Field) -> ModuleMap {
        let n = module.rank();
        let entries = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| if r == c { NcPoly::one(field) } else { NcPoly::zero(field) })
                    .collect()
            })
            .collect();
        ModuleMap { source: module.clone(), target: module, entries, sigma_twist: None }
    }

    fn check_shape(&self) -> Result<()> {
        if self.entries.len() != self.target.rank()
            || self.entries.iter().any(|row| row.len() != self.source.rank())
        {
            return Err(Error::DimensionMismatch(format!(
                "matrix shape {}x{} does not match target rank {} and source rank {}",
                self.entries.len(),
                self.entries.first().map(|r| r.len()).unwrap_or(0),
                self.target.rank(),
                self.source.rank()
            )));
        }
        for (r, row) in self.entries.iter().enumerate() {
            for (c, p) in row.iter().enumerate() {
                if p.is_zero() {
                    continue;
                }
                let want = self.source.gen_degrees[c] - self.target.gen_degrees[r];
                match p.homogeneous_degree() {
                    Some(d) if i64::from(d) == want => {}
                    _ => {
                        return Err(Error::DimensionMismatch(format!(
                            "entry ({r},{c}) is not homogeneous of degree {want}"
                        )))
                    }
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|row| row.iter().all(|p| p.is_zero()))
    }

    /// True when every entry lies in the augmentation ideal A_{≥1} (no
    /// invertible-scalar entries); the defining property of minimality.
    pub fn entries_in_augmentation_ideal(&self) -> bool {
        self.entries.iter().all(|row| {
            row.iter().all(|p| p.is_zero() || p.homogeneous_degree().map_or(false, |d| d >= 1))
        })
    }

    pub fn add(&self, other: &ModuleMap) -> Result<ModuleMap> {
        if self.source != other.source || self.target != other.target || self.sigma_twist != other.sigma_twist {
            return Err(Error::DimensionMismatch("adding maps with different endpoints or twists".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleMap { source: self.source.clone(), target: self.target.clone(), entries, sigma_twist: self.sigma_twist.clone() })
    }

    pub fn sub(&self, other: &ModuleMap) -> Result<ModuleMap> {
        self.add(&other.scale_i64(-1))
    }

    pub fn scale(&self, c: &FieldScalar) -> ModuleMap {
        let entries = self
            .entries
            .iter()
            .map(|row| row.iter().map(|p| p.scale(c)).collect())
            .collect();
        ModuleMap { source: self.source.clone(), target: self.target.clone(), entries, sigma_twist: self.sigma_twist.clone() }
    }

    pub fn scale_i64(&self, c: i64) -> ModuleMap {
        let field = self
            .entries
            .first()
            .and_then(|r| r.first())
            .map(|p| p.field())
            .expect("nonempty matrix");
        self.scale(&FieldScalar::from_i64(field, c))
    }

    /// Composite `self ∘ other` (apply `other` first). Twists compose and
    /// `self`'s twist hits `other`'s entries; all products are reduced to
    /// normal form.
    pub fn compose(&self, other: &ModuleMap, gb: &GroebnerData) -> Result<ModuleMap> {
        if other.target != self.source {
            return Err(Error::DimensionMismatch(
                "inner target does not match outer source in composition".into(),
            ));
        }
        let twist = match (&self.sigma_twist, &other.sigma_twist) {
            (None, None) => None,
            (Some(s), None) => Some(s.clone()),
            (None, Some(t)) => Some(t.clone()),
            (Some(s), Some(t)) => Some(s.compose(t)?),
        };
        let field = gb.field();
        let mut entries = vec![vec![NcPoly::zero(field); other.source.rank()]; self.target.rank()];
        for r in 0..self.target.rank() {
            for c in 0..other.source.rank() {
                let mut acc = NcPoly::zero(field);
                for s in 0..self.source.rank() {
                    let mut left = other.entries[s][c].clone();
                    if let Some(sigma) = &self.sigma_twist {
                        left = apply_automorphism(sigma, &left)?;
                    }
                    acc = acc.add(&left.mul(&self.entries[r][s])?)?;
                }
                entries[r][c] = gb.normal_form(&acc)?;
            }
        }
        Ok(ModuleMap { source: other.source.clone(), target: self.target.clone(), entries, sigma_twist: twist })
    }

    /// The scalar matrix of this map in internal degree `n`, columns indexed
    /// generator-major by the source layout and rows by the target layout.
    pub fn scalar_matrix_at(&self, gb: &GroebnerData, n: i64) -> Result<Mat> {
        let src = self.source.layout_at(gb, n)?;
        let tgt = self.target.layout_at(gb, n)?;
        let field = gb.field();
        let mut m = Mat::zeros(field, tgt.total, src.total);
        for c in 0..self.source.rank() {
            let (c0, clen) = src.spans[c];
            if clen == 0 {
                continue;
            }
            let wdeg = (n - self.source.gen_degrees[c]) as u32;
            let words: Vec<Word> = gb.basis_of_degree(wdeg)?.to_vec();
            for (k, w) in words.iter().enumerate() {
                let mut wpoly = NcPoly::monomial(field, w.clone(), FieldScalar::one(field));
                if let Some(sigma) = &self.sigma_twist {
                    wpoly = apply_automorphism(sigma, &wpoly)?;
                }
                for r in 0..self.target.rank() {
                    let (r0, rlen) = tgt.spans[r];
                    if rlen == 0 || self.entries[r][c].is_zero() {
                        continue;
                    }
                    let img = wpoly.mul(&self.entries[r][c])?;
                    let tdeg = (n - self.target.gen_degrees[r]) as u32;
                    let coords = gb.coords_in_degree(&img, tdeg)?;
                    for (t, v) in coords.into_iter().enumerate() {
                        if !v.is_zero() {
                            m.set(r0 + t, c0 + k, v);
                        }
                    }
                }
            }
        }
        Ok(m)
    }

    /// The matrix of constant (degree-matching) coefficients: entry `(r,c)`
    /// is the scalar part of `entries[r][c]` when source and target
    /// generator degrees agree, i.e. the induced map modulo A_{≥1}.
    pub fn constant_term_matrix(&self, field: crate::freealg::Field) -> Mat {
        let mut m = Mat::zeros(field, self.target.rank(), self.source.rank());
        for r in 0..self.target.rank() {
            for c in 0..self.source.rank() {
                if self.source.gen_degrees[c] == self.target.gen_degrees[r] {
                    m.set(r, c, self.entries[r][c].coeff(&Word::empty()));
                }
            }
        }
        m
    }
}

/// A bounded cohomologically indexed complex; `diffs[n]` maps `X^n → X^{n+1}`.
#[derive(Clone, PartialEq, Debug)]
pub struct ChainComplex {
    pub terms: BTreeMap<i32, GradedFreeModule>,
    pub diffs: BTreeMap<i32, ModuleMap>,
}

impl ChainComplex {
    pub fn term(&self, n: i32) -> Option<&GradedFreeModule> {
        self.terms.get(&n)
    }

    pub fn diff(&self, n: i32) -> Option<&ModuleMap> {
        self.diffs.get(&n)
    }

    pub fn positions(&self) -> Vec<i32> {
        self.terms.keys().copied().collect()
    }

    /// Check shape, degree-homogeneity, and ∂∘∂ = 0 for every adjacent pair.
    pub fn validate(&self, gb: &GroebnerData) -> Result<()> {
        for (n, d) in &self.diffs {
            let src = self.terms.get(n).ok_or_else(|| {
                Error::Internal(format!("differential at {n} without a source term"))
            })?;
            let tgt = self.terms.get(&(n + 1)).ok_or_else(|| {
                Error::Internal(format!("differential at {n} without a target term"))
            })?;
            if d.source != *src || d.target != *tgt {
                return Err(Error::DimensionMismatch(format!(
                    "differential endpoints at position {n} disagree with the terms"
                )));
            }
            d.check_shape()?;
            if let Some(next) = self.diffs.get(&(n + 1)) {
                if !next.compose(d, gb)?.is_zero() {
                    return Err(Error::Internal(format!(
                        "differential does not square to zero at position {n}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A chain map `X → Σ^i T^j Y`: components `f^{(n)}: X^n → Y^{n+i}` with
/// target generator degrees lowered by `j`, commuting with differentials up
/// to the suspension sign: `(−1)^i T^j(∂_Y) ∘ f^{(n)} = f^{(n+1)} ∘ ∂_X`.
#[derive(Clone, PartialEq, Debug)]
pub struct ChainMap {
    pub components: BTreeMap<i32, ModuleMap>,
    pub shift_i: i32,
    pub shift_j: i64,
}

impl ChainMap {
    pub fn component(&self, n: i32) -> Option<&ModuleMap> {
        self.components.get(&n)
    }

    /// Verify the sign-twisted chain condition against explicit source and
    /// target complexes. Components absent at a position are treated as
    /// zero.
    pub fn check_chain_condition(
        &self,
        x: &ChainComplex,
        y: &ChainComplex,
        gb: &GroebnerData,
    ) -> Result<bool> {
        let sign = if self.shift_i.rem_euclid(2) == 0 { 1 } else { -1 };
        for (&n, dx) in &x.diffs {
            let lhs = match (y.diffs.get(&(n + self.shift_i)), self.components.get(&n)) {
                (Some(dy), Some(fn_)) => {
                    let dy_shifted = ModuleMap {
                        source: dy.source.shifted(self.shift_j),
                        target: dy.target.shifted(self.shift_j),
                        entries: dy.entries.clone(),
                        sigma_twist: dy.sigma_twist.clone(),
                    };
                    Some(dy_shifted.compose(fn_, gb)?.scale_i64(sign))
                }
                _ => None,
            };
            let rhs = self
                .components
                .get(&(n + 1))
                .map(|fn1| fn1.compose(dx, gb))
                .transpose()?;
            let ok = match (lhs, rhs) {
                (Some(a), Some(b)) => a.sub(&b)?.is_zero(),
                (Some(a), None) => a.is_zero(),
                (None, Some(b)) => b.is_zero(),
                (None, None) => true,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

// ---- Shift functors ----

/// Suspension of a complex: `(ΣX)^n = X^{n+1}` with differential `−∂`.
pub fn shift_sigma(x: &ChainComplex) -> ChainComplex {
    let terms = x.terms.iter().map(|(&n, m)| (n - 1, m.clone())).collect();
    let diffs = x
        .diffs
        .iter()
        .map(|(&n, d)| (n - 1, d.scale_i64(-1)))
        .collect();
    ChainComplex { terms, diffs }
}

/// Suspension of a chain map: components re-index and acquire the sign
/// `(−1)^i` where `i` is the map's cohomological shift.
pub fn shift_sigma_map(f: &ChainMap) -> ChainMap {
    let sign = if f.shift_i.rem_euclid(2) == 0 { 1 } else { -1 };
    let components = f
        .components
        .iter()
        .map(|(&n, m)| (n - 1, if sign == 1 { m.clone() } else { m.scale_i64(-1) }))
        .collect();
    ChainMap { components, shift_i: f.shift_i, shift_j: f.shift_j }
}

/// Internal-degree shift: generator degrees drop by `j`, matrices are
/// untouched and no signs appear.
pub fn shift_internal(x: &ChainComplex, j: i64) -> ChainComplex {
    let terms = x.terms.iter().map(|(&n, m)| (n, m.shifted(j))).collect();
    let diffs = x
        .diffs
        .iter()
        .map(|(&n, d)| {
            (
                n,
                ModuleMap {
                    source: d.source.shifted(j),
                    target: d.target.shifted(j),
                    entries: d.entries.clone(),
                    sigma_twist: d.sigma_twist.clone(),
                },
            )
        })
        .collect();
    ChainComplex { terms, diffs }
}

/// Graded composition `g * f = Σ^{i_f} T^{j_f}(g) ∘ f`: shifts add and the
/// components compose with the interchange sign `(−1)^{i_f · i_g}`.
pub fn graded_compose(g: &ChainMap, f: &ChainMap, gb: &GroebnerData) -> Result<ChainMap> {
    let sign = if (i64::from(f.shift_i) * i64::from(g.shift_i)).rem_euclid(2) == 0 { 1 } else { -1 };
    let mut components = BTreeMap::new();
    for (&n, fc) in &f.components {
        if let Some(gc) = g.components.get(&(n + f.shift_i)) {
            let g_shifted = ModuleMap {
                source: gc.source.shifted(f.shift_j),
                target: gc.target.shifted(f.shift_j),
                entries: gc.entries.clone(),
                sigma_twist: gc.sigma_twist.clone(),
            };
            let mut comp = g_shifted.compose(fc, gb)?;
            if sign == -1 {
                comp = comp.scale_i64(-1);
            }
            if !comp.is_zero() {
                components.insert(n, comp);
            }
        }
    }
    Ok(ChainMap {
        components,
        shift_i: f.shift_i + g.shift_i,
        shift_j: f.shift_j + g.shift_j,
    })
}

// ---- Interchange sign utilities ----

/// Sign for moving a suspension out of the left tensor factor: none.
pub fn tensor_shift_left_sign(_left_position: i32) -> i64 {
    1
}

/// Sign for moving a suspension out of the right tensor factor past a left
/// factor sitting in cohomological position `p`: `(−1)^p`.
pub fn tensor_shift_right_sign(left_position: i32) -> i64 {
    if left_position.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Reinterpret a map out of a suspended source, `ΣX → Σ^i T^j Y`, as a map
/// `X → Σ^{i−1} T^j Y`: components re-index down and gain the sign
/// `(−1)^i`.
pub fn absorb_source_shift(f: &ChainMap) -> ChainMap {
    let sign = if f.shift_i.rem_euclid(2) == 0 { 1 } else { -1 };
    let components = f
        .components
        .iter()
        .map(|(&n, m)| (n + 1, if sign == 1 { m.clone() } else { m.scale_i64(-1) }))
        .collect();
    ChainMap { components, shift_i: f.shift_i - 1, shift_j: f.shift_j }
}

/// Inverse of [`absorb_source_shift`]: present a map `X → Σ^i T^j Y` as a
/// map out of the suspended source, with components re-indexed up and the
/// sign `(−1)^{i+1}`.
pub fn emit_source_shift(f: &ChainMap) -> ChainMap {
    let sign = if (f.shift_i + 1).rem_euclid(2) == 0 { 1 } else { -1 };
    let components = f
        .components
        .iter()
        .map(|(&n, m)| (n - 1, if sign == 1 { m.clone() } else { m.scale_i64(-1) }))
        .collect();
    ChainMap { components, shift_i: f.shift_i + 1, shift_j: f.shift_j }
}

// ---- Homotopy ----

/// Decide whether two chain maps with equal shifts and endpoints differ by
/// a boundary: `f − g = T^j(∂_Y) ∘ h + h ∘ ∂_X` for some map `h` of
/// cohomological shift `i − 1` (no extra signs in this witness equation).
/// Returns the witness `h` when it exists. Untwisted maps only.
pub fn homotopy_equal(
    f: &ChainMap,
    g: &ChainMap,
    x: &ChainComplex,
    y: &ChainComplex,
    gb: &GroebnerData,
) -> Result<Option<ChainMap>> {
    if f.shift_i != g.shift_i || f.shift_j != g.shift_j {
        return Err(Error::DimensionMismatch("comparing maps with different shifts".into()));
    }
    for m in f.components.values().chain(g.components.values()) {
        if m.sigma_twist.is_some() {
            return Err(Error::Internal("homotopy comparison of twisted maps".into()));
        }
    }
    let field = gb.field();
    let (i, j) = (f.shift_i, f.shift_j);

    // Difference map, position by position.
    let mut diff_components: BTreeMap<i32, ModuleMap> = BTreeMap::new();
    for &n in x.terms.keys() {
        let target = match y.term(n + i) {
            Some(t) => t.shifted(j),
            None => continue,
        };
        let source = x.term(n).unwrap().clone();
        let zero = ModuleMap::zero(source, target, field);
        let fc = f.components.get(&n).unwrap_or(&zero);
        let gc = g.components.get(&n).unwrap_or(&zero);
        let e = fc.sub(gc)?;
        diff_components.insert(n, e);
    }

    // Unknowns: the entries of h^{(n)}: X^n → T^j Y^{n+i−1}, one normal-word
    // coordinate vector per (position, target gen, source gen) with a
    // nonnegative entry degree.
    struct Block {
        n: i32,
        r: usize,
        c: usize,
        degree: u32,
        offset: usize,
        len: usize,
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut total_unknowns = 0usize;
    for &n in x.terms.keys() {
        let yt = match y.term(n + i - 1) {
            Some(t) => t.shifted(j),
            None => continue,
        };
        let xt = x.term(n).unwrap();
        for r in 0..yt.rank() {
            for c in 0..xt.rank() {
                let d = xt.gen_degrees[c] - yt.gen_degrees[r];
                if d < 0 {
                    continue;
                }
                let d = u32::try_from(d).expect("nonnegative");
                if d > gb.complete_to_degree {
                    return Err(Error::CapExceeded {
                        context: "homotopy solve".into(),
                        needed: d,
                        cap: gb.complete_to_degree,
                    });
                }
                let len = gb.dim(d)?;
                blocks.push(Block { n, r, c, degree: d, offset: total_unknowns, len });
                total_unknowns += len;
            }
        }
    }
    let block_at = |n: i32, r: usize, c: usize| blocks.iter().find(|b| b.n == n && b.r == r && b.c == c);

    // Equations: for each position n and entry (r, c) of e^{(n)}, matching
    // coordinates of T^j(∂_Y) ∘ h^{(n)} + h^{(n+1)} ∘ ∂_X.
    let mut rows: Vec<Vec<FieldScalar>> = Vec::new();
    let mut rhs: Vec<FieldScalar> = Vec::new();
    for (&n, e) in &diff_components {
        let xt = x.term(n).unwrap();
        let yt_target = y.term(n + i).map(|t| t.shifted(j));
        let yt_h = y.term(n + i - 1).map(|t| t.shifted(j));
        let dy = y.diff(n + i - 1);
        let dx = x.diff(n);
        let Some(yt_target) = yt_target else { continue };
        for r in 0..yt_target.rank() {
            for c in 0..xt.rank() {
                let d = xt.gen_degrees[c] - yt_target.gen_degrees[r];
                if d < 0 {
                    if !e.entries[r][c].is_zero() {
                        return Ok(None);
                    }
                    continue;
                }
                let d = u32::try_from(d).expect("nonnegative");
                if d > gb.complete_to_degree {
                    return Err(Error::CapExceeded {
                        context: "homotopy solve".into(),
                        needed: d,
                        cap: gb.complete_to_degree,
                    });
                }
                let dim = gb.dim(d)?;
                let mut row_block = vec![vec![FieldScalar::zero(field); total_unknowns]; dim];
                // T^j(∂_Y) ∘ h^{(n)}: entry (r,c) = Σ_s h[s][c] · ∂Y[r][s].
                if let (Some(dy), Some(yt_h)) = (dy, &yt_h) {
                    for s in 0..yt_h.rank() {
                        if dy.entries[r][s].is_zero() {
                            continue;
                        }
                        if let Some(b) = block_at(n, s, c) {
                            let mult = gb.right_mult_matrix(&dy.entries[r][s], b.degree)?;
                            for (t, row) in row_block.iter_mut().enumerate() {
                                for k in 0..b.len {
                                    let v = mult.get(t, k);
                                    if !v.is_zero() {
                                        row[b.offset + k] = row[b.offset + k].add(v);
                                    }
                                }
                            }
                        }
                    }
                }
                // h^{(n+1)} ∘ ∂_X: entry (r,c) = Σ_s ∂X[s][c] · h[r][s].
                if let Some(dx) = dx {
                    for s in 0..dx.target.rank() {
                        if dx.entries[s][c].is_zero() {
                            continue;
                        }
                        if let Some(b) = block_at(n + 1, r, s) {
                            let mult = gb.left_mult_matrix(&dx.entries[s][c], b.degree)?;
                            for (t, row) in row_block.iter_mut().enumerate() {
                                for k in 0..b.len {
                                    let v = mult.get(t, k);
                                    if !v.is_zero() {
                                        row[b.offset + k] = row[b.offset + k].add(v);
                                    }
                                }
                            }
                        }
                    }
                }
                let target = gb.coords_in_degree(&e.entries[r][c], d)?;
                for (t, row) in row_block.into_iter().enumerate() {
                    rows.push(row);
                    rhs.push(target[t].clone());
                }
            }
        }
    }

    if total_unknowns == 0 {
        if rhs.iter().all(|v| v.is_zero()) {
            return Ok(Some(ChainMap { components: BTreeMap::new(), shift_i: i - 1, shift_j: j }));
        }
        return Ok(None);
    }
    let solution = if rows.is_empty() {
        vec![FieldScalar::zero(field); total_unknowns]
    } else {
        let mat = Mat::from_rows(field, rows);
        match Solver::new(&mat).solve(&rhs) {
            Some(s) => s,
            None => return Ok(None),
        }
    };

    // Materialize the witness.
    let mut components: BTreeMap<i32, ModuleMap> = BTreeMap::new();
    for &n in x.terms.keys() {
        let Some(yt) = y.term(n + i - 1).map(|t| t.shifted(j)) else { continue };
        let xt = x.term(n).unwrap();
        let mut entries = vec![vec![NcPoly::zero(field); xt.rank()]; yt.rank()];
        let mut any = false;
        for b in blocks.iter().filter(|b| b.n == n) {
            let coords = &solution[b.offset..b.offset + b.len];
            let p = gb.element_from_coords(coords, b.degree)?;
            if !p.is_zero() {
                any = true;
            }
            entries[b.r][b.c] = p;
        }
        if any {
            components.insert(n, ModuleMap::new(xt.clone(), yt, entries, None)?);
        }
    }
    Ok(Some(ChainMap { components, shift_i: i - 1, shift_j: j }))
}
