//! Graded twist of a presented algebra by one degree-preserving
//! automorphism: the underlying space is unchanged and the product is
//! a ⋆ b = σ^{|b|}(a)·b. The twisted presentation is found degreewise:
//! evaluate every free word through ⋆ into the base algebra and take the
//! kernel of that evaluation as the new relation set.
//!
//! Orientation note (fixed by a regression test): twisting the
//! commutative plane by diag(a, b) yields x⋆y = a·xy and y⋆x = b·xy, so
//! the interreduced twisted rule is y·x → (b/a)·x·y.

use crate::error::{Error, Result};
use crate::freealg::{NcPoly, Word};
use crate::groebner::{compute_gb, GroebnerData};
use crate::linalg::{kernel_basis, Mat};
use crate::presentation::{
    apply_automorphism, require_automorphism, AlgebraPresentation, AutomorphismSpec,
};
use crate::resolution::{betti_table, minimal_resolution};

/// All free words of a given total degree over the presentation's
/// generators, in ascending deglex order.
fn words_of_degree(n: u32, gen_degrees: &[u32]) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Word::from_letters(&[], gen_degrees));
        return out;
    }
    for (i, &d) in gen_degrees.iter().enumerate() {
        if d > n {
            continue;
        }
        for tail in words_of_degree(n - d, gen_degrees) {
            let head = Word::gen(i as u32, d);
            out.push(head.concat(&tail));
        }
    }
    out.sort_by(crate::freealg::deglex_compare);
    out
}

/// Evaluate one free word through the twisted product into the base
/// algebra (normal form): x_{i_1} ⋆ (x_{i_2} ⋆ (… ⋆ x_{i_k})). The
/// twisted product is associative, so the fold direction is a
/// convention, not a choice of value.
fn star_eval(
    w: &Word,
    sigma_pows: &[AutomorphismSpec],
    pres: &AlgebraPresentation,
    gb: &GroebnerData,
) -> Result<NcPoly> {
    let field = pres.field;
    let degs = pres.gen_degrees();
    let mut acc = NcPoly::one(field);
    let mut acc_degree: u32 = 0;
    for &letter in w.letters().iter().rev() {
        let gen = NcPoly::generator(field, letter, &degs);
        let twisted = apply_automorphism(&sigma_pows[acc_degree as usize], &gen)?;
        acc = gb.normal_form(&twisted.mul(&acc)?)?;
        acc_degree += degs[letter as usize];
    }
    Ok(acc)
}

/// Presentation of the graded twist: same generators and caps, relations
/// replaced degree by degree with the kernel of the ⋆-evaluation map
/// (deterministic echelon basis, monic leads, deglex word order).
pub fn graded_twist(
    pres: &AlgebraPresentation,
    sigma: &AutomorphismSpec,
    gb: &GroebnerData,
) -> Result<AlgebraPresentation> {
    require_automorphism("twist", sigma, pres, gb)?;
    let field = pres.field;
    let max_rel_degree = pres
        .relations
        .iter()
        .filter_map(|r| r.lead().map(|(w, _)| w.degree()))
        .max()
        .unwrap_or(0);
    if max_rel_degree > gb.complete_to_degree {
        return Err(Error::CapExceeded {
            context: "twisting needs base normal forms through the relation degrees".into(),
            needed: max_rel_degree,
            cap: gb.complete_to_degree,
        });
    }
    let mut sigma_pows = vec![AutomorphismSpec::identity(pres)];
    for _ in 1..=max_rel_degree {
        sigma_pows.push(sigma.compose(sigma_pows.last().unwrap())?);
    }

    let degs = pres.gen_degrees();
    let mut relations: Vec<NcPoly> = Vec::new();
    for n in 2..=max_rel_degree {
        let words = words_of_degree(n, &degs);
        if words.is_empty() {
            continue;
        }
        let dim_n = gb.dim(n)?;
        let mut m = Mat::zeros(field, dim_n, words.len());
        for (c, w) in words.iter().enumerate() {
            let value = star_eval(w, &sigma_pows, pres, gb)?;
            for (t, v) in gb.coords_in_degree(&value, n)?.into_iter().enumerate() {
                m.set(t, c, v);
            }
        }
        if crate::linalg::rank(&m) != dim_n {
            return Err(Error::Internal(
                "twisted evaluation does not span the base degree slice".into(),
            ));
        }
        for vec in kernel_basis(&m) {
            let mut rel = NcPoly::zero(field);
            for (c, coef) in vec.into_iter().enumerate() {
                if !coef.is_zero() {
                    rel.add_term(words[c].clone(), coef);
                }
            }
            let lead_inv = rel
                .lead()
                .map(|(_, c)| c.inv())
                .transpose()?
                .ok_or_else(|| Error::Internal("zero kernel vector".into()))?;
            relations.push(rel.scale(&lead_inv));
        }
    }

    Ok(AlgebraPresentation {
        field,
        generators: pres.generators.clone(),
        relations,
        declared_autos: Vec::new(),
        cap_internal: pres.cap_internal,
        cap_homological: pres.cap_homological,
    })
}

/// Homological sanity of the twist: Hilbert dimensions agree degreewise
/// up to the internal cap and the Betti tables agree up to both caps
/// (twisting preserves the graded module category, hence both).
pub fn twist_roundtrip_check(
    pres: &AlgebraPresentation,
    sigma: &AutomorphismSpec,
    gb: &GroebnerData,
    cap_internal: u32,
    cap_homological: u32,
) -> Result<bool> {
    let twisted = graded_twist(pres, sigma, gb)?;
    let gb_t = compute_gb(&twisted, gb.complete_to_degree)?;
    if gb.hilbert_dims(cap_internal)? != gb_t.hilbert_dims(cap_internal)? {
        return Ok(false);
    }
    let res_a = minimal_resolution(pres, gb, cap_internal, cap_homological)?;
    let res_b = minimal_resolution(&twisted, &gb_t, cap_internal, cap_homological)?;
    Ok(betti_table(&res_a) == betti_table(&res_b))
}

/// Ideal equality of two presentations on the same generators, decided
/// through mutual normal-form reduction of the relation sets.
pub fn same_ideal(
    a: &AlgebraPresentation,
    b: &AlgebraPresentation,
    cap: u32,
) -> Result<bool> {
    let gb_a = compute_gb(a, cap)?;
    let gb_b = compute_gb(b, cap)?;
    for rel in &b.relations {
        if !gb_a.normal_form(rel)?.is_zero() {
            return Ok(false);
        }
    }
    for rel in &a.relations {
        if !gb_b.normal_form(rel)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}
