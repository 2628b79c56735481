//! End-to-end pipeline driver and report serialization. The report is
//! deterministic: all maps are ordered, scalars are printed exactly, and
//! timing is confined to the text rendering so the JSON bytes are stable
//! across runs.

use crate::error::{Error, Result};
use crate::extalgebra::{ext_basis, fill_products, ExtAlgebra};
use crate::freealg::FieldScalar;
use crate::frobenius::{
    frobenius_form, is_graded_symmetric, nakayama_of_ext, GradedLinearMap,
};
use crate::groebner::compute_gb;
use crate::linalg::Mat;
use crate::nakayama::{f_sigma, hdet, lift_automorphism, recover_mu_a, verdicts};
use crate::presentation::{require_automorphism, AlgebraPresentation, AutomorphismSpec};
use crate::resolution::{betti_table, gorenstein_signature, minimal_resolution};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Serialize, Clone, Debug)]
pub struct InputEcho {
    pub presentation: String,
    pub field: String,
    pub cap_internal: u32,
    pub cap_homological: u32,
}

#[derive(Serialize, Clone, Debug)]
pub struct SignatureReport {
    /// Cohomological position of the concentrated dual class, when decided.
    pub d: Option<u32>,
    pub ell: Option<i64>,
    pub regular: Option<bool>,
    /// `None` means the caps were insufficient to decide (unknown), never
    /// a silent false.
    pub gorenstein_ok: Option<bool>,
    pub note: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct ExtReport {
    /// Bidegree "(i, j)" → dimension.
    pub dimensions: BTreeMap<String, usize>,
    /// "a·b" rows of the multiplication table on basis labels, zero rows
    /// included so the table shape is reproducible.
    pub structure_constants: BTreeMap<String, String>,
}

#[derive(Serialize, Clone, Debug)]
pub struct FrobeniusReport {
    pub socle_bidegree: String,
    pub nondegenerate: bool,
    pub pairing_blocks: BTreeMap<String, Vec<Vec<String>>>,
    pub mu_e_blocks: BTreeMap<String, Vec<Vec<String>>>,
    pub graded_symmetric: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct NakayamaReport {
    /// Generator images of the declared Nakayama map, when the input
    /// declares one under the name `mu`.
    pub mu_a_declared: Option<Vec<String>>,
    /// Generator images recovered from the degree-one dual block.
    pub mu_a_recovered: Option<Vec<String>>,
    /// Which of the two fed the verdicts: "declared" or "recovered".
    pub mu_a_used: String,
    pub f_mu_blocks: BTreeMap<String, Vec<Vec<String>>>,
    pub hdet: String,
}

#[derive(Serialize, Clone, Debug)]
pub struct VerdictEntry {
    /// `None` when skipped; then `reason` says why.
    pub value: Option<bool>,
    pub reason: Option<String>,
    /// Gating entries decide the exit code; non-gating entries record an
    /// observation (an algebra is free to have a non-symmetric form).
    pub gating: bool,
}

#[derive(Serialize, Clone, Debug)]
pub struct VerificationReport {
    pub input: InputEcho,
    pub hilbert_dims: Vec<usize>,
    /// "(i, n)" → rank of the resolution term at position −i in internal
    /// degree n.
    pub betti: BTreeMap<String, usize>,
    pub resolution_complete: bool,
    pub signature: SignatureReport,
    pub ext: ExtReport,
    pub frobenius: Option<FrobeniusReport>,
    pub nakayama: Option<NakayamaReport>,
    pub verdicts: BTreeMap<String, VerdictEntry>,
    pub notes: Vec<String>,
}

fn mat_strings(m: &Mat) -> Vec<Vec<String>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m.get(r, c).to_string()).collect())
        .collect()
}

fn blocks_strings(map: &GradedLinearMap) -> BTreeMap<String, Vec<Vec<String>>> {
    map.blocks
        .iter()
        .map(|(&(i, j), m)| (format!("({i}, {j})"), mat_strings(m)))
        .collect()
}

fn auto_strings(a: &AutomorphismSpec, pres: &AlgebraPresentation) -> Vec<String> {
    let names = pres.gen_names();
    a.images()
        .iter()
        .enumerate()
        .map(|(i, img)| format!("{} -> {}", names[i], img.display_with(&names)))
        .collect()
}

fn vector_string(e: &ExtAlgebra, i: u32, j: i64, v: &[FieldScalar]) -> String {
    let members = match e.bidegrees.get(&(i, j)) {
        Some(m) => m,
        None => return "0".to_string(),
    };
    let mut parts = Vec::new();
    for (t, coef) in v.iter().enumerate() {
        if coef.is_zero() {
            continue;
        }
        parts.push(format!("{}*{}", coef, e.label(members[t])));
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

fn is_gating(name: &str) -> bool {
    !matches!(name, "graded_symmetric" | "epsilon_witness")
}

fn skip_named(name: &str, reason: &str) -> VerdictEntry {
    VerdictEntry { value: None, reason: Some(reason.to_string()), gating: is_gating(name) }
}

fn decided_named(name: &str, v: bool) -> VerdictEntry {
    VerdictEntry { value: Some(v), reason: None, gating: is_gating(name) }
}

/// The verdict names, in the order the text report prints them.
pub const VERDICT_NAMES: [&str; 6] = [
    "nakayama_factors",
    "deg1_transpose",
    "hdet_one",
    "scalar_nakayama",
    "graded_symmetric",
    "epsilon_witness",
];

/// Run every stage on one presentation, honoring its caps. Invariant
/// violations carry the stage name; user-facing errors (caps, field
/// problems) keep their own messages, and expected negative states (no
/// Frobenius structure, undecidable signature) are reported, not raised.
pub fn run_pipeline(pres: &AlgebraPresentation) -> Result<VerificationReport> {
    let cap_internal = pres.cap_internal;
    let cap_homological = pres.cap_homological;
    let stage = |name: &str, e: Error| -> Error {
        match e {
            Error::Internal(msg) => Error::Internal(format!("stage {name}: {msg}")),
            other => other,
        }
    };

    let gb = compute_gb(pres, cap_internal).map_err(|e| stage("groebner", e))?;
    let hilbert = gb.hilbert_dims(cap_internal).map_err(|e| stage("groebner", e))?;
    let res = minimal_resolution(pres, &gb, cap_internal, cap_homological)
        .map_err(|e| stage("resolution", e))?;
    let sig = gorenstein_signature(&res, &gb).map_err(|e| stage("signature", e))?;
    let betti: BTreeMap<String, usize> = betti_table(&res)
        .into_iter()
        .map(|((i, n), r)| (format!("({i}, {n})"), r))
        .collect();

    let mut e = ext_basis(&res, gb.field());
    fill_products(&mut e, &res, &gb).map_err(|er| stage("ext", er))?;
    let ext_report = ext_report_of(&e);

    let mut notes: Vec<String> = Vec::new();
    let truncated = !res.terminated || res.complete.iter().any(|c| !c);
    if gb.truncated {
        notes.push(format!(
            "rewriting rules truncated at internal degree {}",
            gb.complete_to_degree
        ));
    }
    if truncated {
        notes.push(format!(
            "resolution truncated by caps (internal {cap_internal}, homological {cap_homological})"
        ));
    }

    let decided = sig.conclusive && sig.gorenstein_ok;
    let signature = SignatureReport {
        // d and ell describe the concentrated dual class, so they are
        // reported only when that class exists.
        d: if decided { Some(sig.d) } else { None },
        ell: if decided { Some(sig.ell) } else { None },
        regular: if sig.conclusive { Some(sig.regular) } else { None },
        gorenstein_ok: if sig.conclusive { Some(sig.gorenstein_ok) } else { None },
        note: if sig.conclusive {
            if sig.gorenstein_ok {
                format!("concentrated one-dimensional dual class at ({}, {})", sig.d, sig.ell)
            } else {
                "dual cohomology is not a single one-dimensional class".to_string()
            }
        } else {
            "caps too small to decide; raise them for a verdict".to_string()
        },
    };

    let mut verdict_map: BTreeMap<String, VerdictEntry> = BTreeMap::new();
    let mut frobenius_report = None;
    let mut nakayama_report = None;

    if !sig.conclusive {
        let reason = "signature undecided at these caps";
        for name in VERDICT_NAMES {
            verdict_map.insert(name.to_string(), skip_named(name, reason));
        }
    } else if !sig.gorenstein_ok {
        let reason = "the algebra is not Gorenstein at these caps";
        for name in VERDICT_NAMES {
            verdict_map.insert(name.to_string(), skip_named(name, reason));
        }
        match frobenius_form(&e) {
            Err(Error::SocleNotOneDimensional(n)) => {
                notes.push(format!("left socle of the Ext algebra has dimension {n}"));
            }
            Err(err) => return Err(stage("frobenius", err)),
            Ok(_) => notes.push(
                "note: the Ext algebra still carries a one-dimensional socle".to_string(),
            ),
        }
    } else {
        let f = frobenius_form(&e).map_err(|er| stage("frobenius", er))?;
        let mu_e = nakayama_of_ext(&e, &f).map_err(|er| stage("frobenius", er))?;
        let symmetric = is_graded_symmetric(&mu_e, &e, sig.d).map_err(|er| stage("frobenius", er))?;
        frobenius_report = Some(FrobeniusReport {
            socle_bidegree: format!("({}, {})", f.socle_bidegree.0, f.socle_bidegree.1),
            nondegenerate: f.nondegenerate,
            pairing_blocks: f
                .pairing
                .iter()
                .map(|(&(i, j), m)| (format!("({i}, {j})"), mat_strings(m)))
                .collect(),
            mu_e_blocks: blocks_strings(&mu_e),
            graded_symmetric: symmetric,
        });
        verdict_map.insert(
            "graded_symmetric".to_string(),
            decided_named("graded_symmetric", symmetric),
        );

        let declared = pres.declared_auto("mu").cloned();
        if let Some(a) = &declared {
            require_automorphism("mu", a, pres, &gb).map_err(|er| stage("nakayama", er))?;
        }
        let recovered = if pres.generated_in_degree_one() {
            Some(recover_mu_a(&mu_e, sig.d, pres, &gb).map_err(|er| stage("nakayama", er))?)
        } else {
            None
        };
        let (mu_used, used_label) = match (&declared, &recovered) {
            (Some(a), _) => (a.clone(), "declared"),
            (None, Some(r)) => (r.clone(), "recovered"),
            (None, None) => {
                for name in VERDICT_NAMES {
                    verdict_map.entry(name.to_string()).or_insert_with(|| {
                        skip_named(
                            name,
                            "no Nakayama map: not generated in degree one and none declared",
                        )
                    });
                }
                return Ok(VerificationReport {
                    input: input_echo(pres),
                    hilbert_dims: hilbert,
                    betti,
                    resolution_complete: !truncated,
                    signature,
                    ext: ext_report,
                    frobenius: frobenius_report,
                    nakayama: None,
                    verdicts: verdict_map,
                    notes,
                });
            }
        };
        if let (Some(a), Some(r)) = (&declared, &recovered) {
            if a != r {
                notes.push(
                    "declared Nakayama map differs from the recovered one".to_string(),
                );
            }
        }

        let v = verdicts(pres, &gb, &res, &e, &mu_e, &sig, &mu_used)
            .map_err(|er| stage("verdicts", er))?;
        for (key, val) in &v.results {
            let entry = match val {
                Some(b) => decided_named(key, *b),
                None => skip_named(
                    key,
                    match key.as_str() {
                        "scalar_nakayama" => "the Nakayama map is not a degree scaling",
                        "deg1_transpose" => "the algebra is not generated in degree one",
                        _ => "not applicable",
                    },
                ),
            };
            verdict_map.insert(key.clone(), entry);
        }
        notes.extend(v.details.iter().cloned());
        verdict_map.insert(
            "epsilon_witness".to_string(),
            if sig.regular {
                decided_named("epsilon_witness", true)
            } else {
                skip_named("epsilon_witness", "witness recorded only in the regular case")
            },
        );

        let lift = lift_automorphism("mu_A", &mu_used, pres, &gb, &res, None)
            .map_err(|er| stage("nakayama", er))?;
        let f_mu = f_sigma(&lift, &e).map_err(|er| stage("nakayama", er))?;
        let h = hdet(&lift, &res, &sig).map_err(|er| stage("nakayama", er))?;
        nakayama_report = Some(NakayamaReport {
            mu_a_declared: declared.as_ref().map(|a| auto_strings(a, pres)),
            mu_a_recovered: recovered.as_ref().map(|a| auto_strings(a, pres)),
            mu_a_used: used_label.to_string(),
            f_mu_blocks: blocks_strings(&f_mu),
            hdet: h.scalar.to_string(),
        });
    }

    Ok(VerificationReport {
        input: input_echo(pres),
        hilbert_dims: hilbert,
        betti,
        resolution_complete: !truncated,
        signature,
        ext: ext_report,
        frobenius: frobenius_report,
        nakayama: nakayama_report,
        verdicts: verdict_map,
        notes,
    })
}

fn input_echo(pres: &AlgebraPresentation) -> InputEcho {
    InputEcho {
        presentation: pres.print_canonical(),
        field: pres.field.to_string(),
        cap_internal: pres.cap_internal,
        cap_homological: pres.cap_homological,
    }
}

fn ext_report_of(e: &ExtAlgebra) -> ExtReport {
    let dimensions = e
        .bidegrees
        .iter()
        .filter(|(_, members)| !members.is_empty())
        .map(|(&(i, j), members)| (format!("({i}, {j})"), members.len()))
        .collect();
    let mut structure_constants = BTreeMap::new();
    for (&(a, b), prod) in &e.products {
        let (ea, eb) = (&e.elements[a], &e.elements[b]);
        let key = format!("{}*{}", e.label(a), e.label(b));
        let value = vector_string(e, ea.i + eb.i, ea.j + eb.j, prod);
        structure_constants.insert(key, value);
    }
    ExtReport { dimensions, structure_constants }
}

/// True when every decided gating verdict passed; skipped entries and
/// non-gating observations are neutral.
pub fn all_verdicts_pass(r: &VerificationReport) -> bool {
    r.verdicts.values().all(|v| !v.gating || v.value != Some(false))
}

/// Stable JSON rendering: ordered maps, exact scalar strings, no timing.
pub fn emit_json(r: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serialization cannot fail");
    s.push('\n');
    s
}

/// Human-readable rendering; `elapsed` is appended here and only here so
/// the JSON form stays byte-stable.
pub fn emit_text(r: &VerificationReport, elapsed: Option<std::time::Duration>) -> String {
    let mut out = String::new();
    let push = |out: &mut String, s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    push(&mut out, format!("field: {}", r.input.field));
    push(
        &mut out,
        format!(
            "caps: internal {}, homological {}",
            r.input.cap_internal, r.input.cap_homological
        ),
    );
    push(
        &mut out,
        format!(
            "hilbert dims: {}",
            r.hilbert_dims
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
    push(&mut out, "betti table:".to_string());
    for (k, v) in &r.betti {
        push(&mut out, format!("  {k}: {v}"));
    }
    let tri = |o: Option<bool>| o.map_or("unknown".to_string(), |b| b.to_string());
    match (r.signature.d, r.signature.ell) {
        (Some(d), Some(ell)) => push(
            &mut out,
            format!(
                "signature: d = {d}, ell = {ell}, gorenstein: {}, regular: {} ({})",
                tri(r.signature.gorenstein_ok),
                tri(r.signature.regular),
                r.signature.note
            ),
        ),
        _ => push(
            &mut out,
            format!(
                "signature: gorenstein: {}, regular: {} ({})",
                tri(r.signature.gorenstein_ok),
                tri(r.signature.regular),
                r.signature.note
            ),
        ),
    }
    if let Some(f) = &r.frobenius {
        push(
            &mut out,
            format!(
                "frobenius: socle at {}, nondegenerate: {}, graded symmetric: {}",
                f.socle_bidegree, f.nondegenerate, f.graded_symmetric
            ),
        );
    }
    if let Some(n) = &r.nakayama {
        if let Some(d) = &n.mu_a_declared {
            push(&mut out, format!("nakayama map (declared): {}", d.join("; ")));
        }
        if let Some(rec) = &n.mu_a_recovered {
            push(&mut out, format!("nakayama map (recovered): {}", rec.join("; ")));
        }
        push(&mut out, format!("hdet: {}", n.hdet));
    }
    push(&mut out, "verdicts:".to_string());
    for name in VERDICT_NAMES {
        if let Some(v) = r.verdicts.get(name) {
            let line = match (&v.value, &v.reason) {
                (Some(true), _) => format!("  {name}: pass"),
                (Some(false), _) if !v.gating => format!("  {name}: false (descriptive)"),
                (Some(false), _) => format!("  {name}: FAIL"),
                (None, Some(reason)) => format!("  {name}: skipped ({reason})"),
                (None, None) => format!("  {name}: skipped"),
            };
            push(&mut out, line);
        }
    }
    for note in &r.notes {
        push(&mut out, format!("note: {note}"));
    }
    if let Some(t) = elapsed {
        push(&mut out, format!("elapsed: {:.3}s", t.as_secs_f64()));
    }
    out
}
