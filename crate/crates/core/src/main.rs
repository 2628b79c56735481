//! Command-line front end: every pipeline stage is independently
//! invocable, and `analyze`/`verify` run the whole battery with exit
//! code 0 (all gating verdicts pass), 1 (input or processing error), or
//! 2 (a gating verdict failed).

use clap::{Args, Parser, Subcommand};
use extalg::extalgebra::{ext_basis, fill_products};
use extalg::freealg::{Field, FieldScalar};
use extalg::frobenius::{frobenius_form, is_graded_symmetric, nakayama_of_ext};
use extalg::groebner::compute_gb;
use extalg::nakayama::{hdet, lift_automorphism};
use extalg::presentation::{
    parse_presentation_with_field, AlgebraPresentation, AutomorphismSpec,
};
use extalg::report::{all_verdicts_pass, emit_json, emit_text, run_pipeline};
use extalg::resolution::{betti_table, gorenstein_signature, minimal_resolution};
use extalg::twist::graded_twist;
use extalg::Error;
use anyhow::Context;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "extalg",
    version,
    about = "Exact homological invariants of connected graded algebras: \
             rewriting bases, minimal resolutions, Ext-algebra structure, \
             Frobenius forms, Nakayama automorphisms, and homological \
             determinants."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Presentation file (`field`, `gen`, `rel`, `aut`, `cap` statements).
    file: PathBuf,
    /// Override the internal-degree cap from the file.
    #[arg(long)]
    cap_internal: Option<u32>,
    /// Override the homological cap from the file.
    #[arg(long)]
    cap_homological: Option<u32>,
    /// Override the scalar field: `Q` or `F<p>` with p prime.
    #[arg(long)]
    field: Option<String>,
    /// Output format: `text` or `json`.
    #[arg(long, default_value = "text")]
    format: String,
    /// Write the output here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full pipeline: report plus verdicts.
    Analyze(Common),
    /// Rewriting rules and graded dimensions.
    Gb(Common),
    /// Minimal resolution: Betti table and duality signature.
    Resolve(Common),
    /// Ext-algebra basis and multiplication table.
    Ext(Common),
    /// Frobenius form, pairing blocks, and the Ext-side Nakayama map.
    Frobenius(Common),
    /// Homological determinant of one automorphism.
    Hdet {
        #[command(flatten)]
        common: Common,
        /// Automorphism: a name declared in the file, `id`, or `xi:<c>`
        /// (the degree scaling by c, with c an integer or a ratio a/b).
        #[arg(long)]
        aut: String,
    },
    /// Graded twist by one automorphism; prints the twisted presentation.
    Twist {
        #[command(flatten)]
        common: Common,
        /// Automorphism name (declared in the file), `id`, or `xi:<c>`.
        #[arg(long)]
        aut: String,
    },
    /// Run the pipeline and print only the verdict table.
    Verify(Common),
}

fn parse_field_flag(s: &str) -> anyhow::Result<Field> {
    if s == "Q" {
        return Ok(Field::Q);
    }
    if let Some(p) = s.strip_prefix('F') {
        let p: u64 = p.trim().parse().with_context(|| format!("bad field `{s}`"))?;
        return Ok(Field::fp(p)?);
    }
    anyhow::bail!("bad field `{s}` (use Q or F<p>)")
}

fn parse_scalar(s: &str, field: Field) -> anyhow::Result<FieldScalar> {
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().with_context(|| format!("bad scalar `{s}`"))?;
        let d: i64 = d.trim().parse().with_context(|| format!("bad scalar `{s}`"))?;
        Ok(FieldScalar::from_ratio(field, n, d)?)
    } else {
        let v: i64 = s.trim().parse().with_context(|| format!("bad scalar `{s}`"))?;
        Ok(FieldScalar::from_i64(field, v))
    }
}

fn load(common: &Common) -> anyhow::Result<AlgebraPresentation> {
    let text = std::fs::read_to_string(&common.file)
        .with_context(|| format!("cannot read {}", common.file.display()))?;
    let field = common.field.as_deref().map(parse_field_flag).transpose()?;
    let mut pres = parse_presentation_with_field(&text, field)?;
    if let Some(n) = common.cap_internal {
        pres.cap_internal = n;
    }
    if let Some(n) = common.cap_homological {
        pres.cap_homological = n;
    }
    Ok(pres)
}

fn resolve_aut(name: &str, pres: &AlgebraPresentation) -> anyhow::Result<AutomorphismSpec> {
    if name == "id" {
        return Ok(AutomorphismSpec::identity(pres));
    }
    if let Some(c) = name.strip_prefix("xi:") {
        let c = parse_scalar(c, pres.field)?;
        return Ok(AutomorphismSpec::xi(pres, &c)?);
    }
    if let Some(a) = pres.declared_auto(name) {
        return Ok(a.clone());
    }
    anyhow::bail!("unknown automorphism `{name}` (declare it in the file with `aut`)")
}

fn write_out(common: &Common, content: &str) -> anyhow::Result<()> {
    match &common.output {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("cannot write {}", path.display())),
        None => std::io::stdout().write_all(content.as_bytes()).context("stdout"),
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::Analyze(common) => {
            let pres = load(&common)?;
            let started = Instant::now();
            let report = run_pipeline(&pres)?;
            let rendered = if common.format == "json" {
                emit_json(&report)
            } else {
                emit_text(&report, Some(started.elapsed()))
            };
            write_out(&common, &rendered)?;
            Ok(if all_verdicts_pass(&report) { 0 } else { 2 })
        }
        Cmd::Verify(common) => {
            let pres = load(&common)?;
            let report = run_pipeline(&pres)?;
            let mut out = String::new();
            for name in extalg::report::VERDICT_NAMES {
                if let Some(v) = report.verdicts.get(name) {
                    let line = match (&v.value, &v.reason) {
                        (Some(true), _) => format!("{name}: pass\n"),
                        (Some(false), _) if !v.gating => {
                            format!("{name}: false (descriptive)\n")
                        }
                        (Some(false), _) => format!("{name}: FAIL\n"),
                        (None, Some(r)) => format!("{name}: skipped ({r})\n"),
                        (None, None) => format!("{name}: skipped\n"),
                    };
                    out.push_str(&line);
                }
            }
            write_out(&common, &out)?;
            Ok(if all_verdicts_pass(&report) { 0 } else { 2 })
        }
        Cmd::Gb(common) => {
            let pres = load(&common)?;
            let gb = compute_gb(&pres, pres.cap_internal)?;
            let names = pres.gen_names();
            let mut out = String::new();
            out.push_str(&format!("field: {}\n", pres.field));
            out.push_str(&format!(
                "hilbert dims (0..={}): {}\n",
                pres.cap_internal,
                gb.hilbert_dims(pres.cap_internal)?
                    .iter()
                    .map(|d| d.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ));
            out.push_str(&format!(
                "rules ({}), complete to degree {}{}:\n",
                gb.rules().len(),
                gb.complete_to_degree,
                if gb.truncated { " (truncated)" } else { "" }
            ));
            for rule in gb.rules() {
                out.push_str(&format!(
                    "  {} -> {}\n",
                    extalg::freealg::display_word(&rule.lead, &names),
                    rule.tail.display_with(&names)
                ));
            }
            write_out(&common, &out)?;
            Ok(0)
        }
        Cmd::Resolve(common) => {
            let pres = load(&common)?;
            let gb = compute_gb(&pres, pres.cap_internal)?;
            let res = minimal_resolution(&pres, &gb, pres.cap_internal, pres.cap_homological)?;
            let sig = gorenstein_signature(&res, &gb)?;
            let mut out = String::new();
            out.push_str("betti table (position, internal degree) -> rank:\n");
            for ((i, n), r) in betti_table(&res) {
                out.push_str(&format!("  ({i}, {n}): {r}\n"));
            }
            out.push_str(&format!(
                "terminated: {}, length: {}\n",
                res.terminated,
                res.length()
            ));
            if sig.conclusive {
                out.push_str(&format!(
                    "signature: d = {}, ell = {}, gorenstein: {}, regular: {}\n",
                    sig.d, sig.ell, sig.gorenstein_ok, sig.regular
                ));
            } else {
                out.push_str("signature: undecided at these caps\n");
            }
            write_out(&common, &out)?;
            Ok(0)
        }
        Cmd::Ext(common) => {
            let pres = load(&common)?;
            let gb = compute_gb(&pres, pres.cap_internal)?;
            let res = minimal_resolution(&pres, &gb, pres.cap_internal, pres.cap_homological)?;
            let mut e = ext_basis(&res, gb.field());
            fill_products(&mut e, &res, &gb)?;
            let mut out = String::new();
            out.push_str("dimensions (i, j) -> dim:\n");
            for (&(i, j), members) in &e.bidegrees {
                if !members.is_empty() {
                    out.push_str(&format!("  ({i}, {j}): {}\n", members.len()));
                }
            }
            out.push_str("products:\n");
            for (&(a, b), prod) in &e.products {
                let la = e.label(a);
                let lb = e.label(b);
                let (ea, eb) = (&e.elements[a], &e.elements[b]);
                let target = e
                    .bidegrees
                    .get(&(ea.i + eb.i, ea.j + eb.j))
                    .cloned()
                    .unwrap_or_default();
                let mut parts = Vec::new();
                for (t, c) in prod.iter().enumerate() {
                    if !c.is_zero() {
                        parts.push(format!("{}*{}", c, e.label(target[t])));
                    }
                }
                let rhs = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
                out.push_str(&format!("  {la}*{lb} = {rhs}\n"));
            }
            write_out(&common, &out)?;
            Ok(0)
        }
        Cmd::Frobenius(common) => {
            let pres = load(&common)?;
            let gb = compute_gb(&pres, pres.cap_internal)?;
            let res = minimal_resolution(&pres, &gb, pres.cap_internal, pres.cap_homological)?;
            let sig = gorenstein_signature(&res, &gb)?;
            let mut e = ext_basis(&res, gb.field());
            fill_products(&mut e, &res, &gb)?;
            let mut out = String::new();
            match frobenius_form(&e) {
                Ok(f) => {
                    out.push_str(&format!(
                        "socle bidegree: ({}, {})\nnondegenerate: {}\n",
                        f.socle_bidegree.0, f.socle_bidegree.1, f.nondegenerate
                    ));
                    let mu = nakayama_of_ext(&e, &f)?;
                    out.push_str("nakayama blocks (i, j):\n");
                    for (&(i, j), m) in &mu.blocks {
                        out.push_str(&format!("  ({i}, {j}):\n"));
                        for r in 0..m.nrows() {
                            let row: Vec<String> =
                                (0..m.ncols()).map(|c| m.get(r, c).to_string()).collect();
                            out.push_str(&format!("    [{}]\n", row.join(", ")));
                        }
                    }
                    if sig.conclusive && sig.gorenstein_ok {
                        out.push_str(&format!(
                            "graded symmetric: {}\n",
                            is_graded_symmetric(&mu, &e, sig.d)?
                        ));
                    }
                }
                Err(Error::SocleNotOneDimensional(n)) => {
                    out.push_str(&format!(
                        "no Frobenius structure: the left socle has dimension {n}\n"
                    ));
                }
                Err(other) => return Err(other.into()),
            }
            write_out(&common, &out)?;
            Ok(0)
        }
        Cmd::Hdet { common, aut } => {
            let pres = load(&common)?;
            let sigma = resolve_aut(&aut, &pres)?;
            let gb = compute_gb(&pres, pres.cap_internal)?;
            let res = minimal_resolution(&pres, &gb, pres.cap_internal, pres.cap_homological)?;
            let sig = gorenstein_signature(&res, &gb)?;
            let lift = lift_automorphism(&aut, &sigma, &pres, &gb, &res, None)?;
            let h = hdet(&lift, &res, &sig)?;
            write_out(&common, &format!("hdet({aut}) = {}\n", h.scalar))?;
            Ok(0)
        }
        Cmd::Twist { common, aut } => {
            let pres = load(&common)?;
            let sigma = resolve_aut(&aut, &pres)?;
            let gb = compute_gb(&pres, pres.cap_internal)?;
            let twisted = graded_twist(&pres, &sigma, &gb)?;
            write_out(&common, &twisted.print_canonical())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    // Usage errors exit 1 like any other input error; exit code 2 is
    // reserved for a failed gating verdict.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp
                | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
