//! End-to-end checks of the compiled binary: exit codes, output
//! stability, and error reporting.

use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> String {
    format!("{}/../../corpus/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extalg"))
        .args(args)
        .output()
        .expect("binary failed to launch")
}

fn scratch(name: &str, content: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("extalg_{}_{name}", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path
}

#[test]
fn analyze_json_is_byte_stable_across_runs() {
    let path = corpus("qplane2.alg");
    let a = run(&["analyze", &path, "--format", "json"]);
    let b = run(&["analyze", &path, "--format", "json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "JSON report changed between identical runs");
    assert!(!a.stdout.is_empty());
    let parsed: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(parsed["signature"]["d"], 2);
    assert_eq!(parsed["nakayama"]["hdet"], "1");
}

#[test]
fn verify_passes_on_the_plane_and_fails_on_a_wrong_declared_map() {
    let ok = run(&["verify", &corpus("poly2.alg")]);
    assert_eq!(ok.status.code(), Some(0));
    let text = String::from_utf8(ok.stdout).unwrap();
    for name in ["nakayama_factors", "deg1_transpose", "hdet_one", "scalar_nakayama"] {
        assert!(text.contains(&format!("{name}: pass")), "missing line for {name}:\n{text}");
    }

    // Declaring a map that is an automorphism but not the Nakayama map
    // must be caught by the transpose comparison and gate the exit code.
    let bad = scratch(
        "bad_mu.alg",
        "field Q\ngen x 1\ngen y 1\nrel y*x - x*y\naut mu: x -> 2*x; y -> 1/2*y\ncap internal 8\ncap homological 4\n",
    );
    let out = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("deg1_transpose: FAIL"), "{text}");
    std::fs::remove_file(bad).ok();
}

#[test]
fn malformed_and_missing_inputs_exit_one() {
    let garbled = scratch("garbled.alg", "field Q\ngen x 1\nrel x +\n");
    let out = run(&["analyze", garbled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("error"));
    std::fs::remove_file(garbled).ok();

    let out = run(&["analyze", "/nonexistent/nowhere.alg"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn hdet_on_the_non_gorenstein_control_exits_one() {
    let out = run(&["hdet", &corpus("monomial_xy.alg"), "--aut", "xi:2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("error"));
}

#[test]
fn analyze_on_the_control_reports_the_obstruction_and_exits_zero() {
    let out = run(&["analyze", &corpus("monomial_xy.alg")]);
    assert_eq!(out.status.code(), Some(0), "a skipped battery is not a failure");
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("skipped"));
    assert!(text.contains("socle"));
}

#[test]
fn hdet_of_a_scaling_is_the_announced_power() {
    let out = run(&["hdet", &corpus("poly3.alg"), "--aut", "xi:2"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "hdet(xi:2) = 8\n");

    let out = run(&["hdet", &corpus("qplane2.alg"), "--aut", "xi:1/3"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "hdet(xi:1/3) = 1/9\n");
}

#[test]
fn twist_output_feeds_back_into_the_pipeline() {
    let twisted = std::env::temp_dir().join(format!("extalg_{}_twisted.alg", std::process::id()));
    let out = run(&[
        "twist",
        &corpus("poly2.alg"),
        "--aut",
        "xi:2",
        "--output",
        twisted.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let again = run(&["verify", twisted.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    std::fs::remove_file(twisted).ok();
}

#[test]
fn field_override_is_validated() {
    let out = run(&["analyze", &corpus("qplane2.alg"), "--field", "F7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("F_7"));

    let out = run(&["analyze", &corpus("qplane2.alg"), "--field", "F9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("not prime"));
}

#[test]
fn cap_overrides_reach_the_report() {
    let out = run(&["analyze", &corpus("poly2.alg"), "--cap-internal", "6", "--format", "json"]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed["input"]["cap_internal"], 6);
    assert_eq!(parsed["hilbert_dims"].as_array().unwrap().len(), 7);
}
#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    // Exit code 2 is reserved for failed gating verdicts, so command-line
    // mistakes must land on 1 like any other input error.
    let out = run(&["hdet", &corpus("poly3.alg"), "--aut", "xi:2", "--aut", "xi:3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("--aut"));

    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("Usage"));
}

#[test]
fn a_cap_below_the_relation_degree_is_reported_as_an_input_error() {
    let out = run(&["analyze", &corpus("poly2.alg"), "--cap-internal", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("cap exceeded"), "{err}");
    assert!(!err.contains("internal invariant"), "{err}");
}
