//! End-to-end tests through the `run` entry point: outputs, JSON documents,
//! and exit codes.

use modcurve_cli::{run, EXIT_FAIL, EXIT_OK, EXIT_USAGE};

fn invoke(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn count_witness_at_level_nine() {
    let (code, out, _) = invoke(&[
        "count", "--level", "9", "--H", "borel", "--R", "gens:1,3;0,4",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "6\n");
}

#[test]
fn count_with_explicit_automorphism_image() {
    // A = {+-I} via the slow double-coset path agrees with the fast path.
    let (code, out, _) = invoke(&[
        "count", "--level", "9", "--H", "borel", "--R", "gens:1,3;0,4", "--A", "gens:-1,0;0,-1",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "6\n");
}

#[test]
fn cm_small_level_over_q() {
    let (code, out, _) = invoke(&[
        "cm", "--dK", "-7", "--f", "1", "--level", "3", "--H", "gl2", "--field", "q",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "1\n");
}

#[test]
fn enumerate_split_cartan() {
    let (code, out, _) = invoke(&["enumerate", "--H", "split", "--p", "3", "--k", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "{0, 2, 12}\n");
}

#[test]
fn degree_of_identity_basis() {
    let (code, out, _) = invoke(&[
        "degree", "--level", "7", "--H", "borel", "--R", "gens:1,1;0,1", "--g", "1,0;0,1",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "1\n");
}

#[test]
fn json_documents_round_trip_byte_identical() {
    for args in [
        vec!["count", "--level", "9", "--H", "borel", "--R", "gens:1,3;0,4", "--json"],
        vec!["enumerate", "--H", "split", "--p", "3", "--k", "1", "--json"],
        vec!["verify", "--suite", "borel", "--p", "2", "--k", "1", "--json"],
        vec!["cm", "--dK", "-7", "--f", "1", "--level", "3", "--H", "gl2", "--field", "q", "--json"],
    ] {
        let (code, out, _) = invoke(&args);
        assert_eq!(code, EXIT_OK, "{args:?}");
        let parsed: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        let rendered = format!("{parsed}\n");
        assert_eq!(out, rendered, "round trip must be byte-identical: {args:?}");
        for key in ["command", "inputs", "result", "method", "elapsed_ms"] {
            assert!(parsed.get(key).is_some(), "missing {key} in {args:?}");
        }
    }
}

#[test]
fn json_count_reports_method() {
    let (_, out, _) = invoke(&[
        "count", "--level", "9", "--H", "borel", "--R", "gens:1,3;0,4", "--json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["result"], serde_json::json!(6));
    assert_eq!(doc["method"], serde_json::json!("fast-coset"));
    let (_, out, _) = invoke(&[
        "count", "--level", "9", "--H", "borel", "--R", "gens:1,3;0,4", "--A",
        "gens:-1,0;0,-1", "--json",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["method"], serde_json::json!("double-coset"));
}

#[test]
fn verify_passing_suite_exits_zero() {
    let (code, out, _) = invoke(&["verify", "--suite", "borel", "--p", "2", "--k", "1"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("PASS borel"));
    assert!(out.contains("{0, 1, 3}"));
}

#[test]
fn verify_failing_suite_exits_one_with_both_sets() {
    // The displayed split-normalizer set at p = 3 is refuted by exhaustive
    // enumeration, so this suite fails and must carry both sets verbatim.
    let (code, out, err) = invoke(&["verify", "--suite", "cartan", "--family", "s+", "--p", "3", "--k", "1"]);
    assert_eq!(code, EXIT_FAIL);
    assert!(out.contains("FAIL"));
    assert!(out.contains("{0, 1, 2, 6}"));
    assert!(out.contains("{0, 2, 6}"));
    assert!(err.contains("verification failed"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec![],
        vec!["frobnicate"],
        vec!["count", "--level", "9", "--H", "borel"],
        vec!["count", "--level", "x", "--H", "borel", "--R", "borel"],
        vec!["count", "--level", "9", "--H", "wat", "--R", "borel"],
        vec!["count", "--level", "9", "--H", "borel", "--R", "gens:1,2;0"],
        vec!["verify", "--suite", "nope"],
        vec!["cm", "--dK", "-5", "--f", "1", "--level", "5", "--H", "borel", "--field", "cm"],
        vec!["enumerate", "--H", "split", "--level", "12"],
    ] {
        let (code, _, err) = invoke(&args);
        assert_eq!(code, EXIT_USAGE, "{args:?} -> {err}");
        assert!(err.contains("error"), "{args:?}");
    }
}

#[test]
fn budget_exceeded_reports_the_budget() {
    let (code, _, err) = invoke(&[
        "enumerate", "--H", "borel", "--level", "9", "--subgroup-budget", "10",
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("budget of 10"), "{err}");
}

#[test]
fn worker_flag_never_changes_results() {
    let mut outputs = Vec::new();
    for workers in ["1", "2", "5"] {
        let (code, out, _) = invoke(&[
            "count", "--level", "9", "--H", "borel", "--R", "gens:1,3;0,4", "--workers", workers,
        ]);
        assert_eq!(code, EXIT_OK);
        outputs.push(out);
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn help_prints_usage() {
    let (code, out, _) = invoke(&["help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("USAGE"));
    assert!(out.contains("gens:"));
}
