//! Black-box tests of the `twistlab` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn twistlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistlab")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = twistlab(&all);
    (serde_json::from_slice(&out.stdout).expect("valid JSON on stdout"), out.status.code().unwrap())
}

#[test]
fn parity_check_examples() {
    // All-even columns qualify on every factor.
    let out = twistlab(&["parity-check", "--n", "1,1,1", "--d", "2,2,2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("[0, 1, 2]"), "{}", stdout(&out));
    let (v, code) = json(&["parity-check", "--n", "2,1", "--d", "3,2"]);
    assert_eq!(code, 0);
    assert_eq!(v["feasible"], serde_json::json!([0, 1]));
    let (v, _) = json(&["parity-check", "--n", "1,1", "--d", "3,3"]);
    assert_eq!(v["feasible"], serde_json::json!([]));
}

#[test]
fn spin_class_of_generator_commutator_and_constant_loop() {
    let (v, code) = json(&["spin-class", "--generator-commutator", "--n", "3", "--grid", "2048"]);
    assert_eq!(code, 0);
    assert_eq!(v["class"], -1);
    let (v, _) = json(&["spin-class", "--constant", "--n", "5"]);
    assert_eq!(v["class"], 1);
}

#[test]
fn spin_class_from_loop_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("loop.json");
    // A full turn about the z axis, the generator of π₁(SO(3)).
    let samples: Vec<Vec<Vec<f64>>> = (0..=64)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
            let (s, c) = t.sin_cos();
            vec![vec![c, -s, 0.0], vec![s, c, 0.0], vec![0.0, 0.0, 1.0]]
        })
        .collect();
    std::fs::write(&path, serde_json::to_string(&samples).unwrap()).unwrap();
    let (v, code) = json(&["spin-class", "--loop-file", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["class"], -1);
}

#[test]
fn path_synth_identity_and_canonical() {
    let out = twistlab(&["path-synth", "--identity", "--n", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("constant paths: true"));
    let (v, code) = json(&["path-synth", "--canonical", "--nu", "1", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["nu"], 1);
    assert!(v["endpoint_error"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn verify_family_exit_codes() {
    let pass = twistlab(&["verify-family", "--family", "Xd", "--params", "4,3", "--samples", "200"]);
    assert_eq!(pass.status.code(), Some(0));
    assert!(stdout(&pass).contains("verdict: pass"));
    let fail = twistlab(&["verify-family", "--poly", "z0*z1 + z2^2", "--dims", "3", "--samples", "50"]);
    assert_eq!(fail.status.code(), Some(1));
    let error = twistlab(&["verify-family", "--family", "Xd", "--params", "0,3"]);
    assert_eq!(error.status.code(), Some(2));
}

#[test]
fn verify_family_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, r#"{"family": {"name": "Xd", "d": 2, "n": 3}, "n_samples": 100, "seed": 5}"#).unwrap();
    let (v, code) = json(&["verify-family", "--config", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["config"]["seed"], 5);
}

#[test]
fn json_output_is_deterministic_and_mirrored_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let args = ["verify-family", "--family", "Xd", "--params", "4,3", "--samples", "300", "--seed", "7", "--json"];
    let first = twistlab(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", out_path.to_str().unwrap()]);
    let second = twistlab(&with_out);
    assert_eq!(first.stdout, second.stdout);
    let written = std::fs::read(&out_path).unwrap();
    assert_eq!(written, first.stdout);
}

#[test]
fn scan_smoothness_flags_singular_systems() {
    let (v, code) = json(&["scan-smoothness", "--poly", "z0*z1", "--dims", "3", "--samples", "100"]);
    assert_eq!(code, 1);
    assert_eq!(v["singular_detected"], true);
    let (v, code) = json(&["scan-smoothness", "--family", "Xd", "--params", "4,3", "--samples", "200"]);
    assert_eq!(code, 0);
    assert_eq!(v["singular_detected"], false);
}

#[test]
fn twist_demo_reports_nontrivial_class() {
    let out = twistlab(&["twist-demo", "--n", "3", "--show", "3"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("class: -1"), "{}", stdout(&out));
}

#[test]
fn usage_errors_exit_nonzero() {
    for args in [
        vec!["bogus"],
        vec!["parity-check", "--n", "1,1"],
        vec!["spin-class", "--constant", "--generator-commutator"],
        vec!["parity-check", "--n", "1,1", "--d", "2,x"],
    ] {
        let out = twistlab(&args);
        assert!(!out.status.success(), "{args:?} succeeded");
        assert!(!out.stderr.is_empty());
    }
    // A malformed system is a stage error inside the report, exit code 2.
    let (v, code) = json(&["verify-family", "--poly", "z0^2 +", "--dims", "3"]);
    assert_eq!(code, 2);
    assert_eq!(v["verdict"], "error");
}
