use std::path::PathBuf;
use std::process::Command;

use qconf::cli::{run, EXIT_INPUT, EXIT_OK, EXIT_VERIFY_FAILED};
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qconf").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn machine(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--output", "machine"]);
    let (code, out, err) = invoke(&full);
    assert_eq!(code, EXIT_OK, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn bound_on_worked_example() {
    let v = machine(&["bound", &fixture("worked.json")]);
    assert_eq!(v["command"], "bound");
    let states = v["states"].as_array().unwrap();
    assert_eq!(states.len(), 2);
    assert!((states[0]["bound"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((states[1]["bound"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);
}

#[test]
fn text_and_machine_report_the_same_numbers() {
    let v = machine(&["bound", &fixture("worked.json")]);
    let (code, text, _) = invoke(&["bound", &fixture("worked.json")]);
    assert_eq!(code, EXIT_OK);
    let from_text: Vec<f64> = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix("state "))
        .map(|l| l.split(": ").nth(1).unwrap().parse().unwrap())
        .collect();
    let from_json: Vec<f64> = v["states"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["bound"].as_f64().unwrap())
        .collect();
    assert_eq!(from_text, from_json);
}

#[test]
fn machine_output_round_trips_exactly() {
    let ens = qconf::cli::spec_file::parse_spec(std::path::Path::new(&fixture("trine.json")))
        .unwrap()
        .ensemble;
    let v = machine(&["bound", &fixture("trine.json")]);
    for (j, s) in v["states"].as_array().unwrap().iter().enumerate() {
        let direct = qconf::maxconf::max_confidence(&ens, j).unwrap();
        assert_eq!(s["bound"].as_f64().unwrap().to_bits(), direct.to_bits());
    }
}

#[test]
fn verify_passes_on_fixtures() {
    for f in ["worked.json", "trine.json", "zero_plus.json"] {
        let (code, out, err) = invoke(&["verify", &fixture(f)]);
        assert_eq!(code, EXIT_OK, "{f}: {out}{err}");
        assert!(out.contains("result: PASS"));
    }
}

#[test]
fn verify_fails_below_roundoff() {
    let (code, out, _) = invoke(&["verify", &fixture("trine.json"), "--tolerance", "1e-300"]);
    assert_eq!(code, EXIT_VERIFY_FAILED);
    assert!(out.contains("result: FAIL"));
}

#[test]
fn pom_on_trine_has_no_inconclusive_weight() {
    let v = machine(&["pom", &fixture("trine.json")]);
    assert!(v["inconclusive_probability"].as_f64().unwrap().abs() < 1e-10);
    for s in v["states"].as_array().unwrap() {
        assert!((s["bound"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);
        assert!((s["achieved_confidence"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);
    }
}

#[test]
fn simulate_trine_frequencies() {
    let v = machine(&["simulate", &fixture("trine.json"), "--trials", "1000000", "--seed", "42"]);
    for o in v["outcomes"].as_array().unwrap() {
        let f = o["conditional_frequency"].as_f64().unwrap();
        assert!((f - 2.0 / 3.0).abs() < 0.005, "frequency {f}");
    }
    assert!(v["inconclusive"]["frequency"].as_f64().unwrap() < 0.003);
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", &fixture("worked.json"), "--trials", "200000", "--seed", "7", "--output", "machine"];
    let (c1, a, _) = invoke(&args);
    let (c2, b, _) = invoke(&args);
    assert_eq!((c1, c2), (EXIT_OK, EXIT_OK));
    assert_eq!(a, b);
    let other = invoke(&["simulate", &fixture("worked.json"), "--trials", "200000", "--seed", "8", "--output", "machine"]).1;
    assert_ne!(a, other);
}

#[test]
fn concentrate_worked_example() {
    let v = machine(&["concentrate", &fixture("worked.json")]);
    let after: Vec<f64> = v["schmidt_after"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let d = after.len() as f64;
    assert!(after.iter().all(|l| (l - 1.0 / d).abs() < 1e-9));
    let lmin = v["lambda_min"].as_f64().unwrap();
    assert!((v["success_probability"].as_f64().unwrap() - lmin * d).abs() < 1e-10);
}

#[test]
fn transform_with_projector() {
    let v = machine(&["transform", &fixture("zero_plus.json"), "--kraus", &fixture("project_zero.json")]);
    assert_eq!(v["passed"], true);
    let states = v["states"].as_array().unwrap();
    assert!((states[0]["prior_after"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!((states[1]["prior_after"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(states[0]["full_rank"], false);
}

#[test]
fn bad_priors_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "bad.json",
        r#"{"dimension": 2, "states": [
            {"prior": 0.6, "ket": [[1, 0], [0, 0]]},
            {"prior": 0.5, "ket": [[0, 0], [1, 0]]}]}"#,
    );
    let (code, out, err) = invoke(&["bound", &path]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.contains("priors sum to 1.1"), "{err}");
}

#[test]
fn non_positive_matrix_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "neg.json",
        r#"{"dimension": 2, "states": [
            {"prior": 1.0, "matrix": [[[1.2, 0], [0, 0]], [[0, 0], [-0.2, 0]]]}]}"#,
    );
    let (code, _, err) = invoke(&["bound", &path]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("error:"), "{err}");
}

#[test]
fn unnormalized_ket_warns_and_continues() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(
        &dir,
        "ket.json",
        r#"{"dimension": 2, "states": [
            {"prior": 0.5, "ket": [[2, 0], [0, 0]]},
            {"prior": 0.5, "ket": [[0, 0], [1, 0]]}]}"#,
    );
    let (code, _, err) = invoke(&["bound", &path]);
    assert_eq!(code, EXIT_OK);
    assert!(err.contains("warning"), "{err}");
}

#[test]
fn usage_and_missing_files() {
    assert_eq!(invoke(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(invoke(&["bound", "/nonexistent/spec.json"]).0, EXIT_INPUT);
    assert_eq!(invoke(&["simulate", &fixture("trine.json"), "--trials", "0"]).0, EXIT_INPUT);
    let (code, out, _) = invoke(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("verify"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_qconf");
    let ok = Command::new(bin).args(["bound", &fixture("worked.json")]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("state 1"));
    let bad = Command::new(bin).args(["bound", "/nonexistent/spec.json"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_INPUT));
    assert!(bad.stdout.is_empty());
    assert!(!bad.stderr.is_empty());
}
