use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diffiety"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .expect("binary runs")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn model(dir: &tempfile::TempDir, text: &str) -> String {
    let p = dir.path().join("m.model");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn standard_basis_matches_golden() {
    let out = run(&["--model", "tests/golden/ode2_u0v1.model", "standard-basis"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("standard_basis_u0v1.txt"));
}

#[test]
fn kdv_matches_golden() {
    let out = run(&["kdv", "--levels", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden("kdv_levels2.txt"));
}

#[test]
fn json_output_is_valid() {
    let out = run(&["--format", "json", "kdv", "--levels", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "kdv");
    assert_eq!(v["ok"], true);
    let q1 = v["results"].as_array().unwrap().iter().find(|r| r["name"] == "Q1").unwrap();
    assert_eq!(q1["value"]["text"], "-1/4*q3-3/2*q0*q1");
}

#[test]
fn latex_output_uses_greek_names() {
    let out = run(&["--model", "tests/golden/ode2_u0v1.model", "--format", "latex", "standard-basis"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("\\pi_{0} = "), "{s}");
    assert!(s.contains("\\Delta = "), "{s}");
}

#[test]
fn parse_error_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let m = model(&dir, "model ode2;\nF = u0*(v1;\n");
    let out = run(&["--model", &m, "standard-basis"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("2:"), "{err}");
}

#[test]
fn missing_model_is_a_usage_error() {
    assert_eq!(run(&["standard-basis"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
}

#[test]
fn failing_check_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let m = model(&dir, "model jets 1 1;\nzx1 = 0;\nzw1 = w[1][11];\n");
    let out = run(&["--model", &m, "check-point"]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn determining_reports_candidate() {
    let out = run(&["--model", "tests/golden/ode2_u0v1.model", "determining", "--p", "u0^2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn bracket_of_square() {
    let dir = tempfile::tempdir().unwrap();
    let m = model(&dir, "model jets 1 1;\n");
    let out = run(&["--model", &m, "bracket", "--F", "w[1]^2", "--G", "w[1]", "--f", "w[1]"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("-w[1]^2"));
}

#[test]
fn help_succeeds() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("standard-basis"));
}
