use std::path::Path;
use std::process::{Command, Output};

fn lqdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lqdlab"))
        .args(args)
        .env_remove("LQDLAB_N")
        .output()
        .expect("failed to run lqdlab")
}

fn build(dir: &Path, spec: &str, extra: &[&str]) -> Output {
    let spec_path = dir.join("spec.json");
    std::fs::write(&spec_path, spec).unwrap();
    let out = dir.join("out");
    let mut args = vec!["build", "--spec", spec_path.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    lqdlab(&args)
}

#[test]
fn build_null_disk() {
    let dir = tempfile::tempdir().unwrap();
    let o = build(dir.path(), r#"{"kind": "null_disk", "r": 1.5}"#, &["--n", "512"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    let quad = report.as_array().unwrap().iter().find(|r| r["check"] == "quadrature").unwrap();
    assert!(quad["residual"].as_f64().unwrap() < 1e-8);
    let csv = std::fs::read_to_string(out.join("boundary.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,re,im"));
    assert!(csv.lines().count() > 512);

    // the saved instance verifies again
    let inst = out.join("instance.json");
    let o = lqdlab(&["verify", "--instance", inst.to_str().unwrap(), "--n", "512"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().all(|r| r["pass"] == true));
}

#[test]
fn build_out_of_range_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = build(dir.path(), r#"{"kind": "onept_bounded_nonsingular", "w0": [0.25, 0], "alpha": [12, 0]}"#, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("out of range"));
}

#[test]
fn build_two_point_logs_solution() {
    let dir = tempfile::tempdir().unwrap();
    let o = build(dir.path(), r#"{"kind": "twopoint_symmetric", "q": [0, 0], "alpha": [0.5, 0]}"#, &[]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("z+ = 0.5998"));
}

#[test]
fn tight_tolerance_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let o = build(dir.path(), r#"{"kind": "constant", "alpha": [1, 0], "c": 0.5, "z0": [-2, 0]}"#, &["--tol", "1e-15"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sample_count_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let o = build(dir.path(), r#"{"kind": "null_disk", "r": 1}"#, &["--n", "300"]);
    assert_eq!(o.status.code(), Some(2));
    let spec = dir.path().join("spec.json");
    let o = Command::new(env!("CARGO_BIN_EXE_lqdlab"))
        .args(["build", "--spec", spec.to_str().unwrap(), "--out", dir.path().join("o2").to_str().unwrap()])
        .env("LQDLAB_N", "128")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn lambda_max_at_origin() {
    let o = lqdlab(&["lambda-max", "--z0", "0,0", "--arg", "-0.4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["lambda_max"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let o = lqdlab(&["lambda-max", "--z0", "1.5,0", "--arg", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn figure_five_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = lqdlab(&["figure", "--id", "fig5", "--out", out, "--n", "512"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for j in 0..8 {
        assert!(dir.path().join(format!("fig5_alpha_{j:02}.csv")).exists());
    }
    let svg = std::fs::read_to_string(dir.path().join("fig5.svg")).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 8);
    let s: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("fig5_summary.json")).unwrap()).unwrap();
    assert_eq!(s["pass"], true);
    assert_eq!(s["steps"].as_array().unwrap().len(), 8);
}

#[test]
fn unknown_figure_is_rejected() {
    let o = lqdlab(&["figure", "--id", "fig9", "--out", "x"]);
    assert_eq!(o.status.code(), Some(2));
}
