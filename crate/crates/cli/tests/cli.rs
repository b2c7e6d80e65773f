use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nccause(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nccause")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = nccause(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn correlation_table_defaults() {
    let v = json(&["correlations"]);
    let rows = v["correlations"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let expected = [-0.25 * FRAC_1_SQRT_2, -0.25 * FRAC_1_SQRT_2, -0.25 * FRAC_1_SQRT_2, 0.25 * FRAC_1_SQRT_2];
    for (row, e) in rows.iter().zip(expected) {
        assert!((f(&row["correlation"]) - e).abs() < 1e-12);
        assert!((f(&row["closed_form"]) - e).abs() < 1e-15);
        assert!(f(&row["abs_diff"]) < 1e-12);
    }
}

#[test]
fn correlations_vanish_for_tracial_state() {
    let v = json(&["correlations", "--lambda", "0"]);
    for row in v["correlations"].as_array().unwrap() {
        assert!(f(&row["correlation"]).abs() < 1e-15);
    }
}

#[test]
fn bell_values() {
    let v = json(&["bell"]);
    assert!((f(&v["ch"]["value"]) + 1.2071067811865475).abs() < 1e-12);
    assert!((f(&v["chsh"]["value"]) + 2.8284271247461903).abs() < 1e-12);
    assert_eq!(v["violated"], true);
    let boundary = json(&["bell", "--lambda", "0.70710678"]);
    assert!((f(&boundary["ch"]["value"]) + 1.0).abs() < 1e-6);
    let tracial = json(&["bell", "--lambda", "0"]);
    assert!((f(&tracial["ch"]["value"]) + 0.5).abs() < 1e-15);
    assert!(f(&tracial["chsh"]["value"]).abs() < 1e-15);
    assert_eq!(tracial["violated"], false);
}

#[test]
fn bell_with_other_dynamics() {
    let v = json(&["bell", "--theta1", "-0.4", "--theta2", "0.9", "--eta1", "-1", "--eta2", "-1"]);
    assert!(f(&v["ch"]["abs_diff"]) < 1e-12);
    assert!(f(&v["chsh"]["abs_diff"]) < 1e-12);
}

#[test]
fn sweep_csv_shape() {
    let out = nccause(&["sweep-lambda"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "lambda");
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 101);
    for r in &rows {
        let ch: f64 = r[1].parse().unwrap();
        let chsh: f64 = r[4].parse().unwrap();
        assert_eq!(ch < -1.0, chsh < -2.0);
        assert_eq!(&r[7] == "true", ch < -1.0);
    }
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    full.extend(["--out", &p]);
    let out = nccause(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(path).unwrap()
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    for (k, args) in
        [&["search"][..], &["sweep-lambda", "--grid", "11"], &["verify", "oracle"], &["correlations", "--format", "csv"]].iter().enumerate()
    {
        let first = run_to_file(dir.path(), &format!("a{k}"), args);
        let second = run_to_file(dir.path(), &format!("b{k}"), args);
        assert!(!first.is_empty());
        assert_eq!(first, second, "{args:?}");
    }
}

#[test]
fn search_defaults() {
    let v = json(&["search"]);
    let spacing = f(&v["grid_spacing"]);
    let hits = v["hits"].as_array().unwrap();
    assert!(!hits.is_empty());
    assert_eq!(v["oc_in_common_past"], true);
    for h in hits {
        assert!(f(&h["c"][1]).abs() <= spacing);
        assert_eq!(h["localized_in_oc"], true);
        let max_norm = h["commutator_norms"].as_object().unwrap().values().map(f).fold(0.0, f64::max);
        assert!(max_norm > 0.1);
    }
}

#[test]
fn search_full_grid_for_tracial_state() {
    let v = json(&["search", "--lambda", "0", "--grid", "10"]);
    assert_eq!(v["count"], 100);
}

#[test]
fn search_a3b3_preset_matches_constraint() {
    let n = 40usize;
    let tol = 0.05;
    let v = json(&["search", "--a3b3-nonzero", "--grid", "40", "--tol", "0.05"]);
    // residual formula at lambda = 1: -(1 - c3^2), trace form is a quarter of that
    let allowed = (0..n).filter(|&k| {
        let z = 1.0 - 2.0 * (k as f64 + 0.5) / n as f64;
        (1.0 - z * z) / 4.0 < tol
    });
    let expected: Vec<(u64, u64)> = allowed.flat_map(|k| (0..n).map(move |j| (k as u64, j as u64))).collect();
    let got: Vec<(u64, u64)> =
        v["hits"].as_array().unwrap().iter().map(|h| (h["c_index"].as_u64().unwrap(), h["c_tilde_index"].as_u64().unwrap())).collect();
    assert!(!expected.is_empty());
    assert_eq!(got, expected);
    assert_eq!(json(&["search", "--a3b3-nonzero"])["count"], 0);
}

#[test]
fn verify_exit_codes() {
    for which in ["prop1", "prop2", "dynamics", "oracle", "dimensions", "primitive-causality"] {
        let out = nccause(&["verify", which]);
        assert_eq!(out.status.code(), Some(0), "{which}");
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report["pass"], true);
    }
    // the candidate family is tuned to the special bond dynamics
    assert_eq!(nccause(&["verify", "prop1", "--theta2", "0.5"]).status.code(), Some(1));
}

#[test]
fn config_errors_exit_2() {
    for args in [
        &["bell", "--lambda", "1.5"][..],
        &["bell", "--eta1", "0"],
        &["bell", "--theta2", "3"],
        &["bell", "--window", "0:2"],
        &["bell", "--window", "x"],
        &["bell", "--format", "csv"],
        &["bell", "--tol", "0"],
        &["search", "--grid", "1"],
        &["bell", "--scenario", "/nonexistent.json"],
        &["unknown"],
    ] {
        assert_eq!(nccause(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn scenario_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    std::fs::write(
        &path,
        r#"{"a":[[0,0,1],[1,0,0]],"b":[[0,0,1],[0,1,0]],"lambda":0.5,"dynamics":{"theta1":0.2,"theta2":0.3,"eta1":1,"eta2":-1}}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["correlations", "--scenario", p]);
    assert_eq!(v["scenario"]["lambda"], 0.5);
    assert!((f(&v["correlations"][0]["correlation"]) + 0.125).abs() < 1e-12);
    let overridden = json(&["correlations", "--scenario", p, "--lambda", "1"]);
    assert!((f(&overridden["correlations"][0]["correlation"]) + 0.25).abs() < 1e-12);
    assert_eq!(overridden["scenario"]["dynamics"]["eta2"], -1);
    std::fs::write(
        &path,
        r#"{"a":[[0,0,2],[1,0,0]],"b":[[0,0,1],[0,1,0]],"lambda":0.5,"dynamics":{"theta1":0,"theta2":0,"eta1":1,"eta2":1}}"#,
    )
    .unwrap();
    assert_eq!(nccause(&["bell", "--scenario", p]).status.code(), Some(2));
}
