use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const SMALL_EMPTY: &str = r#"{
    "experiment": "thm-empty",
    "horizons": {"n_set": 20000, "n_range": [1, 300], "witness_bound": 100000, "span_order": 1, "span_bound": 2}
}"#;

#[test]
fn validate_reports_named_constraints() {
    let dir = tempfile::tempdir().unwrap();
    let out = rlab(&["validate", &write_config(dir.path(), SMALL_EMPTY)]);
    assert_eq!(out.status.code(), Some(0));
    let rep = stdout_json(&out);
    let names: Vec<&str> = rep["constraints"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"1+|lambda| < L*||xi||"));

    let bad = r#"{"experiment": "thm-main", "constants": {"delta": "1/10"}}"#;
    let out = rlab(&["validate", &write_config(dir.path(), bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["violated"], "delta < 1/20");
}

#[test]
fn run_writes_report_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_EMPTY);
    let report = dir.path().join("report.json");
    let dumps = dir.path().join("dump");
    let out = rlab(&[
        "run",
        "thm-empty",
        "--config",
        &cfg,
        "--nrange",
        "1:200",
        "--out",
        report.to_str().unwrap(),
        "--dump-dir",
        dumps.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["verdict"], "pass");
    assert_eq!(rep["params"]["horizons"]["n_range"], serde_json::json!([1, 200]));
    assert!(std::fs::read_dir(&dumps).unwrap().count() > 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("certificate"));
}

#[test]
fn run_rejects_mismatched_config_and_bad_constants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_EMPTY);
    assert_eq!(rlab(&["run", "thm-main", "--config", &cfg]).status.code(), Some(3));
    let bad = write_config(
        dir.path(),
        r#"{"experiment": "thm-empty", "constants": {"L": "5", "beta": "1/5"}}"#,
    );
    let out = rlab(&["run", "thm-empty", "--config", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("L*||xi||"));
}

#[test]
fn cert_subcommands() {
    let out = rlab(&["cert", "nonthick", "--gamma", "sqrt(3)/4096", "--eta", "15/64"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["h"], 1109);

    let out = rlab(&["cert", "empty", "--range", "1:500"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["status"], "VALID");
    let out = rlab(&["cert", "empty", "--L", "5", "--range", "1:500"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["status"], "INVALID");

    let out = rlab(&["cert", "thick-interval", "--c", "1/100", "--eta", "3/10", "--H", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["interval"]["length"], 11);
}

#[test]
fn span_subcommands() {
    let out = rlab(&["span", "classify", "--family", "f", "--order", "2", "--bound", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let out = rlab(&["span", "shadow", "--family", "h"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["description"], "{c*(t^2) : c in Z, c != 0}");
    let out = rlab(&["span", "intersective", "--poly", "0,0,1", "--max-modulus", "20"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bohr_and_weyl_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("e.csv");
    let spec = [
        "--freq",
        "1/6",
        "--freq",
        "0-sqrt(2)/6",
        "--radius",
        "1/512",
        "--radius",
        "1/512",
        "--independent",
    ];
    let mut args = vec!["bohr", "enum"];
    args.extend(spec);
    args.extend(["--n", "20000", "--out", csv.to_str().unwrap()]);
    assert_eq!(rlab(&args).status.code(), Some(0));
    assert!(std::fs::read_to_string(&csv).unwrap().lines().count() > 1);

    let mut args = vec!["bohr", "density"];
    args.extend(spec);
    args.extend(["--n", "20000"]);
    let out = rlab(&args);
    assert_eq!(stdout_json(&out)["theoretical"], "1/1536");

    let out = rlab(&["weyl", "--n", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["rigorous"], false);
}

#[test]
fn usage_errors_exit_nonzero() {
    assert_eq!(
        rlab(&["cert", "nonthick", "--gamma", "sqrt(", "--eta", "1/8"])
            .status
            .code(),
        Some(3)
    );
    assert!(!rlab(&["frobnicate"]).status.success());
}
