use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kzassoc"))
        .args(args)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn mzv_reports_both_routes() {
    let v = json(&["mzv", "--word", "1,0"]);
    let r = &v["result"];
    assert_eq!(r["composition"], serde_json::json!([2]));
    assert_eq!(r["sign"], -1);
    let q = r["quadrature"]["value"].as_f64().unwrap();
    assert!((q + std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-10);
    assert!(r["difference"].as_f64().unwrap() < 1e-10);

    let v = json(&["mzv", "--word", "1,1,0"]);
    let q = v["result"]["quadrature"]["value"].as_f64().unwrap();
    assert!((q - 1.202_056_903_159_594).abs() < 1e-9);
}

#[test]
fn non_admissible_word_is_a_usage_error() {
    let out = run(&["mzv", "--word", "0,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("a_1 must be 1"));
}

#[test]
fn phi_expand_symbolic() {
    let v = json(&["phi", "expand", "--degree", "2", "--mode", "symbolic"]);
    let terms = v["result"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 3);
    let x0x1 = terms
        .iter()
        .find(|t| t["word"] == serde_json::json!([0, 1]))
        .unwrap();
    assert_eq!(x0x1["symbols"][0]["seq"], "1,0");
    assert_eq!(x0x1["symbols"][0]["num"], "1");

    let v = json(&["phi", "expand", "--degree", "0"]);
    let terms = v["result"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["word"], serde_json::json!([]));
}

#[test]
fn phi_log_in_low_degree() {
    let v = json(&["phi", "log", "--degree", "1"]);
    assert!(v["result"]["terms"].as_array().unwrap().is_empty());
    let v = json(&["phi", "log", "--degree", "2", "--mode", "numeric"]);
    let terms = v["result"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
}

#[test]
fn cbh_word() {
    let v = json(&["cbh", "--word", "0,1"]);
    assert!(!v["result"].is_null());
}

#[test]
fn verify_is_deterministic() {
    let a = run(&["verify", "witt"]);
    let b = run(&["verify", "witt"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["status"], "pass");

    let out = run(&["verify", "prop1", "--degree", "5", "--seed", "7"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn pretty_report_is_a_table() {
    let out = run(&["verify", "witt", "--pretty"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("witt/alphabet-2"));
}

#[test]
fn usage_errors() {
    for args in [
        &["--degree", "9", "phi", "expand"][..],
        &["verify", "nope"],
        &["phi", "expand", "--tol", "0"],
        &["holonomy", "compare", "--case", "spiral"],
        &["bogus"],
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn out_flag_writes_the_document() {
    let path = std::env::temp_dir().join(format!("kzassoc-cli-{}.json", std::process::id()));
    let out = run(&[
        "phi",
        "expand",
        "--degree",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "phi expand");
    std::fs::remove_file(path).unwrap();
}
