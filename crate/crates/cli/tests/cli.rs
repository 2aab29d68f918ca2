use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diagpoisson")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().expect("exit code")
}

fn bound<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["bounds"].as_array().unwrap().iter().find(|b| b["name"] == name).unwrap()
}

#[test]
fn constant_first_order_bound() {
    let r = json(&["bounds", "--gen", "constant:6:0.3"]);
    let b = bound(&r, "thm1_tv");
    let expected = -(-1.8f64).exp_m1() * 0.3;
    assert!((b["value"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert_eq!(b["holds"], Value::Bool(true));
    assert_eq!(r["matrix_meta"]["n"], 6);
}

#[test]
fn matching_first_order_bound() {
    let r = json(&["bounds", "--gen", "matching:d=2,m=3"]);
    let (d, n) = (2.0f64, 6.0f64);
    let expected = -(-d).exp_m1() * ((3.0 * d - 1.0) / n - (d - 1.0) * (2.0 * d - 1.0) / (n * (n - 1.0)));
    assert!((bound(&r, "thm1_tv")["value"].as_f64().unwrap() - expected).abs() < 1e-12);
    for b in r["bounds"].as_array().unwrap() {
        assert_ne!(b["holds"], Value::Bool(false), "{b}");
    }
}

#[test]
fn constant_pmf_is_binomial() {
    let r = json(&["pmf", "--gen", "constant:5:0.4"]);
    let pmf: Vec<f64> = r["pmf"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let mut binom = 1.0f64;
    for (k, &p) in pmf.iter().enumerate() {
        let expected = binom * 0.4f64.powi(k as i32) * 0.6f64.powi(5 - k as i32);
        assert!((p - expected).abs() < 1e-14, "k = {k}");
        binom = binom * (5 - k) as f64 / (k + 1) as f64;
    }
    assert_eq!(r["real_rooted"], Value::Bool(true));
}

#[test]
fn identical_config_gives_identical_bytes() {
    for args in [
        &["mc", "--gen", "random:6:3", "--samples", "20000", "--seed", "11"][..],
        &["bounds", "--gen", "random:5:2:monotone-cols", "--seed", "4"][..],
        &["moments", "--gen", "identity:4", "--out", "table"][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout);
    }
    let a = run(&["mc", "--gen", "random:6:3", "--samples", "20000", "--seed", "11"]).stdout;
    let b = run(&["mc", "--gen", "random:6:3", "--samples", "20000", "--seed", "12"]).stdout;
    assert_ne!(a, b);
}

#[test]
fn file_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("m.csv");
    std::fs::write(&csv, "1,0.25\n0.75,0.5\n").unwrap();
    let json_path = dir.path().join("m.json");
    std::fs::write(&json_path, r#"{"p": [[1, 0.25], [0.75, 0.5]]}"#).unwrap();
    let a = json(&["moments", "--input", csv.to_str().unwrap()]);
    let b = json(&["moments", "--input", json_path.to_str().unwrap()]);
    assert_eq!(a, b);
    assert!((a["lambda"].as_f64().unwrap() - 1.25).abs() < 1e-15);
    let txt = dir.path().join("m.txt");
    std::fs::write(&txt, r#"{"p": [[1, 0]]}"#).unwrap();
    assert_eq!(code(&["moments", "--input", txt.to_str().unwrap(), "--format", "json"]), 2);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["moments"]), 1);
    assert_eq!(code(&["moments", "--gen", "identity:3", "--input", "x.csv"]), 1);
    assert_eq!(code(&["bounds", "--gen", "identity:3", "--exact-cap", "99"]), 1);
    assert_eq!(code(&["frobnicate"]), 1);
    assert_eq!(code(&["stein"]), 1);
    assert_eq!(code(&["moments", "--gen", "constant:3:1.5"]), 2);
    assert_eq!(code(&["moments", "--gen", "zeros:3"]), 2);
    assert_eq!(code(&["moments", "--input", "/nonexistent/m.csv"]), 2);
    assert_eq!(code(&["mc", "--gen", "identity:3", "--samples", "10"]), 2);
    assert_eq!(code(&["pmf", "--gen", "constant:25:0.1"]), 3);
    assert_eq!(code(&["pmf", "--gen", "constant:8:0.1", "--exact-cap", "6"]), 3);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn stein_and_table_output() {
    let r = json(&["stein", "--t", "3.5"]);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["holds"] == Value::Bool(true)));
    let r = json(&["stein", "--gen", "random:5:1"]);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["holds"] == Value::Bool(true)));
    let out = run(&["bounds", "--gen", "identity:5", "--out", "table"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("thm1_tv") && text.contains("holds"));
    let first_order = format!("{:.11e}", -(-1.0f64).exp_m1() * 0.4);
    assert!(text.contains(&first_order), "{text}");
}

#[test]
fn verify_quick_passes() {
    let out = run(&["verify", "--suite", "quick", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn verify_full_passes() {
    let out = run(&["verify", "--suite", "full", "--seed", "7", "--out", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["all_hold"], Value::Bool(true));
}
