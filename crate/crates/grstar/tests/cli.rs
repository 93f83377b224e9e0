//! End-to-end tests of the `grstar` binary: output schemas, exit codes and
//! environment overrides.

use std::process::Command;

fn grstar() -> Command {
    Command::new(env!("CARGO_BIN_EXE_grstar"))
}

#[test]
fn eval_intro_identity_json() {
    let out = grstar()
        .args(["--letters", "3", "eval", "X1.X2.X3 * X3.X2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["l"], 3);
    assert_eq!(v["delta"], "3");
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 3);
    let words: Vec<Vec<u64>> = terms
        .iter()
        .map(|t| {
            t["word"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_u64().unwrap())
                .collect()
        })
        .collect();
    assert!(words.contains(&vec![1]));
    assert!(words.contains(&vec![1, 2, 2]));
    assert!(words.contains(&vec![1, 2, 3, 3, 2]));
}

#[test]
fn trace_and_inner_are_exact() {
    let out = grstar().args(["trace", "X1*X1*X1*X1"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"]["q"], "2");
    let out = grstar().args(["inner", "cup", "cup"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"]["q"], "2");
    // ⟨∪•b, b•∪⟩ = 1
    let out = grstar().args(["inner", "cup.X1", "X1.cup"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"]["q"], "1");
}

#[test]
fn moments_table_csv() {
    let out = grstar()
        .args(["moments", "--letter", "1", "--upto", "8", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines[0], "n,trace,catalan,matches");
    assert_eq!(lines.len(), 10);
    let traces: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(traces, ["1", "0", "1", "0", "2", "0", "5", "0", "14"]);
}

#[test]
fn gram_reports_identity() {
    let out = grstar()
        .args(["gram", "--basis", "eb", "--degree-cap", "7"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["is_identity"], true);
    assert_eq!(v["basis"], "eb");
}

#[test]
fn spectral_csv_schema() {
    let out = grstar()
        .args([
            "--t", "0,1", "--truncation", "250,500", "--format", "csv", "spectral",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(
        lines[0],
        "t,delta,n,min_eig,max_eig,max_atom_weight,moment_err,h_margin"
    );
    assert_eq!(lines.len(), 1 + 4);
    for row in &lines[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols.len(), 8);
        for v in &cols[3..] {
            let x: f64 = v.parse().unwrap();
            assert!(x.is_finite());
        }
        let min_eig: f64 = cols[3].parse().unwrap();
        let max_eig: f64 = cols[4].parse().unwrap();
        assert!(min_eig >= -2.0 - 1e-9 && max_eig <= 2.0 + 1e-9);
    }
}

#[test]
fn tangle_eval_job_file() {
    let dir = std::env::temp_dir();
    // closed loop with no inputs: evaluates to δ times the unit
    let path = dir.join("grstar-test-loop.json");
    std::fs::write(
        &path,
        r#"{"tangle": {"outer": {"points": 0, "star": 0}, "inner": [], "strands": [], "loops": 1}}"#,
    )
    .unwrap();
    let out = grstar()
        .args(["--delta", "7/2", "tangle", "eval"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["delta"], "7/2");
    assert_eq!(v["terms"][0]["coeff"]["q"], "7/2");
    assert_eq!(v["terms"][0]["word"].as_array().unwrap().len(), 0);

    // a cap applied to an explicit element
    let path2 = dir.join("grstar-test-cap.json");
    std::fs::write(
        &path2,
        r#"{
          "tangle": {"outer": {"points": 0, "star": 0},
                     "inner": [{"points": 2, "star": 0}],
                     "strands": [[[1, 0], [1, 1]]], "loops": 0},
          "inputs": [{"l": 2, "delta": "2", "terms": [
            {"word": [1, 1], "coeff": {"q": "1", "sqrt_delta": "0", "sqrt_d2m1": "0", "sqrt_prod": "0"}},
            {"word": [1, 2], "coeff": {"q": "5", "sqrt_delta": "0", "sqrt_d2m1": "0", "sqrt_prod": "0"}}
          ]}]
        }"#,
    )
    .unwrap();
    let out = grstar().args(["tangle", "eval"]).arg(&path2).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // cap keeps only the matching pair X1X1
    assert_eq!(v["terms"][0]["coeff"]["q"], "1");
    assert_eq!(v["terms"].as_array().unwrap().len(), 1);
}

#[test]
fn tower_wedge_example() {
    // (1|X₁|1)∧(1|X₁|1) = (1|X₁X₁|1) + (1|∅|1)
    let out = grstar()
        .args(["tower", "--k", "1", "wedge", "X1.X1.X1", "X1.X1.X1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let terms = v["product"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[0]["word"].as_array().unwrap().len(), 2);
    assert_eq!(terms[1]["word"].as_array().unwrap().len(), 4);
}

#[test]
fn usage_errors_exit_2() {
    // δ override is rejected for the polynomial algebra
    let out = grstar().args(["--delta", "3", "trace", "X1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // parse error with a position
    let out = grstar().args(["eval", "X1 *"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parse error"));
    // letter out of range
    let out = grstar().args(["eval", "X5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // unknown suite is a clap-level usage error
    let out = grstar().args(["verify", "--suite", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_tangle_suite_passes_deterministically() {
    let out = grstar()
        .args(["verify", "--suite", "tangle", "--seed", "42"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut names = Vec::new();
    for line in text.trim().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true);
        names.push(v["check"].as_str().unwrap().to_string());
    }
    assert!(names.contains(&"star-cross-validation".to_string()));
    // same seed, same report
    let out2 = grstar()
        .args(["verify", "--suite", "tangle", "--seed", "42"])
        .output()
        .unwrap();
    assert_eq!(out.stdout, out2.stdout);
}

#[test]
fn env_overrides_apply() {
    let out = grstar()
        .env("GRSTAR_LETTERS", "3")
        .args(["eval", "X3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["l"], 3);
    let out = grstar()
        .env("GRSTAR_FORMAT", "csv")
        .args(["eval", "X1"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("word,q,"));
}
