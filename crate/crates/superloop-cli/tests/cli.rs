//! End-to-end checks of the CLI surface: subcommands, exit codes, JSON
//! round-trip stability.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superloop"))
}

fn write_temp(name: &str, contents: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("superloop-cli-test-{name}"));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn moments_two() {
    let out = bin().args(["moments", "--valencies", "2"]).output().unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // ħ^{−2}(p₂ + p₀²)
    let terms = doc["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    for t in terms {
        assert_eq!(t["hbar_exp"], -2);
        assert_eq!(t["count"], 1);
    }
    let faces: Vec<_> = terms.iter().map(|t| t["faces"].clone()).collect();
    assert!(faces.contains(&serde_json::json!([0, 0])));
    assert!(faces.contains(&serde_json::json!([2])));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_json_is_usage_error() {
    let path = write_temp("bad.json", "{not json");
    let out = bin()
        .args(["curve", "--spec", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn curve_gaussian_roundtrip() {
    let path = write_temp(
        "gauss.json",
        r#"{"hbar": 0.5, "sources": [], "fields": [{"y": [0.0, 0.0], "b": 2}]}"#,
    );
    let out = bin()
        .args(["curve", "--spec", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["residues"]["pass"], true);
    assert_eq!(doc["eext"]["x_degree"], 1);
    assert_eq!(doc["eext"]["y_degree"], 2);
    let bps = doc["branch_points"].as_array().unwrap();
    assert_eq!(bps.len(), 2);
    // byte-stable round-trip of the spec block
    let spec_text = serde_json::to_string(&doc["spec"]).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&spec_text).unwrap();
    assert_eq!(serde_json::to_string(&reparsed).unwrap(), spec_text);
}

#[test]
fn oracle_partition_series_roundtrip() {
    let out = bin()
        .args([
            "oracle",
            "--inline",
            r#"{"kind":"partition","grading":[1,0],"source_signs":[1],"y":[["3/2","0"]],"hbar":["1/2","0"],"truncation":4}"#,
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    // Z_{(1|0),(1|0)}(x, 3/2) = x − 3/2: prefactor x¹, coefficient −3/2 at (u¹, τ¹)
    assert_eq!(doc["prefactor_exponents"], serde_json::json!([1]));
    // emitted JSON re-parses into the same value and re-serializes identically
    let series: superloop::partition::FormalSeries = serde_json::from_value(doc.clone()).unwrap();
    let re = serde_json::to_value(&series).unwrap();
    assert_eq!(serde_json::to_string(&re).unwrap(), serde_json::to_string(&doc).unwrap());
}

#[test]
fn duality_pass_and_fail_exit_codes() {
    let path = write_temp(
        "dual.json",
        r#"{"hbar": 0.35,
            "sources": [{"x": [2.8, 0.1], "a": 1}, {"x": [-2.9, 0.0], "a": 2}],
            "fields": [{"y": [0.1, 3.1], "b": 1}, {"y": [0.0, -3.2], "b": 1}]}"#,
    );
    let out = bin()
        .args(["duality", "--spec", path.to_str().unwrap(), "--oracle", "1,1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["free_energies"]["pass"], true);
    assert_eq!(doc["oracle"]["ratio_same_hbar"], serde_json::json!(["-1", "0"]));
    // an unachievable tolerance must flip the exit code to 1
    let out = bin()
        .args([
            "duality",
            "--spec",
            path.to_str().unwrap(),
            "--tol",
            "1e-18",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invariants_single_suite() {
    let out = bin()
        .args(["invariants", "--suite", "grassmann", "--seed", "7"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc[0]["suite"], "grassmann");
    assert_eq!(doc[0]["failures"], 0);
    // unknown suite is a usage error
    let out = bin()
        .args(["invariants", "--suite", "nonsense"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
