use std::process::{Command, Output};

use meanscope::classify::Property;
use meanscope::config::{Family, FunctionSpec, RunConfig};
use meanscope::hansen::{hansen_eval, theorem_counterexample};

fn meanscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meanscope"))
        .args(args)
        .env_remove("MEANSCOPE_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn classify_exit_codes() {
    let ok = meanscope(&["classify", "--family", "uab", "--a", "1", "--b", "0.5", "--props", "gcv,pmi"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let violated = meanscope(&["classify", "--family", "section5", "--props", "pmi_r", "--r", "2"]);
    assert_eq!(violated.status.code(), Some(1));
    let bad = meanscope(&["classify", "--family", "bogus", "--props", "gcv"]);
    assert_eq!(bad.status.code(), Some(2));
    let outside = meanscope(&["classify", "--family", "uab", "--a", "0.5", "--b", "1", "--props", "gcv"]);
    assert_eq!(outside.status.code(), Some(2));
}

#[test]
fn classify_json_is_deterministic() {
    let args = ["classify", "--family", "stolarsky", "--alpha", "-1.5", "--props", "gcv,gcc,pmi", "--format", "json"];
    let first = meanscope(&args);
    let second = meanscope(&args);
    assert_eq!(first.stdout, second.stdout);
    let v: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(v["command"], "classify");
}

#[test]
fn classify_csv_has_header() {
    let out = meanscope(&["classify", "--family", "power", "--alpha", "0.5", "--props", "gcv,gcc", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("property,verdict,t,r,value\n"));
}

#[test]
fn hansen_evaluation() {
    let out = meanscope(&["hansen", "--theorem", "--criterion", "eval", "--t", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("t,r,value,method\n"));
    let row = text.lines().nth(1).unwrap();
    let value: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
    let expect = hansen_eval(&theorem_counterexample(), 4.0).unwrap();
    assert!((value - expect).abs() < 1e-14, "{text}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"[{"from": -1, "to": 0, "value": 2}]"#).unwrap();
    let out = meanscope(&["hansen", "--density", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reproduce_reports_checks() {
    let out = meanscope(&["reproduce", "theorem_gcv_pmi", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().len() >= 4);
}

#[test]
fn fuzz_seed_from_environment_matches_flag() {
    let flag = meanscope(&["fuzz", "--family", "binomial", "--bp", "0.5", "--trials", "30", "--seed", "19", "--format", "json"]);
    let env = Command::new(env!("CARGO_BIN_EXE_meanscope"))
        .args(["fuzz", "--family", "binomial", "--bp", "0.5", "--trials", "30", "--format", "json"])
        .env("MEANSCOPE_SEED", "19")
        .output()
        .unwrap();
    assert_eq!(flag.status.code(), Some(0));
    assert_eq!(flag.stdout, env.stdout);
}

#[test]
fn fuzz_finds_section5_witness() {
    let out = meanscope(&["fuzz", "--family", "section5", "--trials", "10", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["witness"]["phase"], "scalar_probe");
}

#[test]
fn config_file_drives_classification() {
    let config = RunConfig {
        function: Some(FunctionSpec { p: Some(-0.5), ..FunctionSpec::new(Family::Binomial) }),
        properties: vec![Property::Gcc, Property::Pmd],
        ..RunConfig::default()
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, config.to_json()).unwrap();
    let report = dir.path().join("report.json");
    let out = meanscope(&["classify", "--config", path.to_str().unwrap(), "--output", report.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["config"]["function"]["family"], "binomial");

    std::fs::write(&path, "{\"function\": 3}").unwrap();
    let out = meanscope(&["classify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_csv() {
    let out = meanscope(&["scan", "--family", "stolarsky", "--property", "gcc", "--step", "0.5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.starts_with("alpha,predicted,observed\n"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(meanscope(&[]).status.code(), Some(2));
    assert_eq!(meanscope(&["fuzz", "--family", "power", "--alpha", "0.5", "--p", "0.5"]).status.code(), Some(2));
}
