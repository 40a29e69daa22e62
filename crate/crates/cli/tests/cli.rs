use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn selflink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selflink")).args(args).output().expect("binary runs")
}

fn run_with(args: &[&str], path: &PathBuf) -> Output {
    let mut all: Vec<&str> = args.to_vec();
    all.push(path.to_str().unwrap());
    selflink(&all)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_config(dir: &tempfile::TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn compute_twisted_circle() {
    let out = run_with(&["compute"], &fixture("circle_twist3.json"));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sl"], 3);
    assert_eq!(v["oracle_sl"], 3);
    assert_eq!(v["oracle_agrees"], true);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn compute_constant_circle_is_nontrivial() {
    let out = run_with(&["compute"], &fixture("circle_const.json"));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sl"], 0);
    assert_eq!(v["framing_class"], "nontrivial");
}

#[test]
fn compute_csv_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.csv");
    let out = selflink(&[
        "compute",
        fixture("circle_twist3.json").to_str().unwrap(),
        "--format",
        "csv",
        "--no-oracle",
        "-o",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(target).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("name,status,sl,"));
    assert!(lines.next().unwrap().starts_with("circle_twist3,ok,3,"));
}

#[test]
fn fixtures_directory_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_selflink"))
        .args(["compute", "circle_const.json", "--no-oracle"])
        .env("SELFLINK_FIXTURES", fixture(""))
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["sl"], 0);
}

#[test]
fn truncated_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(&dir, "bad.json", "{\"schema_version\": 1, \"curve\": {\"kind\":");
    let out = run_with(&["compute"], &p);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1 column"), "{err}");
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        &dir,
        "extra.json",
        r#"{"curve": {"kind": "circle"}, "framing": {"kind": "frenet"}, "quadrature": {"n": 512, "order": 4}}"#,
    );
    let out = run_with(&["compute"], &p);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("order"));
    let p = write_config(&dir, "param.json", r#"{"curve": {"kind": "circle", "params": {"radus": 1}}, "framing": {"kind": "frenet"}}"#);
    assert_eq!(run_with(&["compute"], &p).status.code(), Some(1));
    let p = write_config(&dir, "schema.json", r#"{"schema_version": 2, "curve": {"kind": "circle"}, "framing": {"kind": "frenet"}}"#);
    assert_eq!(run_with(&["compute"], &p).status.code(), Some(1));
}

#[test]
fn oracle_disagreement_is_a_quality_failure() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        &dir,
        "coarse.json",
        r#"{"curve": {"kind": "torus_knot", "params": {"p": 2, "q": 7, "R": 2.0, "r": 1.8}},
            "framing": {"kind": "projection", "direction": [0, 0, 1]},
            "quadrature": {"n": 48}}"#,
    );
    let out = run_with(&["compute"], &p);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["oracle_agrees"], false);
}

#[test]
fn single_threaded_output_is_byte_identical() {
    let args = ["--threads", "1", "compute", fixture("trefoil_frenet.json").to_str().unwrap().to_owned().leak()];
    let a = selflink(&args);
    let b = selflink(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["quadrature"]["parallel"], false);
    assert_eq!(v["sl"], -3);
}

#[test]
fn floats_carry_seventeen_digits() {
    let out = run_with(&["compute", "--no-oracle"], &fixture("trefoil_frenet.json"));
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.trim_start().starts_with("\"writhe\"")).unwrap();
    let number = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
    let mantissa = number.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
    assert_eq!(mantissa.len(), 17, "{number}");
}

#[test]
fn verify_suites_pass() {
    for suite in ["calugareanu", "invariance", "frenet", "blackboard", "twist-shift"] {
        let out = run_with(&["verify", suite, "--json"], &fixture("suite.json"));
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["pass"], true);
        assert_eq!(v["suite"], suite);
    }
}

#[test]
fn verify_frenet_on_knots() {
    let out = run_with(&["verify", "frenet", "--json"], &fixture("knots.json"));
    assert_eq!(out.status.code(), Some(0));
    for r in json(&out)["results"].as_array().unwrap() {
        assert!(r["verdict"]["gap"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn verify_twist_shift_integers() {
    let out = run_with(&["verify", "twist-shift", "--json"], &fixture("circle_const.json"));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for e in v["results"][0]["verdict"]["entries"].as_array().unwrap() {
        assert_eq!(e["shift"], e["twists"]);
    }
}

#[test]
fn coarse_verify_is_a_tolerance_failure() {
    let out = run_with(&["verify", "calugareanu", "--n", "32", "--json"], &fixture("suite.json"));
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["pass"], false);
}

#[test]
fn unknown_suite_lists_valid_names() {
    let out = run_with(&["verify", "swaddle"], &fixture("suite.json"));
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    for name in ["calugareanu", "invariance", "frenet", "blackboard", "twist-shift"] {
        assert!(err.contains(name));
    }
}

#[test]
fn converge_writhe_table() {
    let out = run_with(&["converge", "writhe", "--n-list", "128,256,512,1024"], &fixture("trefoil_frenet.json"));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(text.lines().next(), Some("n,value,diff_prev,observed_order"));
    assert_eq!(rows.len(), 4);
    let diffs: Vec<f64> = rows[1..].iter().map(|r| r[2].parse::<f64>().unwrap().abs()).collect();
    assert!(diffs.windows(2).all(|w| w[1] < w[0]));
    let order: f64 = rows[3][3].parse().unwrap();
    assert!(order > 1.9);
}

#[test]
fn converge_twist_on_twisted_circle() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        &dir,
        "k1.json",
        r#"{"curve": {"kind": "circle"},
            "framing": {"kind": "twisted", "twists": 1, "base": {"kind": "projection", "direction": [0, 0, 1]}}}"#,
    );
    let out = run_with(&["converge", "twist", "--n-list", "64,128"], &p);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for row in text.lines().skip(1) {
        let value: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((value - 1.0).abs() < 1e-8);
    }
}

#[test]
fn converge_rejects_empty_list() {
    let out = run_with(&["converge", "writhe", "--n-list", ""], &fixture("trefoil_frenet.json"));
    assert_eq!(out.status.code(), Some(1));
    let out = run_with(&["converge", "linking"], &fixture("trefoil_frenet.json"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn crossings_of_trefoil_and_circle() {
    let out = run_with(&["crossings", "--direction", "0,0,1"], &fixture("trefoil_frenet.json"));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["writhe"].as_i64().unwrap().abs(), 3);
    let out = run_with(&["crossings", "--direction", "0,0,1"], &fixture("circle_const.json"));
    let v = json(&out);
    assert_eq!(v["writhe"], 0);
    assert_eq!(v["crossings"].as_array().unwrap().len(), 0);
}

#[test]
fn crossings_of_hopf_pair() {
    let out = run_with(&["crossings", "--direction", "0.3,-0.2,1"], &fixture("hopf.json"));
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["linking"].as_i64().unwrap().abs(), 1);
    assert_eq!(v["crossings"].as_array().unwrap().len(), 2);
}

#[test]
fn crossings_reject_zero_direction() {
    let out = run_with(&["crossings", "--direction", "0,0,0"], &fixture("circle_const.json"));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn crossings_report_exhausted_retries() {
    // Two circles a nanometre apart cannot be separated in height from any direction.
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(
        &dir,
        "stacked.json",
        r#"{"curve": {"kind": "circle"}, "partner": {"kind": "circle", "params": {"cz": 1e-9}}, "framing": {"kind": "frenet"}}"#,
    );
    let out = run_with(&["crossings", "--direction", "0.3,0.2,1"], &p);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("attempted"));
    assert_eq!(err.lines().filter(|l| l.starts_with("  ")).count(), 32);
}

#[test]
fn usage_errors_are_input_errors() {
    assert_eq!(selflink(&["compute"]).status.code(), Some(1));
    assert_eq!(selflink(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(selflink(&["--help"]).status.code(), Some(0));
}
