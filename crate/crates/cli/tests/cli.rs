use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sparse-series"));
    c.env_remove("SPARSE_SERIES_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compares against a frozen fixture; `UPDATE_GOLDEN=1` rewrites it.
fn assert_golden(name: &str, actual: &[u8]) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert!(expected == actual, "{name} differs from its golden file:\n{}", String::from_utf8_lossy(actual));
}

fn json_stdout(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn classify_reports_pisot() {
    let v = json_stdout(&run(&["classify", "--minpoly", "x^2-2x-1"]));
    assert_eq!(v["kind"], "Pisot");
    assert_eq!(v["degree"], 2);
    let v = json_stdout(&run(&["classify", "--minpoly=-2,0,1"]));
    assert_eq!(v["kind"], "NeitherPisotNorSalem");
    let v = json_stdout(&run(&["classify", "--minpoly", "1,1,0,-1,-1,-1,-1,-1,0,1,1"]));
    assert_eq!(v["kind"], "Salem");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["classify", "--minpoly", "x^2-2x-1", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "--minpoly", "x^2+1"]).status.code(), Some(1));
    assert_eq!(run(&["check", "--t", "2", "--a", "power:3"]).status.code(), Some(1));
    assert_eq!(run(&["eval", "--t", "2", "--a", "nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let out = bin().env("SPARSE_SERIES_THREADS", "zero").args(["classify", "--minpoly", "x-2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn computational_errors_exit_two() {
    // the majorant ratio r = 3 is not below q = 2
    let dir = tempfile::tempdir().unwrap();
    let seq = dir.path().join("s.jsonl");
    std::fs::write(
        &seq,
        "{\"format\":\"sparse-series-seq/1\",\"minpoly\":[-2,1],\"horizon\":5,\"majorant\":{\"kind\":\"geometric\",\"m\":\"1\",\"r\":\"3\"},\"generator\":\"test\",\"obligations\":[]}\n{\"n\":1,\"coords\":[1]}\n",
    )
    .unwrap();
    let spec = format!("file:{}", seq.display());
    assert_eq!(run(&["eval", "--t", "2", "--a", &spec]).status.code(), Some(2));
    // u ξ_2 >= 1 for u >= 64 on the cubes
    let out = run(&["witness", "--t", "2", "--a", "power:3", "--u-max", "100", "--n-max", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sieve_value_set() {
    let v = json_stdout(&run(&["sieve", "--function", "phi", "--limit", "10", "--summatory", "1"]));
    assert_eq!(v["value_set"]["count"], 5);
    assert_eq!(v["value_set"]["values"], serde_json::json!([1, 2, 4, 6, 8]));
    // φ(1..10) = 1,1,2,2,4,2,6,4,6,4
    assert_eq!(v["summatory"]["value"], "32");
}

#[test]
fn build_seq_round_trips_through_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cubes.jsonl");
    let p = path.to_str().unwrap();
    let v = json_stdout(&run(&["build-seq", "--t", "2", "--a", "power:3", "--horizon", "200", "--out", p]));
    assert_eq!(v["support_count"], 5);
    let direct = json_stdout(&run(&["eval", "--t", "2", "--a", "power:3", "--horizon", "200"]));
    let spec = format!("file:{p}");
    let loaded = json_stdout(&run(&["eval", "--t", "2", "--a", &spec]));
    assert_eq!(direct["value"], loaded["value"]);
}

#[test]
fn stats_on_cubes() {
    let v = json_stdout(&run(&["stats", "--t", "2", "--a", "power:3", "--x", "1000", "--at-z", "2"]));
    assert_eq!(v["n_count"], 9);
    assert_eq!(v["s_value"]["lo"], "9e0");
}

#[test]
fn digits_of_cubes() {
    let dir = tempfile::tempdir().unwrap();
    let rle = dir.path().join("d.rle");
    let v = json_stdout(&run(&[
        "digits", "--t", "2", "--g", "power:3", "--limit", "100000", "--out", rle.to_str().unwrap(),
    ]));
    assert_eq!(v["nonzero_digits"], 46);
    assert_eq!(v["carry_count"], 0);
    let text = std::fs::read_to_string(rle).unwrap();
    assert!(text.starts_with("sparse-series-digits/1"));
}

#[test]
fn check_writes_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(&[
        "check", "--theorem", "rational", "--t", "2", "--a", "fiber:sigma", "--schedule", "geometric:1e3:1e5",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["schema"], "sparse-series-report/1");
    assert_eq!(v["metadata"]["theorem"], "rational");
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"t": 2, "a": "power:3", "schedule": "geometric:100:10000", "z": "powerlog:1/2:1", "theorem": "main"}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let v = json_stdout(&run(&["check", "--config", c]));
    assert_eq!(v["metadata"]["checkpoints"].as_array().unwrap().len(), 3);
    let v = json_stdout(&run(&["check", "--config", c, "--schedule", "geometric:100:1000"]));
    assert_eq!(v["metadata"]["checkpoints"].as_array().unwrap().len(), 2);
    std::fs::write(&cfg, r#"{"t": 2, "unknown_key": 1}"#).unwrap();
    assert_eq!(run(&["check", "--config", c]).status.code(), Some(1));
}

#[test]
fn golden_main_report() {
    let args = [
        "check", "--t", "2", "--a", "power:3", "--b", "power:2", "--schedule", "geometric:100:100000",
        "--z", "powerlog:1/2:1", "--delta", "8", "--l", "2",
    ];
    let first = run(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_golden("cubes_main.json", &first.stdout);
    for fmt in ["csv", "text"] {
        let mut a = args.to_vec();
        a.extend(["--format", fmt]);
        let o = run(&a);
        assert!(o.status.success());
        assert_golden(&format!("cubes_main.{fmt}"), &o.stdout);
    }
}

#[test]
fn golden_witness_text() {
    let o = run(&["witness", "--minpoly", "x^2-2x-1", "--a", "power:3", "--u-max", "5", "--n-max", "60", "--format", "text"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_golden("cubes_witness.txt", &o.stdout);
    let text = String::from_utf8(o.stdout).unwrap();
    let us: Vec<u64> = text
        .lines()
        .filter_map(|l| l.trim().strip_prefix("u="))
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(us, (1..=5).collect::<Vec<_>>());
}

#[test]
fn thread_cap_keeps_reports_identical() {
    let args = ["check", "--t", "2", "--a", "power:3", "--schedule", "geometric:100:10000", "--z", "powerlog:1/2:1"];
    let one = bin().env("SPARSE_SERIES_THREADS", "1").args(args).output().unwrap();
    let many = bin().env("SPARSE_SERIES_THREADS", "4").args(args).output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}
