use std::fs;
use std::process::{Command, Output};

fn zetalab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetalab")).args(args).env_remove("ZETALAB_WORKERS").output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn sn_eval_routes_agree() {
    let rep = json(&zetalab(&["sn", "eval", "--n", "2", "--sigma", "0.55", "--t", "20", "--route", "rep"]));
    let rec = json(&zetalab(&["sn", "eval", "--n", "2", "--sigma", "0.55", "--t", "20", "--route", "rec"]));
    let (a, b) = (rep["Sn"]["value"].as_f64().unwrap(), rec["Sn"]["value"].as_f64().unwrap());
    assert!((a - b).abs() < 1e-6, "{a} vs {b}");
}

#[test]
fn zeros_count_below_fifty() {
    let out = zetalab(&["zeros", "count", "--t", "50"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["count"], 10);
}

#[test]
fn invalid_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[run]\nwidth = 3\n").unwrap();
    let out = zetalab(&["hunt", "run", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(zetalab(&["hunt", "run", "--sign", "3"]).status.code(), Some(2));
    assert_eq!(zetalab(&["pipeline", "run", "--T", "2000", "--primes", "7,11"]).status.code(), Some(2));
    let workers = Command::new(env!("CARGO_BIN_EXE_zetalab"))
        .args(["zeros", "count", "--t", "20"])
        .env("ZETALAB_WORKERS", "none")
        .output()
        .unwrap();
    assert_eq!(workers.status.code(), Some(2));
}

#[test]
fn numeric_failure_exits_three() {
    let out = zetalab(&["sn", "eval", "--t", "1000", "--target", "1e-15"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn flags_override_file_and_replay_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "[run]\nn = 1\nT = 5000.0\n").unwrap();
    let first = dir.path().join("first");
    let out =
        zetalab(&["hunt", "run", "--config", cfg.to_str().unwrap(), "--T", "2500", "--out", first.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(first.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "report_v1");
    assert_eq!(report["config"]["run"]["T"], 2500.0);
    let csv = fs::read_to_string(first.join("rows.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,Sn,delta_h_Sn,sign,flags"));

    let second = dir.path().join("second");
    let out = zetalab(&[
        "hunt",
        "run",
        "--replay",
        first.join("report.json").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    for f in ["rows.csv", "report.json"] {
        assert_eq!(fs::read(first.join(f)).unwrap(), fs::read(second.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn pipeline_writes_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = zetalab(&["pipeline", "run", "--primes", "7,11,13", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(dir.path().join("rows.csv")).unwrap(), "t,Sn,delta_h_Sn,sign,flags\n");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["kind"], "pipeline");
    assert_eq!(report["pipeline"]["main_dominates"], true);
}
