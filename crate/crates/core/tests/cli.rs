use std::path::PathBuf;
use std::process::Command as Proc;

use kzd::cli::{emit, parse_report, run, Format, RunConfig, RunReport, Status};

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn load(name: &str) -> RunConfig {
    RunConfig::from_json(&std::fs::read_to_string(config_path(name)).unwrap()).unwrap()
}

fn without_timing(mut r: RunReport) -> RunReport {
    r.timing_ms = None;
    r
}

#[test]
fn flatness_config_is_exactly_flat() {
    let r = run(&load("flatness_sl2.json"));
    assert_eq!(r.status, Status::Pass, "{r:?}");
    assert!(r.checks.iter().all(|c| c.exact == Some(true) && c.value == Some(0.0)));
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn residuals_config_passes() {
    let r = run(&load("residuals_sl2.json"));
    assert_eq!(r.status, Status::Pass, "{r:?}");
    assert_eq!(r.checks.len(), 3);
}

#[test]
fn malformed_gram_exits_with_schema_code() {
    let mut cfg = load("residuals_sl2.json");
    cfg.algebra.as_mut().unwrap().gram = Some(vec![vec!["2".into(), "1".into()], vec!["0".into(), "2".into()]]);
    cfg.lambda = Some(vec![1, 0]);
    let r = run(&cfg);
    assert_eq!(r.exit_code(), 2);
    let e = r.error.unwrap();
    assert_eq!(e.kind, "schema");
    assert!(e.message.contains("algebra.gram"), "{}", e.message);

    let mut cfg = load("residuals_sl2.json");
    cfg.mu.as_mut().unwrap().lam = Some(vec!["1/0".into(), "1".into()]);
    let e = run(&cfg).error.unwrap();
    assert!(e.message.contains("mu.lam[0]"), "{}", e.message);
}

#[test]
fn coincident_points_exit_with_singularity_code() {
    let mut cfg = load("flatness_sl2.json");
    cfg.z = Some(vec!["1/3".into(), "2/6".into()]);
    assert_eq!(run(&cfg).exit_code(), 3);
}

#[test]
fn out_of_regime_exits_nonzero() {
    let mut cfg = load("residuals_sl2.json");
    cfg.mu.as_mut().unwrap().alpha = Some(vec!["-1".into()]);
    let r = run(&cfg);
    assert_eq!(r.status, Status::Error);
    assert_eq!(r.exit_code(), 3, "{:?}", r.error);
}

#[test]
fn reports_round_trip_and_keep_rationals_as_strings() {
    let r = run(&load("det_check_sl2.json"));
    assert_eq!(r.status, Status::Pass, "{r:?}");
    let traces = r.data["delta_traces"].as_object().unwrap();
    assert_eq!(traces.values().next().unwrap().as_str().unwrap(), "-6/5");
    let back = parse_report(&emit(&r, Format::Json)).unwrap();
    assert_eq!(back, r);

    let empty = RunReport::new("os-check");
    let s = emit(&empty, Format::Json);
    let v: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(v["checks"], serde_json::json!([]));
    assert_eq!(parse_report(&s).unwrap(), empty);
}

#[test]
fn reports_are_deterministic() {
    for name in ["flatness_sl2.json", "solve_sl2.json", "os_c22.json"] {
        let mut cfg = load(name);
        let a = without_timing(run(&cfg));
        cfg.numeric.threads = Some(1);
        let b = without_timing(run(&cfg));
        assert_eq!(emit(&a, Format::Json), emit(&b, Format::Json), "{name}");
    }
}

#[test]
fn binary_follows_the_exit_code_contract() {
    let bin = env!("CARGO_BIN_EXE_kzd");
    let out = Proc::new(bin)
        .args(["os-check", "--config"])
        .arg(config_path("os_c22.json"))
        .args(["--format", "text"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("os-check: PASS"));

    let dir = std::env::temp_dir().join(format!("kzd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"schema_version": 1, "algebra": {"mode": "free", "gram": [["2", "x"]]}}"#).unwrap();
    let report = dir.join("report.json");
    let out = Proc::new(bin)
        .args(["flatness", "--config"])
        .arg(&bad)
        .arg("--out")
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let r = parse_report(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r.status, Status::Error);
    assert!(r.error.unwrap().message.contains("algebra.gram[0][1]"));
    std::fs::remove_dir_all(&dir).ok();
}
