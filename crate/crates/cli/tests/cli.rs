//! End-to-end tests of the `anosovq` binary: exit codes, output formats,
//! determinism, and the threads fallback chain.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_anosovq"))
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", "{\"dimension\": 1, \"omega\": [1.0],");
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "catmap",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists(), "no partial output on config errors");
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "typo.json",
        r#"{"dimension": 1, "omega": [1.0], "E": -1.0, "horizons": 10.0}"#,
    );
    let out = run(&["lyapunov", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn elliptic_anosov_input_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "elliptic.json",
        r#"{"dimension": 1, "omega": [1.0], "E": 0.3}"#,
    );
    let out = run(&["anosov", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("dichotomy"), "explanatory message, got {msg}");
}

#[test]
fn catmap_report_schema_and_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cat.json",
        r#"{"dimension": 1, "omega": [1.0], "cat_T": 1.0}"#,
    );
    let out = run(&["catmap", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["lambda"].as_f64().unwrap() - 0.9624236501).abs() < 1e-9);
    assert_eq!(v["verdict"], "pass");
    let dirs = v["directions"].as_array().unwrap();
    assert_eq!(dirs.len(), 4);
    let pattern: Vec<&str> = dirs
        .iter()
        .map(|d| d["derivation"].as_str().unwrap())
        .collect();
    assert_eq!(pattern, ["inner", "outer", "inner", "outer"]);
    for d in dirs {
        assert!(d["residual"].as_f64().unwrap() <= 1e-12);
        assert!(d["exponent"]["re"].as_f64().is_some());
        assert!(d["exponent"]["im"].as_f64().is_some());
    }
}

#[test]
fn catmap_kick_period_independence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cat_t.json",
        r#"{"dimension": 1, "omega": [1.0], "cat_T": 2.5}"#,
    );
    let out = run(&["catmap", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["lambda"].as_f64().unwrap() - 0.9624236501192069).abs() < 1e-12);
    assert_eq!(v["verdict"], "pass");
}

fn scan_config(out_name: &str) -> String {
    format!(
        r#"{{
  "dimension": 1,
  "omega": [1.0],
  "E_grid": {{"min": -2.0, "max": -0.5, "count": 4}},
  "horizon": 60.0,
  "directions": 4,
  "seed": 42,
  "out": "{out_name}"
}}"#
    )
}

#[test]
fn scan_emits_the_documented_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("rows.csv");
    let cfg = write_config(
        dir.path(),
        "scan.json",
        &scan_config(&out_path.display().to_string()),
    );
    let out = run(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "E,lambda_c,lambda_bar,classification,residual"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    for (k, row) in rows.iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 5);
        let e: f64 = cells[0].parse().unwrap();
        let expected_e = -2.0 + 1.5 * k as f64 / 3.0;
        assert!((e - expected_e).abs() < 1e-12);
        let lambda: f64 = cells[1].parse().unwrap();
        assert!(
            (lambda - (-e).sqrt()).abs() < 1e-3,
            "λ_c({e}) = {lambda}, expected {}",
            (-e).sqrt()
        );
        assert_eq!(cells[3], "hyperbolic");
    }
    // λ_c(E) is non-increasing in E for V = 0 on E < 0
    let lambdas: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for pair in lambdas.windows(2) {
        assert!(pair[1] <= pair[0] + 1e-3, "λ_c not monotone: {lambdas:?}");
    }
    assert!(!csv.contains('\r'), "LF line endings only");
}

#[test]
fn scan_rows_are_deterministic_and_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let out_c = dir.path().join("c.csv");
    let cfg = write_config(dir.path(), "scan.json", &scan_config("unused.csv"));

    let args = |out: &Path| {
        vec![
            "scan".to_string(),
            "--config".into(),
            cfg.display().to_string(),
            "--out".into(),
            out.display().to_string(),
            "--seed".into(),
            "42".into(),
        ]
    };
    assert_eq!(bin().args(args(&out_a)).status().unwrap().code(), Some(0));
    assert_eq!(bin().args(args(&out_b)).status().unwrap().code(), Some(0));
    assert_eq!(
        bin()
            .args(args(&out_c))
            .arg("--threads")
            .arg("3")
            .status()
            .unwrap()
            .code(),
        Some(0)
    );
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    let c = std::fs::read(&out_c).unwrap();
    assert_eq!(a, b, "repeat run must be byte-identical");
    assert_eq!(a, c, "thread count must not change the bytes");
}

#[test]
fn threads_env_fallback_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("env.csv");
    let cfg = write_config(
        dir.path(),
        "scan.json",
        &scan_config(&out_path.display().to_string()),
    );
    let status = bin()
        .args(["scan", "--config", cfg.to_str().unwrap()])
        .env("ANOSOVQ_THREADS", "2")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(out_path.exists());
}

#[test]
fn elliptic_scan_rows_report_zero_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "scan_ell.json",
        r#"{
  "dimension": 1,
  "omega": [1.0],
  "E_grid": {"min": 0.55, "max": 1.95, "count": 4},
  "horizon": 100.0,
  "integrator": {"step": 1e-3, "renorm_interval": 0.25},
  "directions": 4
}"#,
    );
    let out = run(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    for row in csv.lines().skip(1) {
        let cells: Vec<&str> = row.split(',').collect();
        let lambda: f64 = cells[1].parse().unwrap();
        assert!(lambda.abs() < 1e-2, "λ_c = {lambda} in a stable band");
        assert_eq!(cells[3], "elliptic");
        assert_eq!(cells[4], "", "no residual column on elliptic rows");
    }
}

#[test]
fn lyapunov_report_on_the_constant_spec() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "lyap.json",
        r#"{"dimension": 1, "omega": [1.0], "E": -1.0, "horizon": 40.0, "directions": 8}"#,
    );
    let out = run(&["lyapunov", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["lambda_bar"].as_f64().unwrap() - 1.0).abs() < 1e-2);
    assert_eq!(v["classification"], "hyperbolic");
    let profile = v["profile"].as_array().unwrap();
    assert_eq!(profile.len(), 9);
    let stable: Vec<&serde_json::Value> = profile
        .iter()
        .filter(|p| p["stable"].as_bool().unwrap())
        .collect();
    assert_eq!(stable.len(), 1);
    assert!((stable[0]["exponent"].as_f64().unwrap() + 1.0).abs() < 1e-2);
    assert!(v["stable_direction"].is_object());
}

#[test]
fn lyapunov_elliptic_has_no_stable_direction() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "lyap_ell.json",
        r#"{
  "dimension": 1, "omega": [1.0], "E": 0.3, "horizon": 100.0,
  "integrator": {"step": 1e-3, "renorm_interval": 0.25}, "directions": 8
}"#,
    );
    let out = run(&["lyapunov", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["lambda_bar"].as_f64().unwrap().abs() < 1e-2);
    assert!(v["stable_direction"].is_null());
    assert_eq!(v["classification"], "elliptic");
}

#[test]
fn failed_certificate_exits_3() {
    // an honest hyperbolic run against an unreachable tolerance
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "strict.json",
        r#"{"dimension": 1, "omega": [1.0], "E": -1.0, "period_samples": 32, "tolerance": 1e-18}"#,
    );
    let out = run(&["anosov", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "fail");
    assert!(v["residual_max"].as_f64().unwrap() > 1e-18);
}

#[test]
fn parabolic_anosov_input_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "free.json",
        r#"{"dimension": 1, "omega": [1.0], "E": 0.0}"#,
    );
    let out = run(&["anosov", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn quasi_periodic_anosov_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "quasi.json",
        r#"{
  "dimension": 2,
  "omega": [1.0, 1.6180339887498949],
  "E": -0.04,
  "potential": {"constant": 0.0, "terms": [{"k": [1, 0], "a": 0.001}, {"k": [0, 1], "a": 0.001}]},
  "horizon": 60.0,
  "period_samples": 24
}"#,
    );
    let out = run(&["anosov", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["classification"], "hyperbolic");
    assert_eq!(v["tolerance"].as_f64().unwrap(), 1e-2);
    assert!((v["lambda_plus"]["re"].as_f64().unwrap() - 0.2).abs() < 5e-3);
}

#[test]
fn lyapunov_and_scan_agree_on_a_tongue_point() {
    // λ̄ from the lyapunov report matches the scan row at the same E
    let dir = tempfile::tempdir().unwrap();
    let body = r#"{
  "dimension": 1,
  "omega": [1.0],
  "E": 0.25,
  "E_grid": {"min": 0.25, "max": 0.25, "count": 1},
  "potential": {"constant": 0.0, "terms": [{"k": [1], "a": 2.0, "b": 0.0}]},
  "horizon": 300.0,
  "directions": 8
}"#;
    let cfg = write_config(dir.path(), "tongue.json", body);
    let lyap = run(&["lyapunov", "--config", cfg.to_str().unwrap()]);
    assert_eq!(lyap.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&lyap.stdout).unwrap();
    let lambda_bar = report["lambda_bar"].as_f64().unwrap();

    let scan = run(&["scan", "--config", cfg.to_str().unwrap()]);
    assert_eq!(scan.status.code(), Some(0));
    let csv = String::from_utf8(scan.stdout).unwrap();
    let row = csv.lines().nth(1).unwrap();
    let cells: Vec<&str> = row.split(',').collect();
    let scan_lambda_bar: f64 = cells[2].parse().unwrap();
    assert!(
        (lambda_bar - scan_lambda_bar).abs() < 2e-3,
        "λ̄ {lambda_bar} vs scan {scan_lambda_bar}"
    );
    assert_eq!(cells[3], "hyperbolic");
    let lambda_c: f64 = cells[1].parse().unwrap();
    assert!((lambda_bar - lambda_c).abs() < 2e-3);
}

#[test]
fn anosov_certificate_on_the_constant_spec() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "anosov.json",
        r#"{
  "dimension": 1, "omega": [1.0], "E": -1.0,
  "integrator": {"step": 2.5e-4, "renorm_interval": 1.0},
  "period_samples": 64, "tolerance": 1e-9
}"#,
    );
    let out = run(&["anosov", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert!(v["residual_max"].as_f64().unwrap() <= 1e-9);
    assert!((v["lambda_plus"]["re"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    assert_eq!(v["classification"], "hyperbolic");
    assert_eq!(v["grid"].as_u64().unwrap(), 64);
}
