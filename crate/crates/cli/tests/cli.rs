use std::path::Path;
use std::process::{Command, Output};

fn ckn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ckn"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn constants_inline_and_from_file() {
    let v = stdout_json(&ckn(&["constants", r#"{"d": 3, "a": 0, "p": 4, "theta": 0.8}"#]));
    assert!((v["ckn_radial"]["value"].as_f64().unwrap() - 0.27955).abs() < 1e-5);
    assert_eq!(v["ckn_radial"]["kind"], "ckn_radial");

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("q.json");
    std::fs::write(&f, r#"{"d": 3, "a": 0, "gamma": 0.75}"#).unwrap();
    let v = stdout_json(&ckn(&["constants", path(&f)]));
    assert!(v["wlh_radial"]["value"].as_f64().unwrap() > v["c_ls"].as_f64().unwrap());

    let bad = ckn(&["constants", r#"{"d": 3, "a": 0.5, "p": 4}"#]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn ground_state_writes_profile() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    let v = stdout_json(&ckn(&["ground-state", "--p", "3", "--d", "5", "--out", path(&csv)]));
    assert!((v["u0"].as_f64().unwrap() - 26.292861256753845).abs() < 1e-6);
    assert!(v["identity_residual"].as_f64().unwrap() < 1e-10);
    assert!(v["a_bar_existence"].is_array());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,u"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!((first[1] - 26.292861256753845).abs() < 1e-6);
}

#[test]
fn minimize_writes_record_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let field = dir.path().join("v.csv");
    let record = dir.path().join("run_record.json");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "mode": "ckn", "d": 3, "a": 0.0, "p": 4.0, "theta": 0.9,
            "grid": {"n_s": 401, "n_xi": 1},
            "field_output": field, "record_output": record,
        })
        .to_string(),
    )
    .unwrap();
    let v = stdout_json(&ckn(&["minimize", path(&cfg)]));
    assert_eq!(v["converged"], true);
    let saved: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&record).unwrap()).unwrap();
    assert_eq!(saved, v);
    assert_eq!(saved["grid"]["n_s"], 401);
    let rows = std::fs::read_to_string(&field).unwrap();
    assert!(rows.starts_with("s,xi,value\n"));
    assert_eq!(rows.lines().count(), 402);
}

#[test]
fn minimize_detects_symmetry() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"mode": "ckn", "d": 3, "a": 0.4, "p": 4, "theta": 1, "grid": {"n_xi": 9}, "detect_symmetry": true}"#,
    )
    .unwrap();
    let v = stdout_json(&ckn(&["minimize", path(&cfg)]));
    assert_eq!(v["broken"], false);
    assert!(v["full"]["energy"].as_f64().unwrap() > 0.0);
}

#[test]
fn regions_wlh_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(
        &cfg,
        r#"{"mode": "wlh", "d": 3, "a": {"min": -1, "max": 0.5, "count": 4}, "gamma": {"min": 0.75, "max": 1, "count": 2}}"#,
    )
    .unwrap();
    let out = ckn(&["regions", path(&cfg)]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "#schema=v1,mode=wlh");
    assert!(lines[1].starts_with("d,a,gamma,"));
    // a = 0.5 = a_c is skipped at both γ
    assert_eq!(lines.iter().filter(|l| l.starts_with("#skipped")).count(), 2);
    assert_eq!(lines.len(), 2 + 6 + 2);
}

#[test]
fn regions_rejects_incomplete_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.json");
    std::fs::write(&cfg, r#"{"mode": "ckn", "d": 3, "a": 0}"#).unwrap();
    let out = ckn(&["regions", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p"));
}

#[test]
fn verify_closed_forms_exit_code() {
    let out = ckn(&["verify", "closed-forms"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 5);
    assert!(!ckn(&["verify", "nothing"]).status.success());
}
