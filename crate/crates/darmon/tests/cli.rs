use std::process::Command;

use darmon::config::{FieldElem, KSpec, RunConfig};
use darmon::fixtures::e31_config;
use darmon::run::{run, RunOptions, Subcommand};

fn opts(dir: &tempfile::TempDir) -> RunOptions {
    RunOptions { out: dir.path().to_path_buf(), threads: 2, cache: None, budget: None }
}

fn body(report: &str) -> serde_json::Value {
    serde_json::from_str::<serde_json::Value>(report).unwrap()["body"].clone()
}

#[test]
fn invariants_report_even_ram_set_and_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(Subcommand::Invariants, &e31_config(), &opts(&dir)).unwrap();
    assert_eq!(out.exit_code, 0);
    assert_eq!(body(&out.report)["ram_even"], true);
    for f in ["report.json", "table.csv", "log.txt"] {
        assert!(dir.path().join(f).exists());
    }
    let header: serde_json::Value = serde_json::from_str(&out.report).unwrap();
    let embedded: RunConfig = serde_json::from_value(header["header"]["config"].clone()).unwrap();
    let again = run(Subcommand::Invariants, &embedded, &opts(&tempfile::tempdir().unwrap())).unwrap();
    assert_eq!(again.report, out.report);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = e31_config();
    cfg.k = Some(KSpec::Delta { delta: FieldElem::half(1, 1) });
    let err = run(Subcommand::Invariants, &cfg, &opts(&dir)).err().unwrap();
    assert_eq!(err.exit_code(), 3);

    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"field": 5, "curve": {"a": [], "conductor": []}, "colour": 1}"#).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_darmon")).args(["invariants", "--config"]).arg(&path).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let good = dir.path().join("e31.json");
    std::fs::write(&good, serde_json::to_string(&e31_config()).unwrap()).unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_darmon")).args(["invariants", "--beta", "3", "--config"]).arg(&good).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = Command::new(env!("CARGO_BIN_EXE_darmon")).args(["invariants", "--beta", "-1", "--config"]).arg(&good).arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn point_with_one_multiplier_is_unrecognized() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = e31_config();
    cfg.point.m_max = 1;
    let out = run(Subcommand::Point, &cfg, &opts(&dir)).unwrap();
    assert_eq!(out.exit_code, 0);
    let b = body(&out.report);
    assert_eq!(b["points"][0]["status"], "unrecognized");
    assert!(b["points"][0]["tail"].as_f64().unwrap() < 1e-9);
}

#[test]
fn scan_emits_one_row_per_admissible_t() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = darmon::checks::scan_check_config();
    cfg.scan.as_mut().unwrap().t_max = 30;
    let out = run(Subcommand::GkzScan, &cfg, &opts(&dir)).unwrap();
    let field = cfg.build_field().unwrap();
    let curve = cfg.build_curve(&field).unwrap();
    let conductor: Vec<_> = curve.conductor().iter().map(|c| c.prime.clone()).collect();
    let d0 = cfg.scan.as_ref().unwrap().d0.to_element(&field).unwrap();
    let ts = darmon_core::gkzscan::admissible_t(&field, &d0, &conductor, 30).unwrap();
    assert_eq!(out.table.lines().count(), ts.len() + 1);
    assert!(out.table.starts_with("schema,t,"));
}
