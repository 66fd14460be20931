//! End-to-end tests of the fgrlab binary and its config layering.

use std::path::Path;
use std::process::{Command, Output};

use fgrlab::config::RunConfig;
use fgrlab::manifest::{sha256_hex, RunManifest};
use fgrlab::Cli;

use clap::Parser;
use serde_json::{json, Map, Value};

fn fgrlab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fgrlab"))
        .current_dir(dir)
        .env("FGRLAB_THREADS", "2")
        .args(args)
        .output()
        .expect("binary runs")
}

fn manifest(dir: &Path) -> RunManifest {
    let text = std::fs::read_to_string(dir.join("manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn layer(v: Value) -> Map<String, Value> {
    v.as_object().unwrap().clone()
}

#[test]
fn config_round_trips_through_json() {
    let cfg = RunConfig {
        p: 4.123456789012345,
        grid_h: 0.0025,
        steps: 17,
        sponge: true,
        out: "elsewhere".into(),
        ..RunConfig::default()
    };
    assert_eq!(RunConfig::from_json(&cfg.to_json()).unwrap(), cfg);
}

#[test]
fn flags_override_file_which_overrides_defaults() {
    let file = layer(json!({"p": 4.5, "grid_h": 0.01, "steps": 9}));
    let flags = layer(json!({"p": 4.7}));
    let cfg = RunConfig::resolve(Some(&file), &flags).unwrap();
    let default = RunConfig::default();
    assert_eq!(cfg.p, 4.7);
    assert_eq!(cfg.grid_h, 0.01);
    assert_eq!(cfg.steps, 9);
    assert_eq!(cfg.grid_l, default.grid_l);
    assert_eq!(cfg.dt, default.dt);
}

#[test]
fn unknown_config_key_is_rejected() {
    let file = layer(json!({"not_a_field": 1}));
    assert!(RunConfig::resolve(Some(&file), &Map::new()).is_err());
}

#[test]
fn cli_flags_reach_the_config() {
    let cli = Cli::try_parse_from(["fgrlab", "--grid-h", "0.02", "simulate", "--p", "4.1", "--T", "3", "--sponge"]).unwrap();
    let cfg = cli.resolve_config().unwrap();
    assert_eq!(cfg.grid_h, 0.02);
    assert_eq!(cfg.p, 4.1);
    assert_eq!(cfg.t_final, 3.0);
    assert!(cfg.sponge);
    assert!(!cfg.svg);
}

#[test]
fn unset_bool_flag_keeps_file_value() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"sponge": true, "z0": 0.02}"#).unwrap();
    let path = path.to_str().unwrap();
    let cli = Cli::try_parse_from(["fgrlab", "--config", path, "simulate", "--z0", "0.03"]).unwrap();
    let cfg = cli.resolve_config().unwrap();
    assert!(cfg.sponge);
    assert_eq!(cfg.z0, 0.03);
}

#[test]
fn unknown_flag_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fgrlab(dir.path(), &["thresholds", "--bogus"]).status.code(), Some(2));
}

#[test]
fn invalid_value_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fgrlab(dir.path(), &["fgr-sweep", "--n", "5"]).status.code(), Some(2));
    assert_eq!(fgrlab(dir.path(), &["jost", "--p", "3.5", "--validate-p3"]).status.code(), Some(2));
    assert_eq!(fgrlab(dir.path(), &["--grid-h", "-1", "thresholds"]).status.code(), Some(2));
}

#[test]
fn bad_config_file_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"grid_hh": 0.01}"#).unwrap();
    assert_eq!(fgrlab(dir.path(), &["--config", "cfg.json", "thresholds"]).status.code(), Some(2));
}

#[test]
fn thresholds_writes_ordered_values_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = fgrlab(dir.path(), &["--out", "run", "thresholds"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("run");
    let csv = std::fs::read_to_string(run.join("thresholds.csv")).unwrap();
    let ps: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(ps.len(), 3);
    assert!(4.0 < ps[0] && ps[0] < ps[1] && ps[1] < ps[2] && ps[2] < 5.0);
    assert!((ps[0] - 4.830455420416549).abs() < 1e-8);

    let m = manifest(&run);
    assert_eq!(m.command, "thresholds");
    assert!(m.anomalies.is_empty());
    assert_eq!(m.config.out, "run");
    assert_eq!(m.artifacts.len(), 1);
    assert_eq!(m.artifacts[0].path, "thresholds.csv");
    assert_eq!(m.artifacts[0].sha256, sha256_hex(csv.as_bytes()));
    assert_eq!(m.artifacts[0].bytes, csv.len());
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str| ["--out", out, "resonance-sweep", "--p-min", "3.2", "--p-max", "4.0", "--steps", "6"];
    assert_eq!(fgrlab(dir.path(), &args("a")).status.code(), Some(0));
    assert_eq!(fgrlab(dir.path(), &args("b")).status.code(), Some(0));
    let (a, b) = (manifest(&dir.path().join("a")), manifest(&dir.path().join("b")));
    assert_eq!(a.artifacts[0].sha256, b.artifacts[0].sha256);
}

#[test]
fn p3_oracle_reports_its_failures_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = fgrlab(dir.path(), &["--out", "o", "p3-oracle"]);
    assert_eq!(out.status.code(), Some(1));
    let m = manifest(&dir.path().join("o"));
    assert!(!m.anomalies.is_empty());
    let csv = std::fs::read_to_string(dir.path().join("o/p3_oracle.csv")).unwrap();
    assert!(csv.lines().filter(|l| l.ends_with(",true")).count() > m.anomalies.len());
}

#[test]
fn fgr_sweep_emits_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = fgrlab(dir.path(), &["--out", "f", "--grid-h", "0.01", "fgr-sweep", "--n", "3", "--steps", "3", "--svg"]);
    assert!(out.status.code() == Some(0) || out.status.code() == Some(1));
    let csv = std::fs::read_to_string(dir.path().join("f/fgr_sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);
    let svg = std::fs::read_to_string(dir.path().join("f/fgr_sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
}

#[test]
fn short_simulation_conserves_mass() {
    let dir = tempfile::tempdir().unwrap();
    let out = fgrlab(
        dir.path(),
        &["--out", "s", "simulate", "--p", "4.3", "--z0", "0.02", "--T", "1", "--dt", "0.002"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("s/trajectory.csv")).unwrap();
    let q: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(7).unwrap().parse().unwrap()).collect();
    assert_eq!(q.len(), 11);
    assert!(q.iter().all(|v| ((v - q[0]) / q[0]).abs() < 1e-6));
}
