use std::process::Command;

use clap::Parser;
use hybrid_ww::filters::FilterSpec;
use hybrid_ww::{CombKind, Mode};
use hybrid_ww_cli::{parse_config_str, resolve_config, Args};

fn args(list: &[&str]) -> Args {
    Args::try_parse_from(std::iter::once("hybrid-ww").chain(list.iter().copied())).unwrap()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybrid-ww"))
}

#[test]
fn flags_select_filters() {
    let c = resolve_config(&args(&["--mode", "hww_ma", "--ma-k", "3"])).unwrap();
    assert_eq!(c.filter_spec(), FilterSpec::MovingAverage(3));
    let c = resolve_config(&args(&["--mode", "hww_fourier", "--fourier-cutoff", "30"])).unwrap();
    assert_eq!(c.filter_spec(), FilterSpec::FourierLowpass(30));
    let c = resolve_config(&args(&["--filter", "fourier"])).unwrap();
    assert_eq!(c.mode, Mode::HwwFourier);
    assert!(resolve_config(&args(&["--mode", "analog", "--filter", "ma"])).is_err());
}

#[test]
fn update_count_sets_even_fractions() {
    let c = resolve_config(&args(&["--u-ww", "4"])).unwrap();
    assert_eq!(c.update_fractions, vec![0.2, 0.4, 0.6, 0.8]);
    let c = resolve_config(&args(&["--fractions", "0.1,0.9"])).unwrap();
    assert_eq!(c.u_ww, 2);
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "mode = \"lww\"\nhistories_per_step = 500\nseed = 9\n[time]\nsteps = 3\n").unwrap();
    let p = path.to_str().unwrap();
    let c = resolve_config(&args(&["--config", p])).unwrap();
    assert_eq!((c.mode, c.histories_per_step, c.seed, c.time.steps), (Mode::Lww, 500, 9, 3));
    assert_eq!(c.time.dt, 1.0);
    let c = resolve_config(&args(&["--config", p, "--seed", "4", "--comb", "particle"])).unwrap();
    assert_eq!((c.seed, c.histories_per_step, c.comb), (4, 500, CombKind::Particle));
}

#[test]
fn config_typos_are_rejected() {
    assert!(parse_config_str("histories = 10").is_err());
    assert!(parse_config_str("[mesh]\ncell = 10").is_err());
    assert!(parse_config_str("theta = 0.75").is_ok());
}

#[test]
fn dry_run_prints_the_plan() {
    let out = bin().args(["--dry-run", "--mode", "hww_ma", "--histories", "400"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("hww_ma"));
    assert!(text.contains("MovingAverage(3)"));
    assert!(text.contains("updates          3 at histories 100, 200, 300"));
}

#[test]
fn invalid_input_exits_with_code_one() {
    assert_eq!(bin().args(["--theta", "0.2", "--dry-run"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().args(["--config", "/nonexistent.toml"]).output().unwrap().status.code(), Some(1));
    assert_eq!(bin().args(["--no-such-flag"]).output().unwrap().status.code(), Some(2));
}

#[test]
fn small_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["--histories", "300", "--target-pop", "300", "--batches", "5", "--mode", "hww"])
        .arg("--out")
        .arg(&out)
        .env("RUST_LOG", "warn")
        .status()
        .unwrap();
    assert!(status.success());
    for f in ["summary.csv", "run.json", "step_1.csv", "step_20.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    assert!(!out.join("INCOMPLETE").exists());
}
