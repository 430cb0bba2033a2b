// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thermoq::cli::config::RunConfig;
use thermoq::cli::{run, RunEnv};

fn sample_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/sample.json")
}

fn fixed_env() -> RunEnv {
    RunEnv { seed: None, source_date_epoch: Some("0".into()) }
}

fn thermoq(args: &[&str], env: &RunEnv) -> i32 {
    run(std::iter::once("thermoq").chain(args.iter().copied()), env)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn sample_config_is_the_default() {
    let text = fs::read_to_string(sample_config()).unwrap();
    let cfg = RunConfig::from_json(&text).unwrap();
    assert_eq!(RunConfig { seed: 0, ..cfg }, RunConfig::default());
}

#[test]
fn rates_reports_pure_dephasing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = sample_config();
    assert_eq!(thermoq(&["rates", "--config", cfg.to_str().unwrap(), "--out-dir", out], &fixed_env()), 0);
    let rates = json(&dir.path().join("rates.json"));
    let phi0 = rates["gamma_phi_0"]["hz"].as_f64().unwrap();
    assert!((phi0 / 150e3 - 1.0).abs() < 1e-12, "{phi0}");
    assert!(rates["gamma_phi_2nd_antenna_quoted"]["hz"].as_f64().unwrap() == 100.0);
}

#[test]
fn psd_fit_of_constant_series_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("const.csv");
    let mut text = String::from("time_s,gamma1_hz\n");
    for i in 0..1200 {
        text.push_str(&format!("{},3900000\n", i * 10));
    }
    fs::write(&input, text).unwrap();
    let out = dir.path().join("out");
    let code = thermoq(&["psd-fit", "--input", input.to_str().unwrap(), "--out-dir", out.to_str().unwrap()], &fixed_env());
    assert_eq!(code, 0);
    assert_eq!(json(&out.join("psd_fit.json"))["degenerate"], serde_json::Value::Bool(true));
}

#[test]
fn tls_sim_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run_into = |name: &str, seed: &str| {
        let out = dir.path().join(name);
        assert_eq!(thermoq(&["tls-sim", "--seed", seed, "--out-dir", out.to_str().unwrap()], &fixed_env()), 0);
        fs::read(out.join("tls_series.csv")).unwrap()
    };
    let a = run_into("a", "7");
    let b = run_into("b", "7");
    let c = run_into("c", "8");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let a_report = fs::read(dir.path().join("a/report.json")).unwrap();
    let b_report = fs::read(dir.path().join("b/report.json")).unwrap();
    assert_eq!(a_report, b_report);
}

#[test]
fn seed_precedence_flag_env_config() {
    let dir = tempfile::tempdir().unwrap();
    let series = |name: &str, args: &[&str], env: &RunEnv| {
        let out = dir.path().join(name);
        let mut full = vec!["tls-sim", "--model", "phenomenological", "--out-dir", out.to_str().unwrap()];
        full.extend_from_slice(args);
        assert_eq!(thermoq(&full, env), 0);
        fs::read(out.join("tls_series.csv")).unwrap()
    };
    let env9 = RunEnv { seed: Some("9".into()), ..fixed_env() };
    let from_env = series("env", &[], &env9);
    let from_flag = series("flag", &["--seed", "9"], &fixed_env());
    let flag_over_env = series("both", &["--seed", "9"], &RunEnv { seed: Some("1".into()), ..fixed_env() });
    let default = series("none", &[], &fixed_env());
    assert_eq!(from_env, from_flag);
    assert_eq!(flag_over_env, from_flag);
    assert_ne!(default, from_flag);
    let bad = RunEnv { seed: Some("nine".into()), ..fixed_env() };
    assert_eq!(thermoq(&["tls-sim", "--out-dir", dir.path().join("bad").to_str().unwrap()], &bad), 2);
}

#[test]
fn report_hashes_every_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(thermoq(&["stark-sweep", "--noise-hz", "1000", "--out-dir", out], &fixed_env()), 0);
    let input = dir.path().join("stark_sweep.csv");
    let cal = dir.path().join("cal");
    assert_eq!(thermoq(&["calibrate", "--input", input.to_str().unwrap(), "--out-dir", cal.to_str().unwrap()], &fixed_env()), 0);
    let report = json(&cal.join("report.json"));
    assert_eq!(report["command"], "calibrate");
    assert_eq!(report["timestamp"], 0);
    let outputs = report["outputs"].as_array().unwrap();
    assert_eq!(outputs.len(), 1);
    let bytes = fs::read(cal.join(outputs[0]["path"].as_str().unwrap())).unwrap();
    assert_eq!(outputs[0]["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    assert_eq!(report["inputs"].as_array().unwrap().len(), 1);
    let alpha = json(&cal.join("calibration.json"))["estimate"].as_f64().unwrap();
    assert!((alpha - 0.389).abs() < 0.01, "{alpha}");
}

#[test]
fn malformed_config_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{\n  \"circuit\": { \"g_hz\": 67e6, \"bogus\": 1 }\n}\n").unwrap();
    let code = thermoq(&["rates", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()], &fixed_env());
    assert_eq!(code, 2);
    let err = RunConfig::from_json(&fs::read_to_string(&cfg).unwrap()).unwrap_err().to_string();
    assert!(err.contains("bogus") && err.contains("line 2"), "{err}");
}

#[test]
fn malformed_csv_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("floors.csv");
    fs::write(&input, "temp_k,mu_w_per_hz\n0.05,1e-24\n0.1,oops\n").unwrap();
    let code = thermoq(&["floor-fit", "--input", input.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()], &fixed_env());
    assert_eq!(code, 2);
}

#[test]
fn unfittable_campaign_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("short.json");
    fs::write(&cfg, r#"{ "campaign": { "duration_s": 640.0, "trace_window_s": 1e-9 } }"#).unwrap();
    let args = ["campaign", "--source", "constant", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()];
    assert_eq!(thermoq(&args, &fixed_env()), 3);
}

#[test]
fn unknown_subcommand_exits_2() {
    assert_eq!(thermoq(&["frobnicate"], &fixed_env()), 2);
}

#[test]
fn sweeps_write_unit_labelled_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(thermoq(&["gamma1-sweep", "--out-dir", out], &fixed_env()), 0);
    assert_eq!(thermoq(&["dephasing-sweep", "--out-dir", out], &fixed_env()), 0);
    let g = fs::read_to_string(dir.path().join("gamma1_sweep.csv")).unwrap();
    assert!(g.starts_with("n_photons,gamma1_antenna_model_hz,gamma1_dispersive_model_hz,delta_gamma1_res_hz\n"));
    let d = fs::read_to_string(dir.path().join("dephasing_sweep.csv")).unwrap();
    let last: Vec<f64> = d.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(last[0], 1.5);
    assert!((last[1] / 7.02e3 - 1.0).abs() < 0.01, "{}", last[1]);
}
