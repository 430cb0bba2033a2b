// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! The `thermoq` command line.
//!
//! Every subcommand reads an optional JSON config, writes its outputs into an
//! output directory and finishes with `report.json`, which lists each emitted
//! file with its SHA-256. Outputs depend only on config, inputs and seed.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid config or input, 3 fit
//! failure.

pub mod config;
pub mod io;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cavity::{calibrate_attenuation, CalibrationTarget, CavityError, PortLabel, StarkModel, StarkSweepPoint};
use crate::decoherence::{
    component_rates, dephasing_first_order, dephasing_second_order, delta_gamma1_res, gamma1_antenna_model,
    gamma1_dispersive_model, rate_budget, DecoherenceError, FluxPoint,
};
use crate::experiments::{simulate_campaign, ConstantGamma1, ExperimentError, Gamma1Source};
use crate::fitting::FitError;
use crate::series::TimeSeries;
use crate::spectral::{fit_knee_spectrum, fit_white_floor_vs_temp, psd_estimate, SpectralError, Spectrum, SpectrumFit, CONVENTION_NOTE};
use crate::tls::{sample_ensemble, simulate_microscopic, simulate_phenomenological, PhenomenologicalConfig, TlsError};
use crate::units::{hz_to_rad, linear_to_db_loss, rad_to_hz};

use config::{Resolved, RunConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Fit(_) => 3,
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        CliError::Fit(e.to_string())
    }
}

impl From<CavityError> for CliError {
    fn from(e: CavityError) -> Self {
        match e {
            CavityError::Fit(_) => CliError::Fit(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<DecoherenceError> for CliError {
    fn from(e: DecoherenceError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::Fit(_) => CliError::Fit(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<TlsError> for CliError {
    fn from(e: TlsError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Fit(_)
            | ExperimentError::NoDecay { .. }
            | ExperimentError::ShortWindow(_)
            | ExperimentError::EmptyCampaign => CliError::Fit(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "thermoq", version, about = "Thermal-field decoherence model of a flux-tunable transmon")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON run configuration; the characterised sample when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` from the config.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Run seed; overrides THERMOQ_SEED and the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Attenuation,
    AntennaCoupling,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TlsModel {
    Microscopic,
    Phenomenological,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CampaignSource {
    Tls,
    Phenomenological,
    Constant,
}

/// Settings of the phenomenological generator, in Hz.
#[derive(Debug, Clone, Args)]
pub struct PhenoArgs {
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub knee_hz: f64,
    /// Total standard deviation of the series.
    #[arg(long, default_value_t = 215e3)]
    pub sigma_hz: f64,
    /// Mean of the series; γ1 of the circuit when omitted.
    #[arg(long)]
    pub mean_hz: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relaxation and dephasing budget as JSON.
    Rates(Common),
    /// Synthetic ac-Stark shift versus attenuator temperature.
    StarkSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "readout")]
        port: PortLabel,
        /// Line transmission; the configured port attenuation when omitted.
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        t_min: f64,
        #[arg(long, default_value_t = 1.5)]
        t_max: f64,
        #[arg(long, default_value_t = 30)]
        points: usize,
        /// Gaussian noise on each shift.
        #[arg(long, default_value_t = 0.0)]
        noise_hz: f64,
    },
    /// Fit α or κ_a to a Stark sweep.
    Calibrate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "attenuation")]
        target: Target,
        /// Line transmission for an antenna-coupling fit; the configured
        /// antenna attenuation when omitted.
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// γ1 versus photon number for the antenna and dispersive models.
    Gamma1Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.0)]
        n_max: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
    /// Flux-noise dephasing versus antenna temperature.
    DephasingSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.05)]
        t_min: f64,
        #[arg(long, default_value_t = 1.5)]
        t_max: f64,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Flux operating point for the first-order column.
        #[arg(long, default_value_t = 0.25, allow_hyphen_values = true)]
        lambda: f64,
    },
    /// γ1(t) from a fluctuator ensemble or the phenomenological generator.
    TlsSim {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "microscopic")]
        model: TlsModel,
        /// K; the campaign temperature when omitted.
        #[arg(long)]
        temperature: Option<f64>,
        #[arg(long, default_value_t = 12_000.0)]
        duration: f64,
        #[arg(long, default_value_t = 10.0)]
        dt: f64,
        #[command(flatten)]
        pheno: PhenoArgs,
    },
    /// Log-binned PSD and knee fit of a γ1 series.
    PsdFit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// White-floor scaling μ(T) = μ0 + a T^(2+x).
    FloorFit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
    },
    /// Long-time relaxation campaign followed by the PSD analysis.
    Campaign {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "tls")]
        source: CampaignSource,
        #[command(flatten)]
        pheno: PhenoArgs,
    },
}

/// Process environment consulted by [`run`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunEnv {
    /// THERMOQ_SEED
    pub seed: Option<String>,
    /// SOURCE_DATE_EPOCH
    pub source_date_epoch: Option<String>,
}

impl RunEnv {
    pub fn from_process() -> Self {
        Self {
            seed: std::env::var("THERMOQ_SEED").ok(),
            source_date_epoch: std::env::var("SOURCE_DATE_EPOCH").ok(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub version: String,
    /// Seconds since the Unix epoch; SOURCE_DATE_EPOCH when set.
    pub timestamp: u64,
    pub seed: u64,
    pub parameters: serde_json::Value,
    /// SHA-256 over the config file, the input files and the parameters.
    pub inputs_digest: String,
    pub inputs: Vec<FileEntry>,
    pub outputs: Vec<FileEntry>,
    pub warnings: Vec<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects outputs of one run and writes the report.
struct Session {
    out_dir: PathBuf,
    resolved: Resolved,
    config_bytes: Vec<u8>,
    inputs: Vec<(String, Vec<u8>)>,
    outputs: Vec<FileEntry>,
    warnings: Vec<String>,
}

impl Session {
    fn read_input(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.inputs.push((path.display().to_string(), bytes.clone()));
        Ok(bytes)
    }

    fn emit(&mut self, name: &str, bytes: Vec<u8>) -> Result<(), CliError> {
        let path = self.out_dir.join(name);
        fs::write(&path, &bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        self.outputs.push(FileEntry { path: name.to_string(), sha256: sha256_hex(&bytes), bytes: bytes.len() });
        Ok(())
    }

    fn emit_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        bytes.push(b'\n');
        self.emit(name, bytes)
    }

    fn emit_with(&mut self, name: &str, write: impl FnOnce(&mut Vec<u8>) -> Result<(), CliError>) -> Result<(), CliError> {
        let mut bytes = Vec::new();
        write(&mut bytes)?;
        self.emit(name, bytes)
    }

    fn finish(self, command: &str, parameters: serde_json::Value, env: &RunEnv) -> Result<(), CliError> {
        let mut hasher = Sha256::new();
        hasher.update(&self.config_bytes);
        for (_, bytes) in &self.inputs {
            hasher.update(bytes);
        }
        hasher.update(parameters.to_string().as_bytes());
        let timestamp = match &env.source_date_epoch {
            Some(s) => s.trim().parse().map_err(|_| CliError::Validation(format!("SOURCE_DATE_EPOCH `{s}` is not an integer")))?,
            None => std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        };
        let mut warnings = self.resolved.warnings.clone();
        warnings.extend(self.warnings);
        let report = Report {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
            seed: self.resolved.seed,
            parameters,
            inputs_digest: hex::encode(hasher.finalize()),
            inputs: self
                .inputs
                .iter()
                .map(|(p, b)| FileEntry { path: p.clone(), sha256: sha256_hex(b), bytes: b.len() })
                .collect(),
            outputs: self.outputs,
            warnings,
        };
        let bytes = serde_json::to_vec_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
        let path = self.out_dir.join("report.json");
        fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(())
    }
}

fn open_session(common: &Common, env: &RunEnv) -> Result<Session, CliError> {
    let (config, config_bytes) = match &common.config {
        Some(path) => {
            let bytes = fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let text = std::str::from_utf8(&bytes).map_err(|e| CliError::Validation(format!("config: {e}")))?;
            (RunConfig::from_json(text)?, bytes)
        }
        None => (RunConfig::default(), Vec::new()),
    };
    let seed = match (common.seed, &env.seed) {
        (Some(s), _) => s,
        (None, Some(s)) => s.trim().parse().map_err(|_| CliError::Validation(format!("THERMOQ_SEED `{s}` is not a u64")))?,
        (None, None) => config.seed,
    };
    let resolved = config.resolve(seed)?;
    let out_dir = common.out_dir.clone().or(config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    Ok(Session { out_dir, resolved, config_bytes, inputs: Vec::new(), outputs: Vec::new(), warnings: Vec::new() })
}

fn grid(lo: f64, hi: f64, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    if n < 2 || !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(CliError::Validation(format!("{what}: need >= 2 points on an increasing range, got {n} on [{lo}, {hi}]")));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

/// Knee-fit result in file units.
#[derive(Debug, Clone, Serialize)]
pub struct PsdFitOutput {
    pub beta: Option<f64>,
    pub beta_err: Option<f64>,
    pub knee_hz: Option<f64>,
    pub knee_hz_err: Option<f64>,
    pub mu_w_per_hz: f64,
    pub mu_err_w_per_hz: f64,
    /// Coefficient of `ω^−β` with ω in rad/s.
    pub amplitude: Option<f64>,
    pub amplitude_err: Option<f64>,
    pub fit_window_hz: (f64, f64),
    pub degenerate: bool,
    pub notes: Vec<String>,
    pub convention: String,
}

impl From<&SpectrumFit> for PsdFitOutput {
    fn from(f: &SpectrumFit) -> Self {
        Self {
            beta: f.beta,
            beta_err: f.beta_err,
            knee_hz: f.omega_c.map(rad_to_hz),
            knee_hz_err: f.omega_c_err.map(rad_to_hz),
            mu_w_per_hz: f.mu,
            mu_err_w_per_hz: f.mu_err,
            amplitude: f.amplitude,
            amplitude_err: f.amplitude_err,
            fit_window_hz: (rad_to_hz(f.fit_window.0), rad_to_hz(f.fit_window.1)),
            degenerate: f.degenerate,
            notes: f.notes.clone(),
            convention: CONVENTION_NOTE.to_string(),
        }
    }
}

fn phenomenological(pheno: &PhenoArgs, r: &Resolved, n: usize, dt: f64) -> Result<PhenomenologicalConfig, CliError> {
    if !(pheno.sigma_hz.is_finite() && pheno.sigma_hz >= 0.0) {
        return Err(CliError::Validation(format!("--sigma-hz must be >= 0, got {}", pheno.sigma_hz)));
    }
    let base = PhenomenologicalConfig {
        mean: pheno.mean_hz.map_or(r.params.gamma1_0, hz_to_rad),
        beta: pheno.beta,
        knee: hz_to_rad(pheno.knee_hz),
        white_sigma: 1.0,
    };
    Ok(base.with_total_sigma(hz_to_rad(pheno.sigma_hz), n, dt))
}

fn pheno_json(p: &PhenoArgs) -> serde_json::Value {
    json!({ "beta": p.beta, "knee_hz": p.knee_hz, "sigma_hz": p.sigma_hz, "mean_hz": p.mean_hz })
}

fn analyse(session: &mut Session, series: &TimeSeries, prefix: &str) -> Result<SpectrumFit, CliError> {
    let spectrum: Spectrum = psd_estimate(series)?;
    let fit = fit_knee_spectrum(&spectrum)?;
    session.emit_with(&format!("{prefix}spectrum.csv"), |b| io::write_spectrum(b, &spectrum))?;
    session.emit_json(&format!("{prefix}psd_fit.json"), &PsdFitOutput::from(&fit))?;
    Ok(fit)
}

fn execute(command: Command, env: &RunEnv) -> Result<(), CliError> {
    match command {
        Command::Rates(common) => {
            let mut s = open_session(&common, env)?;
            let r = &s.resolved;
            let budget = rate_budget(&r.params, &r.geometry, &r.budget)?;
            let text = serde_json::to_string_pretty(&budget).map_err(|e| CliError::Io(e.to_string()))?;
            println!("{text}");
            s.emit_json("rates.json", &budget)?;
            s.finish("rates", json!({}), env)
        }
        Command::StarkSweep { common, port, alpha, t_min, t_max, points, noise_hz } => {
            let mut s = open_session(&common, env)?;
            let r = &s.resolved;
            let alpha = match alpha {
                Some(a) => a,
                None => r.port(port)?.attenuation,
            };
            let temps = grid(t_min, t_max, points, "temperature grid")?;
            let model = StarkModel::new(&r.params, port, alpha, 0.0)?;
            let sweep = model.sweep(&temps, hz_to_rad(noise_hz), r.seeds.measurement)?;
            let rows: Vec<(f64, f64)> = sweep.iter().map(|p| (p.temperature, rad_to_hz(p.delta_omega_q))).collect();
            s.emit_with("stark_sweep.csv", |b| io::write_pairs(b, &io::STARK_HEADER, &rows))?;
            let params = json!({ "port": port.to_string(), "alpha": alpha, "t_min": t_min, "t_max": t_max, "points": points, "noise_hz": noise_hz });
            s.finish("stark-sweep", params, env)
        }
        Command::Calibrate { common, input, target, alpha } => {
            let mut s = open_session(&common, env)?;
            let bytes = s.read_input(&input)?;
            let rows = io::read_pairs(bytes.as_slice(), &io::STARK_HEADER)?;
            let sweep = rows
                .iter()
                .enumerate()
                .map(|(i, &(t, f))| {
                    StarkSweepPoint::new(t, hz_to_rad(f)).map_err(|e| CliError::Validation(format!("csv row {}: {e}", i + 2)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let r = &s.resolved;
            let target = match target {
                Target::Attenuation => CalibrationTarget::Attenuation,
                Target::AntennaCoupling => CalibrationTarget::AntennaCoupling {
                    alpha: match alpha {
                        Some(a) => a,
                        None => r.port(PortLabel::Antenna)?.attenuation,
                    },
                },
            };
            let fit = calibrate_attenuation(&sweep, target, &r.params)?;
            let (estimate, std_err, db) = match target {
                CalibrationTarget::Attenuation => (fit.estimate, fit.std_err, Some(linear_to_db_loss(fit.estimate))),
                CalibrationTarget::AntennaCoupling { .. } => (rad_to_hz(fit.estimate), rad_to_hz(fit.std_err), None),
            };
            let out = json!({
                "port": fit.port.to_string(),
                "parameter": if db.is_some() { "alpha" } else { "kappa_a_hz" },
                "estimate": estimate,
                "std_err": std_err,
                "attenuation_db": db,
                "intercept_hz": rad_to_hz(fit.intercept),
                "intercept_std_err_hz": rad_to_hz(fit.intercept_std_err),
                "residual_norm_hz": rad_to_hz(fit.residual_norm),
                "iterations": fit.fit.n_iterations,
                "converged": fit.fit.converged,
            });
            s.emit_json("calibration.json", &out)?;
            s.finish("calibrate", json!({ "target": format!("{target:?}") }), env)
        }
        Command::Gamma1Sweep { common, n_max, points } => {
            let mut s = open_session(&common, env)?;
            let r = &s.resolved;
            let ns = grid(0.0, n_max, points, "photon grid")?;
            let rates = component_rates(&r.params, r.budget.s_delta)?;
            let mut rows = Vec::with_capacity(ns.len());
            for &n in &ns {
                rows.push(vec![
                    n,
                    rad_to_hz(gamma1_antenna_model(n, r.params.gamma1_0, r.params.gamma1_antenna)?),
                    rad_to_hz(gamma1_dispersive_model(n, 0.0, &rates, r.params.gamma1_0)?),
                    rad_to_hz(delta_gamma1_res(n, &rates)?),
                ]);
            }
            let header = ["n_photons", "gamma1_antenna_model_hz", "gamma1_dispersive_model_hz", "delta_gamma1_res_hz"];
            s.emit_with("gamma1_sweep.csv", |b| io::write_table(b, &header, rows))?;
            s.finish("gamma1-sweep", json!({ "n_max": n_max, "points": points }), env)
        }
        Command::DephasingSweep { common, t_min, t_max, points, lambda } => {
            let mut s = open_session(&common, env)?;
            let r = &s.resolved;
            let temps = grid(t_min, t_max, points, "temperature grid")?;
            let flux = FluxPoint::new(lambda)?;
            let mut rows = Vec::with_capacity(temps.len());
            for &t in &temps {
                rows.push(vec![
                    t,
                    rad_to_hz(dephasing_second_order(t, &r.geometry)?),
                    rad_to_hz(dephasing_first_order(t, flux, &r.geometry, r.params.omega_q0)?.rate),
                ]);
            }
            let header = ["temp_k", "gamma_phi_2nd_hz", "gamma_phi_1st_hz"];
            s.emit_with("dephasing_sweep.csv", |b| io::write_table(b, &header, rows))?;
            s.finish("dephasing-sweep", json!({ "t_min": t_min, "t_max": t_max, "points": points, "lambda": lambda }), env)
        }
        Command::TlsSim { common, model, temperature, duration, dt, pheno } => {
            let mut s = open_session(&common, env)?;
            let r = &s.resolved;
            let temperature = temperature.unwrap_or(r.campaign.temperature);
            let series = match model {
                TlsModel::Microscopic => {
                    let ensemble = sample_ensemble(&r.ensemble)?;
                    simulate_microscopic(&ensemble, r.params.omega_q0, temperature, duration, dt, r.seeds.dynamics)?
                }
                TlsModel::Phenomenological => {
                    let n = (duration / dt).round() as usize;
                    let cfg = phenomenological(&pheno, r, n, dt)?;
                    simulate_phenomenological(&cfg, duration, dt, r.seeds.dynamics)?
                }
            };
            s.emit_with("tls_series.csv", |b| io::write_series(b, &series))?;
            let mut params = json!({ "model": format!("{model:?}"), "temperature": temperature, "duration": duration, "dt": dt });
            if model == TlsModel::Phenomenological {
                params["phenomenological"] = pheno_json(&pheno);
            }
            s.finish("tls-sim", params, env)
        }
        Command::PsdFit { common, input } => {
            let mut s = open_session(&common, env)?;
            let bytes = s.read_input(&input)?;
            let series = io::read_series(bytes.as_slice())?;
            let fit = analyse(&mut s, &series, "")?;
            if fit.degenerate {
                s.warnings.push("knee fit is degenerate: spectrum consistent with white noise".into());
            }
            s.finish("psd-fit", json!({}), env)
        }
        Command::FloorFit { common, input } => {
            let mut s = open_session(&common, env)?;
            let bytes = s.read_input(&input)?;
            let rows = io::read_pairs(bytes.as_slice(), &io::FLOOR_HEADER)?;
            let fit = fit_white_floor_vs_temp(&rows)?;
            s.emit_json("floor_fit.json", &fit)?;
            s.finish("floor-fit", json!({}), env)
        }
        Command::Campaign { common, source, pheno } => {
            let mut s = open_session(&common, env)?;
            let r = s.resolved.clone();
            let cfg = r.campaign;
            let dt = 1.0 / cfg.point_rate;
            let n = cfg.n_ticks();
            let mut truth_source: Box<dyn Gamma1Source> = match source {
                CampaignSource::Constant => Box::new(ConstantGamma1(r.params.gamma1_0)),
                CampaignSource::Tls => {
                    let ensemble = sample_ensemble(&r.ensemble)?;
                    Box::new(simulate_microscopic(&ensemble, r.params.omega_q0, cfg.temperature, n as f64 * dt, dt, r.seeds.dynamics)?)
                }
                CampaignSource::Phenomenological => {
                    let p = phenomenological(&pheno, &r, n, dt)?;
                    Box::new(simulate_phenomenological(&p, n as f64 * dt, dt, r.seeds.dynamics)?)
                }
            };
            let out = simulate_campaign(&cfg, truth_source.as_mut())?;
            if out.gaps() > 0 {
                s.warnings.push(format!("{} of {} ticks failed to fit and were interpolated", out.gaps(), n));
            }
            let fitted = out.series()?;
            let truth = TimeSeries::new(0.0, dt, out.truth.clone(), r.seed).map_err(|e| CliError::Validation(e.to_string()))?;
            s.emit_with("campaign_series.csv", |b| io::write_series(b, &fitted))?;
            s.emit_with("campaign_truth.csv", |b| io::write_series(b, &truth))?;
            let fit = analyse(&mut s, &fitted, "campaign_")?;
            let summary = json!({
                "ticks": n,
                "gaps": out.gaps(),
                "fitted_mean_hz": rad_to_hz(fitted.mean()),
                "fitted_std_hz": rad_to_hz(fitted.std_dev()),
                "truth_mean_hz": rad_to_hz(truth.mean()),
                "truth_std_hz": rad_to_hz(truth.std_dev()),
                "degenerate": fit.degenerate,
            });
            s.emit_json("campaign_summary.json", &summary)?;
            let mut params = json!({ "source": format!("{source:?}") });
            if source == CampaignSource::Phenomenological {
                params["phenomenological"] = pheno_json(&pheno);
            }
            s.finish("campaign", params, env)
        }
    }
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code.
pub fn run<I, T>(args: I, env: &RunEnv) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command, env) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
