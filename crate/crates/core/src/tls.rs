// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Relaxation-rate fluctuations from an ensemble of two-level systems.
//!
//! Each TLS contributes a Lorentzian centred on its frequency to the noise
//! seen by the qubit. Its frequency jumps between two configurations as a
//! symmetric telegraph process, so `γ1(t)` drifts. [`simulate_microscopic`]
//! runs that picture event by event; [`simulate_phenomenological`] produces
//! a Gaussian series with a prescribed `ω^−β` branch and white floor.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::HBAR;
use crate::series::{SeriesError, TimeSeries};
use crate::units::hz_to_rad;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TlsError {
    #[error("distribution exponent x = {0} is not normalisable (need x > -1)")]
    NonNormalisable(f64),
    #[error("invalid `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn param_err(name: &'static str, reason: impl Into<String>) -> TlsError {
    TlsError::Parameter { name, reason: reason.into() }
}

/// One two-level fluctuator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tls {
    /// Asymmetry energy, J.
    pub epsilon: f64,
    /// Tunnel splitting, J.
    pub delta_t: f64,
    /// `√(ε² + Δ²)/ħ`, rad/s.
    pub omega_tls: f64,
    /// Peak contribution to γ1 when resonant with the qubit, rad/s.
    pub coupling: f64,
    /// Full width of its Lorentzian, rad/s.
    pub linewidth: f64,
    /// Telegraph rate at the reference temperature, 1/s.
    pub switch_rate: f64,
    /// Distance between its two centre frequencies, rad/s.
    pub jump: f64,
}

impl Tls {
    /// Contribution to γ1 with the qubit at `omega_q` and the TLS centred at
    /// `centre`.
    pub fn contribution(&self, omega_q: f64, centre: f64) -> f64 {
        let h = self.linewidth / 2.0;
        let d = omega_q - centre;
        self.coupling * h * h / (h * h + d * d)
    }
}

/// Parameters of a sampled ensemble. Energies in J, rates in 1/s,
/// frequencies in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub n_tls: usize,
    /// Exponent `x` of the asymmetry density `∝ ε^x`.
    pub x_exponent: f64,
    pub epsilon_max: f64,
    /// Log-uniform range of the tunnel splitting.
    pub delta_range: (f64, f64),
    /// Log-uniform range of the switching rates.
    pub rate_decades: (f64, f64),
    /// Scale of the resonant contribution, multiplied by `Δ/E` per TLS.
    pub coupling_scale: f64,
    /// Time-averaged γ1 of the simulated series.
    pub base_gamma1: f64,
    pub linewidth: f64,
    pub jump: f64,
    /// Temperature at which the sampled switching rates apply, K.
    pub reference_temperature: f64,
    pub seed: u64,
}

impl Default for EnsembleConfig {
    /// 200 fluctuators with switching rates over 1e-5 to 1e-1 Hz, spread
    /// around a 6.92 GHz qubit.
    fn default() -> Self {
        let h = 2.0 * PI * HBAR;
        Self {
            n_tls: 200,
            x_exponent: 0.0,
            epsilon_max: h * 8e9,
            delta_range: (h * 0.5e9, h * 5e9),
            rate_decades: (1e-5, 1e-1),
            coupling_scale: hz_to_rad(4e6),
            base_gamma1: hz_to_rad(3.9e6),
            linewidth: hz_to_rad(2e9),
            jump: hz_to_rad(200e6),
            reference_temperature: 1.0,
            seed: 0,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<(), TlsError> {
        if !(self.x_exponent > -1.0) {
            return Err(TlsError::NonNormalisable(self.x_exponent));
        }
        let positive = [
            ("epsilon_max", self.epsilon_max),
            ("coupling_scale", self.coupling_scale),
            ("linewidth", self.linewidth),
            ("jump", self.jump),
            ("reference_temperature", self.reference_temperature),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(param_err(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.base_gamma1.is_finite() && self.base_gamma1 >= 0.0) {
            return Err(param_err("base_gamma1", "must be finite and >= 0"));
        }
        if self.n_tls > 0 {
            for (name, (lo, hi)) in [("delta_range", self.delta_range), ("rate_decades", self.rate_decades)] {
                if !(lo > 0.0 && hi.is_finite() && hi >= 10.0 * lo * (1.0 - 1e-12)) {
                    return Err(param_err(name, format!("must satisfy 0 < lo and hi >= 10 lo, got ({lo:e}, {hi:e})")));
                }
            }
        }
        Ok(())
    }
}

/// A sampled ensemble together with the settings needed to run it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ensemble {
    pub tls: Vec<Tls>,
    pub base_gamma1: f64,
    pub reference_temperature: f64,
}

fn log_uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi / lo).ln()).exp()
}

/// Draws `ε ∝ ε^x` on (0, ε_max], log-uniform `Δ` and switching rates.
pub fn sample_ensemble(config: &EnsembleConfig) -> Result<Ensemble, TlsError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let tls = (0..config.n_tls)
        .map(|_| {
            // 1 - u lies in (0, 1], so ε never hits zero.
            let u = 1.0 - rng.random::<f64>();
            let epsilon = config.epsilon_max * u.powf(1.0 / (config.x_exponent + 1.0));
            let delta_t = log_uniform(&mut rng, config.delta_range);
            let switch_rate = log_uniform(&mut rng, config.rate_decades);
            let energy = epsilon.hypot(delta_t);
            Tls {
                epsilon,
                delta_t,
                omega_tls: energy / HBAR,
                coupling: config.coupling_scale * delta_t / energy,
                linewidth: config.linewidth,
                switch_rate,
                jump: config.jump,
            }
        })
        .collect();
    Ok(Ensemble { tls, base_gamma1: config.base_gamma1, reference_temperature: config.reference_temperature })
}

fn sample_count(duration: f64, dt: f64) -> Result<usize, TlsError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(param_err("dt", format!("must be > 0, got {dt}")));
    }
    if !(duration.is_finite() && duration >= 10.0 * dt) {
        return Err(param_err("duration", format!("must be at least 10 dt, got {duration}")));
    }
    Ok((duration / dt).round() as usize)
}

/// Telegraph record of one TLS at the sample instants: `true` when in the
/// upper configuration.
fn telegraph(rate: f64, n: usize, dt: f64, rng: &mut ChaCha8Rng) -> Vec<bool> {
    let mut state = rng.random::<bool>();
    if rate <= 0.0 {
        return vec![state; n];
    }
    let wait = Exp::new(rate).expect("positive rate");
    let mut next = wait.sample(rng);
    (0..n)
        .map(|i| {
            let t = i as f64 * dt;
            while next <= t {
                state = !state;
                next += wait.sample(rng);
            }
            state
        })
        .collect()
}

/// Event-driven simulation of γ1(t) with the qubit at `omega_q`.
///
/// Each fluctuator adds `±½` the difference of its contributions in the two
/// configurations, so `base_gamma1` is the time-averaged rate.
/// Switching rates scale linearly with `temperature / reference_temperature`.
/// TLS `j` draws from stream `j` of a ChaCha8 generator seeded with `seed`,
/// and contributions are summed in index order, so the output does not
/// depend on the thread count.
pub fn simulate_microscopic(
    ensemble: &Ensemble,
    omega_q: f64,
    temperature: f64,
    duration: f64,
    dt: f64,
    seed: u64,
) -> Result<TimeSeries, TlsError> {
    let n = sample_count(duration, dt)?;
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(param_err("temperature", format!("must be >= 0, got {temperature}")));
    }
    let scale = temperature / ensemble.reference_temperature;
    let tracks: Vec<Vec<f64>> = ensemble
        .tls
        .par_iter()
        .enumerate()
        .map(|(j, tls)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            let half = (tls.contribution(omega_q, tls.omega_tls + tls.jump / 2.0)
                - tls.contribution(omega_q, tls.omega_tls - tls.jump / 2.0))
                / 2.0;
            telegraph(tls.switch_rate * scale, n, dt, &mut rng)
                .into_iter()
                .map(|s| if s { half } else { -half })
                .collect()
        })
        .collect();
    let mut values = vec![ensemble.base_gamma1; n];
    for track in &tracks {
        for (v, c) in values.iter_mut().zip(track) {
            *v += c;
        }
    }
    Ok(TimeSeries::new(0.0, dt, values, seed)?)
}

/// Settings of the phenomenological generator. Rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhenomenologicalConfig {
    pub mean: f64,
    /// Exponent of the low-frequency branch, in [0, 2].
    pub beta: f64,
    /// Angular frequency at which the `ω^−β` branch meets the white floor.
    pub knee: f64,
    /// Per-sample standard deviation of the white part.
    pub white_sigma: f64,
}

impl PhenomenologicalConfig {
    fn validate(&self) -> Result<(), TlsError> {
        if !(0.0..=2.0).contains(&self.beta) {
            return Err(param_err("beta", format!("must lie in [0, 2], got {}", self.beta)));
        }
        if !(self.white_sigma.is_finite() && self.white_sigma >= 0.0) {
            return Err(param_err("white_sigma", "must be finite and >= 0"));
        }
        if !(self.knee.is_finite() && self.knee > 0.0) {
            return Err(param_err("knee", "must be finite and > 0"));
        }
        if !self.mean.is_finite() {
            return Err(param_err("mean", "must be finite"));
        }
        Ok(())
    }

    /// Amplitude gain of the coloured part at DFT index `k` of `n`, relative
    /// to unit white noise.
    fn gain(&self, k: usize, n: usize, dt: f64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let f = k.min(n - k) as f64 / (n as f64 * dt);
        let f_c = self.knee / (2.0 * PI);
        self.white_sigma * (f_c / f).powf(self.beta / 2.0)
    }

    /// Expected variance of an `n`-sample output at interval `dt`.
    pub fn expected_variance(&self, n: usize, dt: f64) -> f64 {
        let coloured: f64 = (1..n).map(|k| self.gain(k, n, dt).powi(2)).sum::<f64>() / n as f64;
        coloured + self.white_sigma * self.white_sigma
    }

    /// Copy with `white_sigma` chosen so the expected total standard
    /// deviation of an `n`-sample output is `total_sigma`.
    pub fn with_total_sigma(self, total_sigma: f64, n: usize, dt: f64) -> Self {
        let unit = Self { white_sigma: 1.0, ..self };
        Self { white_sigma: total_sigma / unit.expected_variance(n, dt).sqrt(), ..self }
    }
}

/// Gaussian series whose one-sided PSD is `2σ_w² dt [(f_c/f)^β + 1]`: white
/// noise shaped in the Fourier domain plus independent white noise. The
/// sample mean is set to `mean` exactly.
pub fn simulate_phenomenological(
    config: &PhenomenologicalConfig,
    duration: f64,
    dt: f64,
    seed: u64,
) -> Result<TimeSeries, TlsError> {
    config.validate()?;
    let n = sample_count(duration, dt)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf: Vec<Complex<f64>> =
        (0..n).map(|_| Complex::new(rng.sample::<f64, _>(StandardNormal), 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, x) in buf.iter_mut().enumerate() {
        *x *= config.gain(k, n, dt);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let mut values: Vec<f64> = buf
        .iter()
        .map(|x| x.re / n as f64 + config.white_sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let m = values.iter().sum::<f64>() / n as f64;
    for v in &mut values {
        *v += config.mean - m;
    }
    Ok(TimeSeries::new(0.0, dt, values, seed)?)
}
