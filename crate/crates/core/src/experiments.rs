// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Synthetic pulse-sequence data and the long-time relaxation campaign.
//!
//! Traces are excited-state probabilities versus delay for relaxation,
//! Ramsey and spin-echo sequences, with binomial shot noise from a finite
//! number of repetitions. A campaign samples a γ1 source once per tick,
//! simulates and fits a relaxation trace, and records the fitted rate.

use std::fmt;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitting::{least_squares, FitError, FitOptions, FitResult, FnProblem};
use crate::series::{SeriesError, TimeSeries};
use crate::units::hz_to_rad;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("invalid `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("trace needs >= 8 points, got {0}")]
    TooFewPoints(usize),
    #[error("no decay: fitted rate {rate:.4e} is within 2 sigma ({std_err:.4e}) of zero")]
    NoDecay { rate: f64, std_err: f64 },
    #[error("trace covers only {0:.2} decay constants; at least 1.5 are needed")]
    ShortWindow(f64),
    #[error("trace fit failed: {0}")]
    Fit(#[from] FitError),
    #[error("every campaign tick failed to fit")]
    EmptyCampaign,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

fn param_err(name: &'static str, reason: impl Into<String>) -> ExperimentError {
    ExperimentError::Parameter { name, reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceKind {
    Relaxation,
    Ramsey,
    Echo,
}

impl fmt::Display for TraceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            TraceKind::Relaxation => "relaxation",
            TraceKind::Ramsey => "ramsey",
            TraceKind::Echo => "echo",
        })
    }
}

/// Ramsey detuning used when none is given, rad/s.
pub fn default_ramsey_detuning() -> f64 {
    hz_to_rad(5e6)
}

/// Ideal excited-state probability at delay `t`.
pub fn trace_model(kind: TraceKind, rate: f64, detuning: f64, t: f64) -> f64 {
    let decay = (-rate * t).exp();
    match kind {
        TraceKind::Relaxation => decay,
        TraceKind::Ramsey => 0.5 + 0.5 * decay * (detuning * t).cos(),
        TraceKind::Echo => 0.5 + 0.5 * decay,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentTrace {
    pub kind: TraceKind,
    /// s, ascending from 0.
    pub times: Vec<f64>,
    pub p_e: Vec<f64>,
    /// rad/s, Ramsey only.
    pub detuning: Option<f64>,
    /// Repetitions per point; `None` for noiseless traces.
    pub n_averages: Option<u64>,
}

fn validate_times(times: &[f64]) -> Result<(), ExperimentError> {
    if times.first().is_some_and(|&t| t != 0.0) {
        return Err(param_err("times", "must start at 0"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().any(|t| !t.is_finite()) {
        return Err(param_err("times", "must be finite and strictly ascending"));
    }
    Ok(())
}

/// Trace with binomial shot noise drawn from `rng`.
pub fn simulate_trace_with(
    kind: TraceKind,
    rate: f64,
    detuning: f64,
    times: &[f64],
    n_averages: Option<u64>,
    rng: &mut ChaCha8Rng,
) -> Result<ExperimentTrace, ExperimentError> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(param_err("rate", format!("must be > 0, got {rate}")));
    }
    validate_times(times)?;
    if n_averages == Some(0) {
        return Err(param_err("n_averages", "must be > 0"));
    }
    let mut p_e = Vec::with_capacity(times.len());
    for &t in times {
        let p = trace_model(kind, rate, detuning, t).clamp(0.0, 1.0);
        p_e.push(match n_averages {
            None => p,
            Some(n) => {
                let k = Binomial::new(n, p).map_err(|e| param_err("p_e", e.to_string()))?.sample(rng);
                k as f64 / n as f64
            }
        });
    }
    Ok(ExperimentTrace {
        kind,
        times: times.to_vec(),
        p_e,
        detuning: (kind == TraceKind::Ramsey).then_some(detuning),
        n_averages,
    })
}

/// Trace with shot noise from a generator seeded with `seed`.
pub fn simulate_trace(
    kind: TraceKind,
    rate: f64,
    detuning: f64,
    times: &[f64],
    n_averages: Option<u64>,
    seed: u64,
) -> Result<ExperimentTrace, ExperimentError> {
    simulate_trace_with(kind, rate, detuning, times, n_averages, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `n` delays evenly spaced on [0, window].
pub fn linear_times(n: usize, window: f64) -> Vec<f64> {
    (0..n).map(|i| window * i as f64 / (n - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceFit {
    pub kind: TraceKind,
    /// rad/s
    pub rate: f64,
    pub rate_err: f64,
    /// rad/s, Ramsey only.
    pub detuning: Option<f64>,
    pub detuning_err: Option<f64>,
    pub amplitude: f64,
    pub offset: f64,
    #[serde(skip)]
    pub fit: FitResult,
}

/// Least-squares fit of the decay model matching the trace kind:
/// `A e^{−γt} + B`, or `B + A e^{−γt} cos(Δt)` for Ramsey.
pub fn fit_trace(trace: &ExperimentTrace) -> Result<TraceFit, ExperimentError> {
    let n = trace.times.len();
    if n < 8 {
        return Err(ExperimentError::TooFewPoints(n));
    }
    if trace.p_e.len() != n {
        return Err(param_err("p_e", "one probability per delay"));
    }
    validate_times(&trace.times)?;
    // Work in units of the window so the rate is O(1).
    let span = trace.times[n - 1];
    let tau: Vec<f64> = trace.times.iter().map(|t| t / span).collect();
    let y = &trace.p_e;

    let tail = &y[n - n / 4..];
    let offset0 = tail.iter().sum::<f64>() / tail.len() as f64;
    let amplitude0 = y[0] - offset0;
    let rate0 = {
        let target = (-1.0f64).exp();
        let crossing = (1..n).find(|&i| ((y[i] - offset0) / amplitude0).abs() < target);
        crossing.map_or(3.0, |i| 1.0 / tau[i])
    };

    let ramsey = trace.kind == TraceKind::Ramsey;
    let fit = if ramsey {
        let detuning0 = trace.detuning.unwrap_or_else(default_ramsey_detuning) * span;
        let problem = FnProblem::new(&["rate", "amplitude", "offset", "detuning"], |p: &[f64]| {
            tau.iter().zip(y).map(|(&t, &yi)| p[2] + p[1] * (-p[0] * t).exp() * (p[3] * t).cos() - yi).collect()
        })
        .with_jacobian(|p: &[f64]| {
            let mut j = DMatrix::zeros(tau.len(), 4);
            for (r, &t) in tau.iter().enumerate() {
                let e = (-p[0] * t).exp();
                let (s, c) = (p[3] * t).sin_cos();
                j[(r, 0)] = -t * p[1] * e * c;
                j[(r, 1)] = e * c;
                j[(r, 2)] = 1.0;
                j[(r, 3)] = -t * p[1] * e * s;
            }
            j
        });
        least_squares(&problem, &[rate0, amplitude0, offset0, detuning0], &FitOptions::default())?
    } else {
        let problem = FnProblem::new(&["rate", "amplitude", "offset"], |p: &[f64]| {
            tau.iter().zip(y).map(|(&t, &yi)| p[2] + p[1] * (-p[0] * t).exp() - yi).collect()
        })
        .with_jacobian(|p: &[f64]| {
            let mut j = DMatrix::zeros(tau.len(), 3);
            for (r, &t) in tau.iter().enumerate() {
                let e = (-p[0] * t).exp();
                j[(r, 0)] = -t * p[1] * e;
                j[(r, 1)] = e;
                j[(r, 2)] = 1.0;
            }
            j
        });
        least_squares(&problem, &[rate0, amplitude0, offset0], &FitOptions::default())?
    };

    let errs = fit.std_errs();
    let (rate, rate_err) = (fit.values[0] / span, errs[0] / span);
    if !(rate > 2.0 * rate_err) {
        return Err(ExperimentError::NoDecay { rate, std_err: rate_err });
    }
    if rate * span < 1.5 {
        return Err(ExperimentError::ShortWindow(rate * span));
    }
    Ok(TraceFit {
        kind: trace.kind,
        rate,
        rate_err,
        detuning: ramsey.then(|| fit.values[3] / span),
        detuning_err: ramsey.then(|| errs[3] / span),
        amplitude: fit.values[1],
        offset: fit.values[2],
        fit,
    })
}

/// Long-time relaxation measurement protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    /// Hz
    pub point_rate: f64,
    /// s
    pub duration: f64,
    pub n_averages: u64,
    /// Attenuator temperature, K. Recorded with the run; the γ1 source owns
    /// any temperature dependence.
    pub temperature: f64,
    pub seed: u64,
    #[serde(default = "CampaignConfig::default_trace_points")]
    pub trace_points: usize,
    /// Longest relaxation delay, s.
    #[serde(default = "CampaignConfig::default_trace_window")]
    pub trace_window: f64,
}

impl CampaignConfig {
    fn default_trace_points() -> usize {
        41
    }

    fn default_trace_window() -> f64 {
        200e-9
    }

    pub fn n_ticks(&self) -> usize {
        (self.duration * self.point_rate).round() as usize
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(self.point_rate.is_finite() && self.point_rate > 0.0) {
            return Err(param_err("point_rate", "must be > 0"));
        }
        if !(self.duration.is_finite() && self.duration * self.point_rate >= 64.0 - 1e-9) {
            return Err(param_err("duration", "duration * point_rate must be >= 64"));
        }
        if self.n_averages == 0 {
            return Err(param_err("n_averages", "must be > 0"));
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(param_err("temperature", "must be >= 0"));
        }
        if self.trace_points < 8 {
            return Err(param_err("trace_points", "must be >= 8"));
        }
        if !(self.trace_window.is_finite() && self.trace_window > 0.0) {
            return Err(param_err("trace_window", "must be > 0"));
        }
        Ok(())
    }
}

impl Default for CampaignConfig {
    /// 200 min at 0.1 Hz with 4e5 repetitions per point.
    fn default() -> Self {
        Self {
            point_rate: 0.1,
            duration: 12_000.0,
            n_averages: 400_000,
            temperature: 0.05,
            seed: 0,
            trace_points: Self::default_trace_points(),
            trace_window: Self::default_trace_window(),
        }
    }
}

/// True γ1 (rad/s) at campaign time `t`.
pub trait Gamma1Source {
    fn gamma1(&mut self, t: f64) -> f64;
}

/// A fixed relaxation rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantGamma1(pub f64);

impl Gamma1Source for ConstantGamma1 {
    fn gamma1(&mut self, _t: f64) -> f64 {
        self.0
    }
}

/// Linear interpolation of a recorded series, held constant past its ends.
impl Gamma1Source for TimeSeries {
    fn gamma1(&mut self, t: f64) -> f64 {
        let x = (t - self.t0) / self.dt;
        if x <= 0.0 {
            return self.values[0];
        }
        let i = x.floor() as usize;
        if i + 1 >= self.len() {
            return self.values[self.len() - 1];
        }
        let w = x - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }
}

/// Fitted rates of a campaign, one per tick.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignOutput {
    /// Fitted γ1 per tick (rad/s); `None` where the fit failed.
    pub fitted: Vec<Option<f64>>,
    /// True γ1 per tick, rad/s.
    pub truth: Vec<f64>,
    pub dt: f64,
    pub seed: u64,
}

impl CampaignOutput {
    pub fn gaps(&self) -> usize {
        self.fitted.iter().filter(|v| v.is_none()).count()
    }

    /// Fitted rates with gaps filled by linear interpolation between the
    /// neighbouring fits (nearest fit at the ends).
    pub fn series(&self) -> Result<TimeSeries, ExperimentError> {
        let known: Vec<(usize, f64)> = self.fitted.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect();
        if known.is_empty() {
            return Err(ExperimentError::EmptyCampaign);
        }
        let mut values = Vec::with_capacity(self.fitted.len());
        let mut k = 0;
        for i in 0..self.fitted.len() {
            while k + 1 < known.len() && known[k + 1].0 <= i {
                k += 1;
            }
            let (i0, v0) = known[k];
            let v = if i <= i0 || k + 1 == known.len() {
                v0
            } else {
                let (i1, v1) = known[k + 1];
                v0 + (v1 - v0) * (i - i0) as f64 / (i1 - i0) as f64
            };
            values.push(v);
        }
        Ok(TimeSeries::new(0.0, self.dt, values, self.seed)?)
    }
}

/// Runs the campaign. Tick `i` uses stream `i` of a ChaCha8 generator seeded
/// with the campaign seed. Ticks run in order because the source may be
/// stateful.
pub fn simulate_campaign(config: &CampaignConfig, source: &mut dyn Gamma1Source) -> Result<CampaignOutput, ExperimentError> {
    config.validate()?;
    let n = config.n_ticks();
    let dt = 1.0 / config.point_rate;
    let times = linear_times(config.trace_points, config.trace_window);
    let mut fitted = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(n);
    for i in 0..n {
        let gamma1 = source.gamma1(i as f64 * dt);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(i as u64);
        let trace = simulate_trace_with(TraceKind::Relaxation, gamma1, 0.0, &times, Some(config.n_averages), &mut rng)?;
        fitted.push(fit_trace(&trace).ok().map(|f| f.rate));
        truth.push(gamma1);
    }
    Ok(CampaignOutput { fitted, truth, dt, seed: config.seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::rad_to_hz;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn g1() -> f64 {
        hz_to_rad(3.9e6)
    }

    #[test]
    fn model_examples() {
        assert_relative_eq!(trace_model(TraceKind::Relaxation, g1(), 0.0, 1.0 / g1()), (-1.0f64).exp(), max_relative = 1e-15);
        assert_eq!(trace_model(TraceKind::Ramsey, g1(), default_ramsey_detuning(), 0.0), 1.0);
        assert_eq!(trace_model(TraceKind::Echo, g1(), 0.0, 0.0), 1.0);
        let envelope = 1.0 / hz_to_rad(2.1e6);
        assert_relative_eq!(envelope, 75.8e-9, max_relative = 1e-3);
    }

    #[test]
    fn simulate_trace_validates() {
        let t = linear_times(10, 1e-6);
        assert!(simulate_trace(TraceKind::Echo, 0.0, 0.0, &t, None, 0).is_err());
        assert!(simulate_trace(TraceKind::Echo, 1e6, 0.0, &[1.0, 2.0], None, 0).is_err());
        assert!(simulate_trace(TraceKind::Echo, 1e6, 0.0, &t, Some(0), 0).is_err());
        let tr = simulate_trace(TraceKind::Relaxation, 1e7, 0.0, &t, Some(100), 4).unwrap();
        assert!(tr.p_e.iter().all(|p| (0.0..=1.0).contains(p)));
        assert_eq!(tr, simulate_trace(TraceKind::Relaxation, 1e7, 0.0, &t, Some(100), 4).unwrap());
    }

    #[test]
    fn noiseless_round_trip_for_every_kind() {
        let times = linear_times(41, 600e-9);
        for (kind, rate) in [
            (TraceKind::Relaxation, hz_to_rad(3.9e6)),
            (TraceKind::Ramsey, hz_to_rad(2.1e6)),
            (TraceKind::Echo, hz_to_rad(1.9e6)),
        ] {
            let tr = simulate_trace(kind, rate, default_ramsey_detuning(), &times, None, 0).unwrap();
            let f = fit_trace(&tr).unwrap();
            assert_relative_eq!(f.rate, rate, max_relative = 1e-6);
            if kind == TraceKind::Ramsey {
                assert_relative_eq!(f.detuning.unwrap(), default_ramsey_detuning(), max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn shot_noise_recovery_within_five_percent() {
        let times = linear_times(41, 200e-9);
        for seed in 0..50 {
            let tr = simulate_trace(TraceKind::Relaxation, g1(), 0.0, &times, Some(400_000), seed).unwrap();
            let f = fit_trace(&tr).unwrap();
            assert!((f.rate / g1() - 1.0).abs() < 0.05, "seed {seed}: {}", rad_to_hz(f.rate));
        }
    }

    #[test]
    fn echo_fits_below_ramsey() {
        let times = linear_times(61, 1e-6);
        let ramsey = simulate_trace(TraceKind::Ramsey, hz_to_rad(2.1e6), default_ramsey_detuning(), &times, Some(400_000), 1).unwrap();
        let echo = simulate_trace(TraceKind::Echo, hz_to_rad(1.9e6), 0.0, &times, Some(400_000), 2).unwrap();
        let (r, e) = (fit_trace(&ramsey).unwrap(), fit_trace(&echo).unwrap());
        assert!(e.rate < r.rate, "echo {} vs ramsey {}", rad_to_hz(e.rate), rad_to_hz(r.rate));
    }

    #[test]
    fn flat_trace_is_no_decay() {
        let times = linear_times(20, 1e-6);
        let tr = ExperimentTrace {
            kind: TraceKind::Relaxation,
            times: times.clone(),
            p_e: times.iter().enumerate().map(|(i, _)| 0.5 + 1e-3 * if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
            detuning: None,
            n_averages: Some(1000),
        };
        assert!(matches!(fit_trace(&tr), Err(ExperimentError::NoDecay { .. }) | Err(ExperimentError::Fit(_))));
        let short = ExperimentTrace { times: times[..5].to_vec(), p_e: tr.p_e[..5].to_vec(), ..tr };
        assert_eq!(fit_trace(&short), Err(ExperimentError::TooFewPoints(5)));
    }

    #[test]
    fn short_window_is_rejected() {
        let times = linear_times(20, 50e-9);
        let tr = simulate_trace(TraceKind::Relaxation, g1(), 0.0, &times, None, 0).unwrap();
        assert!(matches!(fit_trace(&tr), Err(ExperimentError::ShortWindow(_))));
    }

    #[test]
    fn campaign_length_and_determinism() {
        let cfg = CampaignConfig { seed: 3, ..Default::default() };
        assert_eq!(cfg.n_ticks(), 1200);
        let short = CampaignConfig { duration: 640.0, ..cfg };
        let a = simulate_campaign(&short, &mut ConstantGamma1(g1())).unwrap();
        let b = simulate_campaign(&short, &mut ConstantGamma1(g1())).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.fitted.len(), 64);
        assert_eq!(a.gaps(), 0);
        let s = a.series().unwrap();
        assert!(rad_to_hz(s.std_dev()) < 215e3);
    }

    #[test]
    fn campaign_validates_config() {
        let cfg = CampaignConfig { duration: 100.0, ..Default::default() };
        assert!(simulate_campaign(&cfg, &mut ConstantGamma1(g1())).is_err());
    }

    #[test]
    fn gaps_are_interpolated() {
        let out = CampaignOutput { fitted: vec![None, Some(1.0), None, None, Some(4.0), None], truth: vec![0.0; 6], dt: 10.0, seed: 0 };
        assert_eq!(out.gaps(), 4);
        assert_eq!(out.series().unwrap().values, vec![1.0, 1.0, 2.0, 3.0, 4.0, 4.0]);
        let none = CampaignOutput { fitted: vec![None, None], ..out };
        assert_eq!(none.series(), Err(ExperimentError::EmptyCampaign));
    }

    #[test]
    fn series_source_interpolates() {
        let mut s = TimeSeries::new(0.0, 10.0, vec![1.0, 3.0, 5.0], 0).unwrap();
        assert_eq!(s.gamma1(-5.0), 1.0);
        assert_eq!(s.gamma1(5.0), 2.0);
        assert_eq!(s.gamma1(20.0), 5.0);
        assert_eq!(s.gamma1(100.0), 5.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn noiseless_fit_is_identity(rate_mhz in 1.0f64..6.0, kind in 0usize..3) {
            let kind = [TraceKind::Relaxation, TraceKind::Ramsey, TraceKind::Echo][kind];
            let rate = hz_to_rad(rate_mhz * 1e6);
            let times = linear_times(41, 4.0 / rate);
            let tr = simulate_trace(kind, rate, default_ramsey_detuning(), &times, None, 0).unwrap();
            let f = fit_trace(&tr).unwrap();
            prop_assert!((f.rate / rate - 1.0).abs() < 1e-6);
        }
    }
}
