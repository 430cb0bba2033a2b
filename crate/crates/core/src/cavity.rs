// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Dispersive qubit-resonator model.
//!
//! A transmon (sweet-spot frequency `ω_q0`, charging energy `E_c`) is coupled
//! with strength `g` to a resonator at `ω_r`. The resonator is loaded by three
//! bosonic baths: the internal loss channel (`κ_i`), the readout line
//! (`κ_x`) and the antenna line (`κ_a`). Heating the attenuator on a line
//! populates the resonator, which shifts the qubit by `2χ` per photon.
//!
//! Photon numbers always come from the steady state of the resonator master
//! equation, `n_r = Σ α_j κ_j n_j / κ_tot`. The Lorentzian filter
//! `F_L(ω)` is available for spectral shaping away from resonance; note that
//! `F_L(ω_r) Σ κ_j n_j` is twice the steady-state value because
//! `F_L(ω_r) = 2/κ_tot`.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fitting::{least_squares, FitError, FitOptions, FitResult, FnProblem};
use crate::spectra::{bose_occupation, SpectraError};
use crate::units::hz_to_rad;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CavityError {
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error("invalid `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("detuning equals the charging energy (straddling point); dispersive shift diverges")]
    Straddling,
    #[error("detuning must be non-zero")]
    ZeroDetuning,
    #[error("at least one thermal port is required")]
    NoPorts,
    #[error("sweep too short: {0}")]
    InsufficientSweep(String),
    #[error("sweep is ill-conditioned: thermal occupations vary by less than 1 % ({min:.4e} .. {max:.4e})")]
    IllConditioned { min: f64, max: f64 },
    #[error("calibration fit failed: {0}")]
    Fit(#[from] FitError),
}

fn param_err(name: &'static str, reason: impl Into<String>) -> CavityError {
    CavityError::Parameter { name, reason: reason.into() }
}

/// Electrical parameters of the sample. Every frequency and rate is
/// angular (rad/s).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircuitParams {
    pub omega_q0: f64,
    pub e_c: f64,
    pub e_j0: Option<f64>,
    pub omega_r: f64,
    pub g: f64,
    pub kappa_i: f64,
    pub kappa_x: f64,
    pub kappa_a: f64,
    pub gamma1_0: f64,
    pub gamma2_ramsey: f64,
    pub gamma2_echo: f64,
    pub gamma1_antenna: f64,
    /// Line impedance, Ω.
    pub z0: f64,
}

impl CircuitParams {
    /// The characterised sample: 6.92 GHz transmon, 6.07 GHz resonator,
    /// g = 67 MHz, κ_x = 8.5 MHz, κ_i = 50 kHz, κ_a = 30 kHz (all 2π×).
    ///
    /// `E_c` is h × 315 MHz; the tabulated "GHz" is a typo, the MHz value
    /// reproduces both χ = −2π × 3.11 MHz and `E_J0/E_c ≈ 64`.
    pub fn reference_sample() -> Self {
        Self {
            omega_q0: hz_to_rad(6.92e9),
            e_c: hz_to_rad(315e6),
            e_j0: Some(hz_to_rad(20e9)),
            omega_r: hz_to_rad(6.07e9),
            g: hz_to_rad(67e6),
            kappa_i: hz_to_rad(50e3),
            kappa_x: hz_to_rad(8.5e6),
            kappa_a: hz_to_rad(30e3),
            gamma1_0: hz_to_rad(3.9e6),
            gamma2_ramsey: hz_to_rad(2.1e6),
            gamma2_echo: hz_to_rad(1.9e6),
            gamma1_antenna: hz_to_rad(820e3),
            z0: 50.0,
        }
    }

    /// `δ = ω_q0 − ω_r`.
    pub fn detuning(&self) -> f64 {
        self.omega_q0 - self.omega_r
    }

    pub fn kappa_total(&self) -> f64 {
        self.kappa_i + self.kappa_x + self.kappa_a
    }

    pub fn dispersive_shift(&self) -> Result<f64, CavityError> {
        dispersive_shift(self.g, self.e_c, self.detuning())
    }

    pub fn kappa(&self, port: PortLabel) -> f64 {
        match port {
            PortLabel::Internal => self.kappa_i,
            PortLabel::Readout => self.kappa_x,
            PortLabel::Antenna => self.kappa_a,
        }
    }

    /// Checks the invariants and returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>, CavityError> {
        let positive: [(&'static str, f64); 12] = [
            ("omega_q0", self.omega_q0),
            ("e_c", self.e_c),
            ("omega_r", self.omega_r),
            ("g", self.g),
            ("kappa_i", self.kappa_i),
            ("kappa_x", self.kappa_x),
            ("kappa_a", self.kappa_a),
            ("gamma1_0", self.gamma1_0),
            ("gamma2_ramsey", self.gamma2_ramsey),
            ("gamma2_echo", self.gamma2_echo),
            ("gamma1_antenna", self.gamma1_antenna),
            ("z0", self.z0),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(param_err(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if let Some(ej) = self.e_j0 {
            if !(ej.is_finite() && ej > 0.0) {
                return Err(param_err("e_j0", format!("must be finite and > 0, got {ej}")));
            }
        }
        let delta = self.detuning();
        if delta == 0.0 || (self.g / delta).abs() >= 0.2 {
            return Err(param_err(
                "g",
                format!("|g/δ| = {:.3} violates the dispersive guard |g/δ| < 0.2", (self.g / delta).abs()),
            ));
        }
        if self.e_c >= delta.abs() {
            return Err(param_err("e_c", "charging energy must be smaller than |δ|"));
        }
        let mut warnings = Vec::new();
        if self.gamma2_ramsey < self.gamma1_0 / 2.0 {
            warnings.push(format!(
                "gamma2_ramsey ({:.4e} rad/s) is below gamma1_0/2 ({:.4e} rad/s); pure dephasing would be negative",
                self.gamma2_ramsey,
                self.gamma1_0 / 2.0
            ));
        }
        if self.gamma1_antenna > self.gamma1_0 {
            warnings.push("gamma1_antenna exceeds gamma1_0".to_string());
        }
        Ok(warnings)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortLabel {
    Internal,
    Readout,
    Antenna,
}

impl fmt::Display for PortLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            PortLabel::Internal => "internal",
            PortLabel::Readout => "readout",
            PortLabel::Antenna => "antenna",
        })
    }
}

impl std::str::FromStr for PortLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "internal" => Ok(PortLabel::Internal),
            "readout" => Ok(PortLabel::Readout),
            "antenna" => Ok(PortLabel::Antenna),
            other => Err(format!("unknown port `{other}` (expected internal, readout or antenna)")),
        }
    }
}

/// One bosonic bath feeding the resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalPort {
    pub label: PortLabel,
    /// K
    pub temperature: f64,
    /// rad/s
    pub kappa: f64,
    /// Linear power transmission between source and resonator, in (0, 1].
    pub attenuation: f64,
}

impl ThermalPort {
    pub fn new(label: PortLabel, temperature: f64, kappa: f64, attenuation: f64) -> Result<Self, CavityError> {
        if !(temperature.is_finite() && temperature >= 0.0) {
            return Err(param_err("temperature", format!("must be >= 0 K, got {temperature}")));
        }
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(param_err("kappa", format!("must be > 0, got {kappa}")));
        }
        if !(attenuation > 0.0 && attenuation <= 1.0) {
            return Err(param_err("attenuation", format!("must lie in (0, 1], got {attenuation}")));
        }
        Ok(Self { label, temperature, kappa, attenuation })
    }
}

/// One point of an ac-Stark temperature sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarkSweepPoint {
    /// K, within the heatable-attenuator range [0.04, 2.0].
    pub temperature: f64,
    /// Qubit frequency shift, rad/s.
    pub delta_omega_q: f64,
}

impl StarkSweepPoint {
    pub const TEMPERATURE_RANGE: (f64, f64) = (0.04, 2.0);

    pub fn new(temperature: f64, delta_omega_q: f64) -> Result<Self, CavityError> {
        let (lo, hi) = Self::TEMPERATURE_RANGE;
        if !(temperature >= lo && temperature <= hi) {
            return Err(param_err("temperature", format!("must lie in [{lo}, {hi}] K, got {temperature}")));
        }
        if !delta_omega_q.is_finite() {
            return Err(param_err("delta_omega_q", "must be finite"));
        }
        Ok(Self { temperature, delta_omega_q })
    }
}

/// `χ = −g² E_c / [δ(δ − E_c)]`.
pub fn dispersive_shift(g: f64, e_c: f64, delta: f64) -> Result<f64, CavityError> {
    if delta == 0.0 {
        return Err(CavityError::ZeroDetuning);
    }
    if (delta - e_c).abs() <= 1e-12 * delta.abs().max(e_c.abs()) {
        return Err(CavityError::Straddling);
    }
    Ok(-g * g * e_c / (delta * (delta - e_c)))
}

/// Resonator filter `(κ/2) / [(κ/2)² + (ω − ω_r)²]`, in s. Peak `2/κ_tot`.
pub fn lorentzian_filter(omega: f64, omega_r: f64, kappa_tot: f64) -> Result<f64, CavityError> {
    if !(kappa_tot.is_finite() && kappa_tot > 0.0) {
        return Err(param_err("kappa_tot", format!("must be > 0, got {kappa_tot}")));
    }
    let half = kappa_tot / 2.0;
    let d = omega - omega_r;
    Ok(half / (half * half + d * d))
}

/// Steady-state resonator population `Σ α_j κ_j n_th(ω, T_j) / Σ κ_j`.
pub fn steady_state_photons(ports: &[ThermalPort], omega: f64) -> Result<f64, CavityError> {
    if ports.is_empty() {
        return Err(CavityError::NoPorts);
    }
    let kappa_sum: f64 = ports.iter().map(|p| p.kappa).sum();
    if !(kappa_sum > 0.0) {
        return Err(param_err("kappa", "total coupling must be > 0"));
    }
    let mut n = 0.0;
    for p in ports {
        n += (p.kappa / kappa_sum) * p.attenuation * bose_occupation(omega, p.temperature)?;
    }
    Ok(n)
}

/// `F_L(ω) Σ α_j κ_j n_th(ω, T_j)`: the filtered occupation density used for
/// spectral shaping. On resonance this is exactly twice
/// [`steady_state_photons`].
pub fn filtered_occupation(ports: &[ThermalPort], omega: f64, omega_r: f64) -> Result<f64, CavityError> {
    if ports.is_empty() {
        return Err(CavityError::NoPorts);
    }
    let kappa_tot: f64 = ports.iter().map(|p| p.kappa).sum();
    let filter = lorentzian_filter(omega, omega_r, kappa_tot)?;
    let mut sum = 0.0;
    for p in ports {
        sum += p.attenuation * p.kappa * bose_occupation(omega, p.temperature)?;
    }
    Ok(filter * sum)
}

/// `n_crit = δ² / 4g²`.
pub fn critical_photon_number(delta: f64, g: f64) -> Result<f64, CavityError> {
    if !(g > 0.0) {
        return Err(param_err("g", format!("must be > 0, got {g}")));
    }
    Ok(delta * delta / (4.0 * g * g))
}

/// Resonator couplings entering the ac-Stark shift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarkKappas {
    pub readout: f64,
    pub antenna: f64,
    pub total: f64,
}

impl From<&CircuitParams> for StarkKappas {
    fn from(p: &CircuitParams) -> Self {
        Self { readout: p.kappa_x, antenna: p.kappa_a, total: p.kappa_total() }
    }
}

/// Temperature-dependent part of the ac-Stark shift,
/// `2χα(κ_x n_x + κ_a n_a)/κ_tot`. Reference offsets are the caller's.
pub fn ac_stark_shift(n_x: f64, n_a: f64, chi: f64, kappas: StarkKappas, alpha: f64) -> Result<f64, CavityError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(param_err("alpha", format!("must lie in (0, 1], got {alpha}")));
    }
    if kappas.total < kappas.readout + kappas.antenna {
        return Err(param_err("kappa_tot", "must be at least kappa_x + kappa_a"));
    }
    Ok(2.0 * chi * alpha * (kappas.readout * n_x + kappas.antenna * n_a) / kappas.total)
}

/// Which quantity a Stark sweep calibrates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CalibrationTarget {
    /// Line attenuation α from a readout-line sweep, `κ_x` known.
    Attenuation,
    /// Antenna-resonator coupling `κ_a` from an antenna-line sweep, α known.
    AntennaCoupling { alpha: f64 },
}

impl CalibrationTarget {
    pub fn port(&self) -> PortLabel {
        match self {
            CalibrationTarget::Attenuation => PortLabel::Readout,
            CalibrationTarget::AntennaCoupling { .. } => PortLabel::Antenna,
        }
    }

    fn parameter_name(&self) -> &'static str {
        match self {
            CalibrationTarget::Attenuation => "alpha",
            CalibrationTarget::AntennaCoupling { .. } => "kappa_a",
        }
    }
}

/// Stark shift of one heated line versus attenuator temperature, including
/// the constant reference offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarkModel {
    pub port: PortLabel,
    pub chi: f64,
    pub omega_r: f64,
    pub kappa_i: f64,
    pub kappa_x: f64,
    pub kappa_a: f64,
    pub alpha: f64,
    /// rad/s
    pub intercept: f64,
}

impl StarkModel {
    pub fn new(params: &CircuitParams, port: PortLabel, alpha: f64, intercept: f64) -> Result<Self, CavityError> {
        if port == PortLabel::Internal {
            return Err(param_err("port", "the internal bath is not heatable"));
        }
        Ok(Self {
            port,
            chi: params.dispersive_shift()?,
            omega_r: params.omega_r,
            kappa_i: params.kappa_i,
            kappa_x: params.kappa_x,
            kappa_a: params.kappa_a,
            alpha,
            intercept,
        })
    }

    fn shift_with(&self, n: f64, alpha: f64, kappa_a: f64, intercept: f64) -> f64 {
        let total = self.kappa_i + self.kappa_x + kappa_a;
        let kappa = match self.port {
            PortLabel::Readout => self.kappa_x,
            _ => kappa_a,
        };
        2.0 * self.chi * alpha * kappa * n / total + intercept
    }

    /// Qubit shift (rad/s) with the heated line at `temperature`.
    pub fn shift(&self, temperature: f64) -> Result<f64, CavityError> {
        let n = bose_occupation(self.omega_r, temperature)?;
        Ok(self.shift_with(n, self.alpha, self.kappa_a, self.intercept))
    }

    /// Noise-free or Gaussian-noise sweep over `temperatures`.
    pub fn sweep(&self, temperatures: &[f64], noise_sigma: f64, seed: u64) -> Result<Vec<StarkSweepPoint>, CavityError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, noise_sigma.max(0.0)).map_err(|e| param_err("noise_sigma", e.to_string()))?;
        temperatures
            .iter()
            .map(|&t| {
                let clean = self.shift(t)?;
                let jitter = if noise_sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                StarkSweepPoint::new(t, clean + jitter)
            })
            .collect()
    }
}

/// Result of a Stark-sweep calibration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationFit {
    pub port: PortLabel,
    /// `alpha` (dimensionless) or `kappa_a` (rad/s).
    pub parameter: &'static str,
    pub estimate: f64,
    pub std_err: f64,
    /// rad/s
    pub intercept: f64,
    pub intercept_std_err: f64,
    pub residual_norm: f64,
    pub fit: FitResult,
}

/// Fit Stark-shift data for α (readout sweep) or `κ_a` (antenna sweep).
///
/// The model is the temperature-dependent shift plus one free intercept that
/// absorbs the reference offsets. Starts from α = 1 (or the nominal `κ_a`)
/// and the first data point as intercept.
pub fn calibrate_attenuation(
    sweep: &[StarkSweepPoint],
    target: CalibrationTarget,
    params: &CircuitParams,
) -> Result<CalibrationFit, CavityError> {
    if sweep.len() < 4 {
        return Err(CavityError::InsufficientSweep(format!("need >= 4 points, got {}", sweep.len())));
    }
    let port = target.port();
    let model = StarkModel::new(params, port, 1.0, 0.0)?;
    let occupations: Vec<f64> = sweep
        .iter()
        .map(|p| bose_occupation(params.omega_r, p.temperature))
        .collect::<Result<_, _>>()?;
    let min = occupations.iter().copied().fold(f64::INFINITY, f64::min);
    let max = occupations.iter().copied().fold(0.0, f64::max);
    if max <= min * 1.01 {
        return Err(CavityError::IllConditioned { min, max });
    }
    if max < 3.0 * min {
        return Err(CavityError::InsufficientSweep(format!(
            "thermal occupation must span >= 3x, got {min:.4e} .. {max:.4e}"
        )));
    }
    let shifts: Vec<f64> = sweep.iter().map(|p| p.delta_omega_q).collect();

    let name = target.parameter_name();
    let (initial, fixed_alpha) = match target {
        CalibrationTarget::Attenuation => (1.0, None),
        CalibrationTarget::AntennaCoupling { alpha } => {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(param_err("alpha", format!("must lie in (0, 1], got {alpha}")));
            }
            (params.kappa_a, Some(alpha))
        }
    };
    let problem = FnProblem::new(&[name, "intercept"], |p: &[f64]| {
        occupations
            .iter()
            .zip(&shifts)
            .map(|(&n, &y)| {
                let predicted = match fixed_alpha {
                    None => model.shift_with(n, p[0], model.kappa_a, p[1]),
                    Some(alpha) => model.shift_with(n, alpha, p[0], p[1]),
                };
                predicted - y
            })
            .collect()
    });
    let fit = least_squares(&problem, &[initial, shifts[0]], &FitOptions::default())?;
    let errs = fit.std_errs();
    Ok(CalibrationFit {
        port,
        parameter: name,
        estimate: fit.values[0],
        std_err: errs[0],
        intercept: fit.values[1],
        intercept_std_err: errs[1],
        residual_norm: fit.residual_norm,
        fit,
    })
}
