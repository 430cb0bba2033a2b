// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Relaxation and dephasing rates of a flux-tunable transmon under thermal
//! irradiation.
//!
//! Relaxation through the antenna is first order in the field. Through the
//! resonator it picks up the Purcell rate, a sideband process driven by noise
//! at the detuning, and a reduction from qubit-resonator dressing. Dephasing
//! from the antenna is first order in flux away from the sweet spot and
//! second order (intensity noise, `∝ T³`) at the sweet spot.

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::cavity::{CavityError, CircuitParams};
use crate::constants::{FLUX_QUANTUM, HBAR, K_B};
use crate::units::{hz_to_rad, rad_to_hz};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecoherenceError {
    #[error(transparent)]
    Circuit(#[from] CavityError),
    #[error("flux point {0} is at a node of the qubit frequency; transfer functions diverge")]
    FluxNode(f64),
    #[error("invalid `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("antenna decay rate {gamma1_a:.4e} rad/s exceeds the total baseline {gamma1_0:.4e} rad/s")]
    Inconsistent { gamma1_0: f64, gamma1_a: f64 },
    #[error("measured slope {slope:.4e} rad/s per photon is below -2 gamma_mix ({floor:.4e}); sideband rate would be negative")]
    UnphysicalSlope { slope: f64, floor: f64 },
}

fn param_err(name: &'static str, reason: impl Into<String>) -> DecoherenceError {
    DecoherenceError::Parameter { name, reason: reason.into() }
}

fn non_negative(name: &'static str, v: f64) -> Result<(), DecoherenceError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(param_err(name, format!("must be finite and >= 0, got {v}")))
    }
}

/// Inductive coupling between antenna and SQUID loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingGeometry {
    /// Qubit-antenna mutual inductance, H.
    pub m_a: f64,
    /// SQUID loop inductance, H.
    pub l_loop: f64,
    /// Inductance of the antenna short circuit, H. Cancels out of both
    /// dephasing rates; kept for the bound `M_a² ≤ L_loop L_a`.
    pub l_a: f64,
    /// Ω
    pub z0: f64,
}

impl CouplingGeometry {
    pub fn new(m_a: f64, l_loop: f64, l_a: f64, z0: f64) -> Result<Self, DecoherenceError> {
        for (name, v) in [("m_a", m_a), ("l_loop", l_loop), ("l_a", l_a), ("z0", z0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(param_err(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if m_a * m_a > l_loop * l_a {
            return Err(param_err("m_a", "mutual inductance exceeds sqrt(L_loop * L_a)"));
        }
        Ok(Self { m_a, l_loop, l_a, z0 })
    }

    /// M_a = 1.3 pH, L_loop = 50 pH, Z0 = 50 Ω. The short-circuit inductance
    /// was not characterised; 10 pH is a placeholder that satisfies the bound.
    pub fn reference_sample() -> Self {
        Self { m_a: 1.3e-12, l_loop: 50e-12, l_a: 10e-12, z0: 50.0 }
    }
}

/// Reduced flux `λ = Φ/Φ0` in [−1/2, 1/2].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct FluxPoint(f64);

impl FluxPoint {
    pub const SWEET_SPOT: FluxPoint = FluxPoint(0.0);

    pub fn new(lambda: f64) -> Result<Self, DecoherenceError> {
        if !(lambda.abs() <= 0.5) {
            return Err(param_err("lambda", format!("must lie in [-1/2, 1/2], got {lambda}")));
        }
        Ok(Self(lambda))
    }

    pub fn lambda(self) -> f64 {
        self.0
    }

    fn interior_cos(self) -> Result<f64, DecoherenceError> {
        if 0.5 - self.0.abs() <= 1e-12 {
            return Err(DecoherenceError::FluxNode(self.0));
        }
        Ok((PI * self.0).cos())
    }
}

/// `ω_q = ω_q0 √|cos πλ|`.
pub fn qubit_frequency(flux: FluxPoint, omega_q0: f64) -> f64 {
    omega_q0 * (PI * flux.0).cos().abs().sqrt()
}

/// First and second flux derivatives of the qubit frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferFunctions {
    /// rad/s per unit λ
    pub d1: f64,
    /// rad/s per unit λ²
    pub d2: f64,
}

pub fn transfer_functions(flux: FluxPoint, omega_q0: f64) -> Result<TransferFunctions, DecoherenceError> {
    let c = flux.interior_cos()?;
    let s = (PI * flux.0).sin();
    let d1 = -(PI * omega_q0 / 2.0) * s / c.sqrt();
    let d2 = -(PI * PI * omega_q0 / 2.0) * c.sqrt() - (PI * PI * omega_q0 / 4.0) * s * s / c.powf(1.5);
    Ok(TransferFunctions { d1, d2 })
}

/// Resonator-mediated relaxation channels, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComponentRates {
    pub purcell: f64,
    pub mix: f64,
    pub sideband: f64,
}

/// `γ_1,δ = |4χ S(δ)/δ| / ħ`.
pub fn sideband_rate(chi: f64, delta: f64, s_delta: f64) -> f64 {
    (4.0 * chi * s_delta / delta).abs() / HBAR
}

/// Purcell `κ_x g²/δ²`, dressing `|γ1⁰ χ/δ|` and sideband rates.
pub fn component_rates(params: &CircuitParams, s_delta: f64) -> Result<ComponentRates, DecoherenceError> {
    params.validate()?;
    non_negative("s_delta", s_delta)?;
    let delta = params.detuning();
    let chi = params.dispersive_shift()?;
    Ok(ComponentRates {
        purcell: params.kappa_x * params.g * params.g / (delta * delta),
        mix: (params.gamma1_0 * chi / delta).abs(),
        sideband: sideband_rate(chi, delta, s_delta),
    })
}

/// Relaxation with `n_a` thermal photons on the antenna line,
/// `(γ1⁰ − γ1,a) + γ1,a(2n_a + 1)`.
pub fn gamma1_antenna_model(n_a: f64, gamma1_0: f64, gamma1_a: f64) -> Result<f64, DecoherenceError> {
    non_negative("n_a", n_a)?;
    if gamma1_a > gamma1_0 {
        return Err(DecoherenceError::Inconsistent { gamma1_0, gamma1_a });
    }
    Ok((gamma1_0 - gamma1_a) + gamma1_a * (2.0 * n_a + 1.0))
}

/// Total relaxation in the dispersive regime,
/// `γ1⁰ + γ1,P(2n_q + 1) + (γ1,δ − γ_mix)(2n_r + 1)`.
pub fn gamma1_dispersive_model(n_r: f64, n_q: f64, rates: &ComponentRates, gamma1_0: f64) -> Result<f64, DecoherenceError> {
    non_negative("n_r", n_r)?;
    non_negative("n_q", n_q)?;
    Ok(gamma1_0 + rates.purcell * (2.0 * n_q + 1.0) + (rates.sideband - rates.mix) * (2.0 * n_r + 1.0))
}

/// Change of the relaxation rate with resonator population alone,
/// `2n_r(γ1,δ − γ_mix)`.
pub fn delta_gamma1_res(n_r: f64, rates: &ComponentRates) -> Result<f64, DecoherenceError> {
    non_negative("n_r", n_r)?;
    Ok(2.0 * n_r * (rates.sideband - rates.mix))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SidebandInversion {
    /// rad/s
    pub gamma1_sideband: f64,
    /// W/Hz
    pub s_delta: f64,
}

/// Recover the sideband rate and the noise power at the detuning from the
/// measured per-photon slope of a coherent-drive sweep.
pub fn invert_sideband_psd(slope: f64, gamma_mix: f64, chi: f64, delta: f64) -> Result<SidebandInversion, DecoherenceError> {
    let gamma1_sideband = gamma_mix + slope / 2.0;
    let floor = -2.0 * gamma_mix;
    if gamma1_sideband < -1e-12 * gamma_mix.abs() {
        return Err(DecoherenceError::UnphysicalSlope { slope, floor });
    }
    if chi == 0.0 {
        return Err(param_err("chi", "must be non-zero"));
    }
    let gamma1_sideband = gamma1_sideband.max(0.0);
    Ok(SidebandInversion { gamma1_sideband, s_delta: HBAR * gamma1_sideband * delta.abs() / (4.0 * chi.abs()) })
}

/// Dephasing from first-order flux noise in the dc limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstOrderDephasing {
    /// rad/s
    pub rate: f64,
    /// Dimensionless dissipation parameter `(ħ/2πZ0)[D1 M_a/Φ0]²`.
    pub dissipation: f64,
}

pub fn dephasing_first_order(
    temperature: f64,
    flux: FluxPoint,
    geometry: &CouplingGeometry,
    omega_q0: f64,
) -> Result<FirstOrderDephasing, DecoherenceError> {
    non_negative("temperature", temperature)?;
    let tf = transfer_functions(flux, omega_q0)?;
    let coupling = (tf.d1 * geometry.m_a / FLUX_QUANTUM).powi(2);
    Ok(FirstOrderDephasing {
        rate: coupling * K_B * temperature / geometry.z0,
        dissipation: HBAR / (2.0 * PI * geometry.z0) * coupling,
    })
}

/// Sweet-spot dephasing from second-order intensity noise,
/// `2π[(π²/4√3) M_a²/(L_loop Z0)]² (k_B T/ħ)³`.
pub fn dephasing_second_order(temperature: f64, geometry: &CouplingGeometry) -> Result<f64, DecoherenceError> {
    non_negative("temperature", temperature)?;
    let k = PI * PI / (4.0 * 3f64.sqrt()) * geometry.m_a * geometry.m_a / (geometry.l_loop * geometry.z0);
    Ok(2.0 * PI * k * k * (K_B * temperature / HBAR).powi(3))
}

/// Decomposition of the second-order rate into a coupling strength, a
/// thermal suppression factor and a thermal rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondOrderDephasing {
    pub rate: f64,
    /// `[D2/(2√3) · M_a²/(L_loop Z0)]²`
    pub coupling: f64,
    /// `(k_B T / ħω_q0)²`
    pub suppression: f64,
}

/// Same rate as [`dephasing_second_order`], composed from the sweet-spot
/// curvature `D2(0)` and the suppression factor.
pub fn dephasing_second_order_composed(
    temperature: f64,
    geometry: &CouplingGeometry,
    omega_q0: f64,
) -> Result<SecondOrderDephasing, DecoherenceError> {
    non_negative("temperature", temperature)?;
    let d2 = transfer_functions(FluxPoint::SWEET_SPOT, omega_q0)?.d2;
    let coupling = (d2 / (2.0 * 3f64.sqrt()) * geometry.m_a * geometry.m_a / (geometry.l_loop * geometry.z0)).powi(2);
    let suppression = (K_B * temperature / (HBAR * omega_q0)).powi(2);
    Ok(SecondOrderDephasing { rate: coupling * suppression * 2.0 * PI * K_B * temperature / HBAR, coupling, suppression })
}

/// One line of a rate budget.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEntry {
    /// rad/s
    pub value: f64,
    pub note: String,
}

impl RateEntry {
    fn new(value: f64, note: impl Into<String>) -> Self {
        Self { value, note: note.into() }
    }

    pub fn hz(&self) -> f64 {
        rad_to_hz(self.value)
    }
}

impl Serialize for RateEntry {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("RateEntry", 3)?;
        s.serialize_field("rad_per_s", &self.value)?;
        s.serialize_field("hz", &self.hz())?;
        s.serialize_field("note", &self.note)?;
        s.end()
    }
}

/// Inputs to [`rate_budget`] beyond the circuit and the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BudgetInputs {
    /// Noise power at the detuning, W/Hz.
    pub s_delta: f64,
    /// Antenna attenuator temperature, K.
    pub antenna_temperature: f64,
    /// Dephasing per resonator photon from photon shot noise, rad/s.
    /// Copied into the budget as given.
    pub photon_shot_dephasing: f64,
    /// Quoted typical-operation second-order dephasing, rad/s. Reported next
    /// to the computed value; the two need not agree.
    pub quoted_second_order_dephasing: Option<f64>,
}

impl Default for BudgetInputs {
    fn default() -> Self {
        Self {
            s_delta: 2.6e-28,
            antenna_temperature: 0.05,
            photon_shot_dephasing: hz_to_rad(3.9e6),
            quoted_second_order_dephasing: Some(hz_to_rad(100.0)),
        }
    }
}

/// Every relaxation and dephasing channel of the sample, rad/s.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateBudget {
    pub gamma1_total: RateEntry,
    pub gamma1_0: RateEntry,
    pub gamma1_antenna: RateEntry,
    pub gamma1_purcell: RateEntry,
    pub gamma1_sideband: RateEntry,
    pub gamma_mix: RateEntry,
    pub gamma1_residual: RateEntry,
    pub gamma_phi_0: RateEntry,
    pub gamma_phi_2nd_antenna: RateEntry,
    pub gamma_phi_2nd_antenna_quoted: Option<RateEntry>,
    pub gamma_phi_photon_shot: RateEntry,
    pub warnings: Vec<String>,
}

pub fn rate_budget(
    params: &CircuitParams,
    geometry: &CouplingGeometry,
    inputs: &BudgetInputs,
) -> Result<RateBudget, DecoherenceError> {
    let mut warnings = params.validate()?;
    let rates = component_rates(params, inputs.s_delta)?;
    let total = gamma1_dispersive_model(0.0, 0.0, &rates, params.gamma1_0)?;
    let residual = params.gamma1_0 - params.gamma1_antenna - rates.purcell - rates.sideband + rates.mix;
    if residual < 0.0 {
        warnings.push(format!(
            "residual relaxation is negative ({:.4e} Hz); the listed channels exceed gamma1_0",
            rad_to_hz(residual)
        ));
    }
    let t_a = inputs.antenna_temperature;
    let second = dephasing_second_order(t_a, geometry)?;
    Ok(RateBudget {
        gamma1_total: RateEntry::new(total, "dispersive model with empty resonator and no qubit-frequency photons"),
        gamma1_0: RateEntry::new(params.gamma1_0, "measured temperature-independent relaxation"),
        gamma1_antenna: RateEntry::new(params.gamma1_antenna, "measured decay into the antenna line"),
        gamma1_purcell: RateEntry::new(rates.purcell, "kappa_x g^2 / delta^2"),
        gamma1_sideband: RateEntry::new(
            rates.sideband,
            format!("|4 chi S(delta) / delta| / hbar with S(delta) = {:.4e} W/Hz", inputs.s_delta),
        ),
        gamma_mix: RateEntry::new(rates.mix, "|gamma1_0 chi / delta|, enters the total with negative sign"),
        gamma1_residual: RateEntry::new(residual, "gamma1_0 - antenna - Purcell - sideband + mix"),
        gamma_phi_0: RateEntry::new(params.gamma2_ramsey - params.gamma1_0 / 2.0, "gamma2_ramsey - gamma1_0 / 2"),
        gamma_phi_2nd_antenna: RateEntry::new(
            second,
            format!("second-order intensity noise at the sweet spot, T_a = {t_a} K"),
        ),
        gamma_phi_2nd_antenna_quoted: inputs.quoted_second_order_dephasing.map(|v| {
            RateEntry::new(v, "quoted typical-operation figure; temperature behind it unstated, not recomputed")
        }),
        gamma_phi_photon_shot: RateEntry::new(inputs.photon_shot_dephasing, "per resonator photon, copied from input"),
        warnings,
    })
}
