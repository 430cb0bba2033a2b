// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! On-disk run configuration.
//!
//! Frequencies and rates are ω/2π in Hz, temperatures in K, inductances in H.
//! Conversion to angular units happens once, in [`RunConfig::resolve`].
//! Every section is optional and defaults to the characterised sample.

use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cavity::{CircuitParams, PortLabel, ThermalPort};
use crate::constants::PLANCK;
use crate::decoherence::{BudgetInputs, CouplingGeometry};
use crate::experiments::CampaignConfig;
use crate::tls::EnsembleConfig;
use crate::units::{db_loss_to_linear, hz_to_rad};

use super::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CircuitConfig {
    pub omega_q0_hz: f64,
    pub e_c_hz: f64,
    pub e_j0_hz: Option<f64>,
    pub omega_r_hz: f64,
    pub g_hz: f64,
    pub kappa_i_hz: f64,
    pub kappa_x_hz: f64,
    pub kappa_a_hz: f64,
    pub gamma1_0_hz: f64,
    pub gamma2_ramsey_hz: f64,
    pub gamma2_echo_hz: f64,
    pub gamma1_antenna_hz: f64,
    pub z0_ohm: f64,
}

impl Default for CircuitConfig {
    fn default() -> Self {
        Self {
            omega_q0_hz: 6.92e9,
            e_c_hz: 315e6,
            e_j0_hz: Some(20e9),
            omega_r_hz: 6.07e9,
            g_hz: 67e6,
            kappa_i_hz: 50e3,
            kappa_x_hz: 8.5e6,
            kappa_a_hz: 30e3,
            gamma1_0_hz: 3.9e6,
            gamma2_ramsey_hz: 2.1e6,
            gamma2_echo_hz: 1.9e6,
            gamma1_antenna_hz: 820e3,
            z0_ohm: 50.0,
        }
    }
}

impl CircuitConfig {
    pub fn to_params(&self) -> CircuitParams {
        CircuitParams {
            omega_q0: hz_to_rad(self.omega_q0_hz),
            e_c: hz_to_rad(self.e_c_hz),
            e_j0: self.e_j0_hz.map(hz_to_rad),
            omega_r: hz_to_rad(self.omega_r_hz),
            g: hz_to_rad(self.g_hz),
            kappa_i: hz_to_rad(self.kappa_i_hz),
            kappa_x: hz_to_rad(self.kappa_x_hz),
            kappa_a: hz_to_rad(self.kappa_a_hz),
            gamma1_0: hz_to_rad(self.gamma1_0_hz),
            gamma2_ramsey: hz_to_rad(self.gamma2_ramsey_hz),
            gamma2_echo: hz_to_rad(self.gamma2_echo_hz),
            gamma1_antenna: hz_to_rad(self.gamma1_antenna_hz),
            z0: self.z0_ohm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub m_a_h: f64,
    pub l_loop_h: f64,
    pub l_a_h: f64,
    pub z0_ohm: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let g = CouplingGeometry::reference_sample();
        Self { m_a_h: g.m_a, l_loop_h: g.l_loop, l_a_h: g.l_a, z0_ohm: g.z0 }
    }
}

/// A heatable line. Its coupling rate comes from the circuit section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortConfig {
    pub label: PortLabel,
    pub temperature_k: f64,
    /// Power loss between attenuator and resonator, dB.
    #[serde(default)]
    pub attenuation_db: f64,
}

fn default_ports() -> Vec<PortConfig> {
    vec![
        PortConfig { label: PortLabel::Internal, temperature_k: 0.035, attenuation_db: 0.0 },
        PortConfig { label: PortLabel::Readout, temperature_k: 0.05, attenuation_db: 4.1 },
        PortConfig { label: PortLabel::Antenna, temperature_k: 0.05, attenuation_db: 4.1 },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetConfig {
    pub s_delta_w_per_hz: f64,
    pub antenna_temperature_k: f64,
    pub photon_shot_dephasing_hz: f64,
    pub quoted_second_order_dephasing_hz: Option<f64>,
}

impl Default for BudgetConfig {
    fn default() -> Self {
        Self {
            s_delta_w_per_hz: 2.6e-28,
            antenna_temperature_k: 0.05,
            photon_shot_dephasing_hz: 3.9e6,
            quoted_second_order_dephasing_hz: Some(100.0),
        }
    }
}

/// Fluctuator ensemble. Energies are given as frequencies `E/h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TlsConfig {
    pub n_tls: usize,
    pub x_exponent: f64,
    pub epsilon_max_hz: f64,
    pub delta_range_hz: [f64; 2],
    pub switch_rate_range_per_s: [f64; 2],
    pub coupling_scale_hz: f64,
    pub base_gamma1_hz: f64,
    pub linewidth_hz: f64,
    pub jump_hz: f64,
    pub reference_temperature_k: f64,
}

impl Default for TlsConfig {
    fn default() -> Self {
        let d = EnsembleConfig::default();
        Self {
            n_tls: d.n_tls,
            x_exponent: d.x_exponent,
            epsilon_max_hz: 8e9,
            delta_range_hz: [0.5e9, 5e9],
            switch_rate_range_per_s: [d.rate_decades.0, d.rate_decades.1],
            coupling_scale_hz: 4e6,
            base_gamma1_hz: 3.9e6,
            linewidth_hz: 2e9,
            jump_hz: 200e6,
            reference_temperature_k: d.reference_temperature,
        }
    }
}

impl TlsConfig {
    pub fn to_ensemble_config(&self, seed: u64) -> EnsembleConfig {
        EnsembleConfig {
            n_tls: self.n_tls,
            x_exponent: self.x_exponent,
            epsilon_max: PLANCK * self.epsilon_max_hz,
            delta_range: (PLANCK * self.delta_range_hz[0], PLANCK * self.delta_range_hz[1]),
            rate_decades: (self.switch_rate_range_per_s[0], self.switch_rate_range_per_s[1]),
            coupling_scale: hz_to_rad(self.coupling_scale_hz),
            base_gamma1: hz_to_rad(self.base_gamma1_hz),
            linewidth: hz_to_rad(self.linewidth_hz),
            jump: hz_to_rad(self.jump_hz),
            reference_temperature: self.reference_temperature_k,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignSection {
    pub point_rate_hz: f64,
    pub duration_s: f64,
    pub n_averages: u64,
    pub temperature_k: f64,
    pub trace_points: usize,
    pub trace_window_s: f64,
}

impl Default for CampaignSection {
    fn default() -> Self {
        let d = CampaignConfig::default();
        Self {
            point_rate_hz: d.point_rate,
            duration_s: d.duration,
            n_averages: d.n_averages,
            temperature_k: d.temperature,
            trace_points: d.trace_points,
            trace_window_s: d.trace_window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub circuit: CircuitConfig,
    pub geometry: GeometryConfig,
    pub ports: Vec<PortConfig>,
    pub budget: BudgetConfig,
    pub tls: TlsConfig,
    pub campaign: CampaignSection,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            circuit: CircuitConfig::default(),
            geometry: GeometryConfig::default(),
            ports: default_ports(),
            budget: BudgetConfig::default(),
            tls: TlsConfig::default(),
            campaign: CampaignSection::default(),
            seed: 0,
            output_dir: None,
        }
    }
}

/// Independent seeds for the stages of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StageSeeds {
    pub ensemble: u64,
    pub dynamics: u64,
    pub measurement: u64,
}

impl StageSeeds {
    pub fn from_run_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        Self { ensemble: rng.next_u64(), dynamics: rng.next_u64(), measurement: rng.next_u64() }
    }
}

/// A validated configuration in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub params: CircuitParams,
    pub geometry: CouplingGeometry,
    pub ports: Vec<ThermalPort>,
    pub budget: BudgetInputs,
    pub ensemble: EnsembleConfig,
    pub campaign: CampaignConfig,
    pub seed: u64,
    pub seeds: StageSeeds,
    pub warnings: Vec<String>,
}

impl Resolved {
    pub fn port(&self, label: PortLabel) -> Result<&ThermalPort, CliError> {
        self.ports
            .iter()
            .find(|p| p.label == label)
            .ok_or_else(|| CliError::Validation(format!("config: no `{label}` entry in `ports`")))
    }
}

fn field_err(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("config: `{field}`: {e}"))
}

impl RunConfig {
    /// Parses JSON. Errors carry the line and column of the offending field.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
    }

    pub fn resolve(&self, seed: u64) -> Result<Resolved, CliError> {
        let params = self.circuit.to_params();
        let warnings = params.validate().map_err(|e| field_err("circuit", e))?;
        let g = &self.geometry;
        let geometry = CouplingGeometry::new(g.m_a_h, g.l_loop_h, g.l_a_h, g.z0_ohm).map_err(|e| field_err("geometry", e))?;
        let mut ports: Vec<ThermalPort> = Vec::with_capacity(self.ports.len());
        for (i, p) in self.ports.iter().enumerate() {
            if ports.iter().any(|q| q.label == p.label) {
                return Err(field_err(&format!("ports[{i}].label"), format!("duplicate port `{}`", p.label)));
            }
            let port = ThermalPort::new(p.label, p.temperature_k, params.kappa(p.label), db_loss_to_linear(p.attenuation_db))
                .map_err(|e| field_err(&format!("ports[{i}]"), e))?;
            ports.push(port);
        }
        let b = &self.budget;
        for (name, v) in [("budget.s_delta_w_per_hz", b.s_delta_w_per_hz), ("budget.antenna_temperature_k", b.antenna_temperature_k)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(field_err(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        let budget = BudgetInputs {
            s_delta: b.s_delta_w_per_hz,
            antenna_temperature: b.antenna_temperature_k,
            photon_shot_dephasing: hz_to_rad(b.photon_shot_dephasing_hz),
            quoted_second_order_dephasing: b.quoted_second_order_dephasing_hz.map(hz_to_rad),
        };
        let seeds = StageSeeds::from_run_seed(seed);
        let ensemble = self.tls.to_ensemble_config(seeds.ensemble);
        ensemble.validate().map_err(|e| field_err("tls", e))?;
        let c = &self.campaign;
        let campaign = CampaignConfig {
            point_rate: c.point_rate_hz,
            duration: c.duration_s,
            n_averages: c.n_averages,
            temperature: c.temperature_k,
            seed: seeds.measurement,
            trace_points: c.trace_points,
            trace_window: c.trace_window_s,
        };
        campaign.validate().map_err(|e| field_err("campaign", e))?;
        Ok(Resolved { params, geometry, ports, budget, ensemble, campaign, seed, seeds, warnings })
    }
}
