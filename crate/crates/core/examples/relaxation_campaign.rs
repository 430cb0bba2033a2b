// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! A 200 minute relaxation campaign at 0.1 Hz, driven by a fluctuator
//! ensemble and by a constant rate.
//!
//! ```not_rust
//! cargo run --release --example relaxation_campaign
//! ```

use thermoq::experiments::{simulate_campaign, CampaignConfig, ConstantGamma1};
use thermoq::spectral::{fit_knee_spectrum, psd_estimate};
use thermoq::tls::{sample_ensemble, simulate_microscopic, EnsembleConfig};
use thermoq::units::{hz_to_rad, rad_to_hz};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = CampaignConfig { temperature: 1.0, seed: 5, ..Default::default() };
    let dt = 1.0 / cfg.point_rate;

    let out = simulate_campaign(&cfg, &mut ConstantGamma1(hz_to_rad(3.9e6)))?;
    let series = out.series()?;
    let fit = fit_knee_spectrum(&psd_estimate(&series)?)?;
    println!(
        "constant source: {} points, estimator scatter {:.1} kHz, white spectrum: {}",
        series.len(),
        rad_to_hz(series.std_dev()) / 1e3,
        fit.degenerate
    );

    let ensemble = sample_ensemble(&EnsembleConfig::default())?;
    let mut truth = simulate_microscopic(&ensemble, hz_to_rad(6.92e9), cfg.temperature, cfg.duration, dt, 6)?;
    let out = simulate_campaign(&cfg, &mut truth)?;
    let series = out.series()?;
    let fit = fit_knee_spectrum(&psd_estimate(&series)?)?;
    println!(
        "ensemble source: truth std {:.0} kHz, measured std {:.0} kHz, beta {:?}, gaps {}",
        rad_to_hz(truth.std_dev()) / 1e3,
        rad_to_hz(series.std_dev()) / 1e3,
        fit.beta,
        out.gaps()
    );
    Ok(())
}
