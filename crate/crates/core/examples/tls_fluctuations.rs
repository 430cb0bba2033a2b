// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! γ1 fluctuations from an ensemble of two-level fluctuators, and the
//! low-frequency exponent of their spectrum.
//!
//! ```not_rust
//! cargo run --release --example tls_fluctuations
//! ```

use thermoq::spectral::{fit_knee_spectrum, psd_estimate};
use thermoq::tls::{sample_ensemble, simulate_microscopic, simulate_phenomenological, EnsembleConfig, PhenomenologicalConfig};
use thermoq::units::{hz_to_rad, rad_to_hz};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ensemble = sample_ensemble(&EnsembleConfig::default())?;
    let omega_q = hz_to_rad(6.92e9);
    for temperature in [0.05, 0.5, 1.0] {
        let series = simulate_microscopic(&ensemble, omega_q, temperature, 12_000.0, 10.0, 1)?;
        let fit = fit_knee_spectrum(&psd_estimate(&series)?)?;
        println!(
            "T = {temperature:>4} K: mean {:.3} MHz, std {:.0} kHz, beta {}",
            rad_to_hz(series.mean()) / 1e6,
            rad_to_hz(series.std_dev()) / 1e3,
            fit.beta.map_or("-".into(), |b| format!("{b:.2}"))
        );
    }

    let cfg = PhenomenologicalConfig { mean: hz_to_rad(3.9e6), beta: 1.0, knee: hz_to_rad(1e-3), white_sigma: 1.0 }
        .with_total_sigma(hz_to_rad(215e3), 1200, 10.0);
    let series = simulate_phenomenological(&cfg, 12_000.0, 10.0, 3)?;
    let fit = fit_knee_spectrum(&psd_estimate(&series)?)?;
    println!("phenomenological: beta {:?}, knee {:?} Hz, degenerate {}", fit.beta, fit.omega_c.map(rad_to_hz), fit.degenerate);
    Ok(())
}
