// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Line attenuation from an ac-Stark temperature sweep.
//!
//! A synthetic readout-line sweep with 4.1 dB of loss and 1 % noise is fitted
//! back for α, then the antenna line is fitted for κ_a with α fixed.
//!
//! ```not_rust
//! cargo run --example stark_calibration
//! ```

use thermoq::cavity::{calibrate_attenuation, CalibrationTarget, CircuitParams, PortLabel, StarkModel};
use thermoq::units::{db_loss_to_linear, linear_to_db_loss, rad_to_hz};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = CircuitParams::reference_sample();
    let alpha = db_loss_to_linear(4.1);
    let temps: Vec<f64> = (0..30).map(|i| 0.05 + 1.45 * i as f64 / 29.0).collect();

    let readout = StarkModel::new(&params, PortLabel::Readout, alpha, 0.0)?;
    let sigma = 0.01 * readout.shift(1.5)?.abs();
    let sweep = readout.sweep(&temps, sigma, 2016)?;
    let fit = calibrate_attenuation(&sweep, CalibrationTarget::Attenuation, &params)?;
    println!("readout line: alpha = {:.4} +/- {:.4} ({:.2} dB), injected {alpha:.4}", fit.estimate, fit.std_err, linear_to_db_loss(fit.estimate));

    let antenna = StarkModel::new(&params, PortLabel::Antenna, alpha, 0.0)?;
    let shift = antenna.shift(1.5)?;
    let sweep = antenna.sweep(&temps, 0.01 * shift.abs(), 2017)?;
    let fit = calibrate_attenuation(&sweep, CalibrationTarget::AntennaCoupling { alpha }, &params)?;
    println!(
        "antenna line: kappa_a = {:.2} +/- {:.2} kHz, injected {:.2} kHz",
        rad_to_hz(fit.estimate) / 1e3,
        rad_to_hz(fit.std_err) / 1e3,
        rad_to_hz(params.kappa_a) / 1e3
    );
    Ok(())
}
