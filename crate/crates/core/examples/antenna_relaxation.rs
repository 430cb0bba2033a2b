// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Relaxation rate versus thermal photon number on the antenna line, and the
//! noise power at the detuning inferred from a coherent-drive slope.
//!
//! ```not_rust
//! cargo run --example antenna_relaxation
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thermoq::cavity::CircuitParams;
use thermoq::decoherence::{component_rates, gamma1_antenna_model, invert_sideband_psd};
use thermoq::fitting::linear_fit;
use thermoq::units::{hz_to_rad, rad_to_hz};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = CircuitParams::reference_sample();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let scatter = Normal::new(0.0, hz_to_rad(215e3))?;
    let n_a: Vec<f64> = (0..25).map(|i| i as f64 / 24.0).collect();
    let gamma1 = n_a
        .iter()
        .map(|&n| Ok(gamma1_antenna_model(n, params.gamma1_0, params.gamma1_antenna)? + scatter.sample(&mut rng)))
        .collect::<Result<Vec<f64>, Box<dyn std::error::Error>>>()?;
    let fit = linear_fit(&n_a, &gamma1)?;
    let errs = fit.std_errs();
    println!(
        "gamma1_a = {:.0} +/- {:.0} kHz (injected {:.0} kHz)",
        rad_to_hz(fit.values[0] / 2.0) / 1e3,
        rad_to_hz(errs[0] / 2.0) / 1e3,
        rad_to_hz(params.gamma1_antenna) / 1e3
    );

    let chi = params.dispersive_shift()?;
    let mix = component_rates(&params, 0.0)?.mix;
    let inv = invert_sideband_psd(hz_to_rad(-17e3), mix, chi, params.detuning())?;
    println!("gamma1_delta = {:.2} kHz, S(delta) = {:.3e} W/Hz", rad_to_hz(inv.gamma1_sideband) / 1e3, inv.s_delta);
    Ok(())
}
