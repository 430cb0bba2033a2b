// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Temperature scaling of the white floor of the γ1 spectrum,
//! `μ(T) = μ0 + a T^(2+x)`.
//!
//! ```not_rust
//! cargo run --example floor_scaling
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thermoq::spectral::fit_white_floor_vs_temp;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (mu0, a) = (0.81e-24, 1.1e-24);
    let temps: Vec<f64> = (0..15).map(|i| 0.05 + 1.45 * i as f64 / 14.0).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let noise = Normal::new(0.0, 0.1)?;
    let points: Vec<(f64, f64)> = temps
        .iter()
        .map(|&t| {
            let mu = mu0 + a * t * t;
            (t, mu * (1.0 + noise.sample(&mut rng)))
        })
        .collect();
    let fit = fit_white_floor_vs_temp(&points)?;
    println!("mu0 = {:.3e} +/- {:.1e} W/Hz", fit.mu0, fit.mu0_err);
    println!("a   = {:.3e} +/- {:.1e} W/Hz/K^2", fit.a, fit.a_err);
    match (fit.x, fit.x_err) {
        (Some(x), Some(e)) => println!("x   = {x:.3} +/- {e:.3}"),
        _ => println!("x not identifiable"),
    }
    Ok(())
}
