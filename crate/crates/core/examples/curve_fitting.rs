// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! The least-squares engine on a user model: a damped oscillation with a
//! bounded decay rate.
//!
//! ```not_rust
//! cargo run --example curve_fitting
//! ```

use thermoq::fitting::{least_squares, Bound, FitOptions, FnProblem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let t: Vec<f64> = (0..60).map(|i| i as f64 * 0.1).collect();
    let y: Vec<f64> = t.iter().map(|&t| 2.0 * (-0.7 * t).exp() * (3.0 * t).cos() + 0.1).collect();

    let problem = FnProblem::new(&["amplitude", "rate", "omega", "offset"], |p: &[f64]| {
        t.iter().zip(&y).map(|(&t, &y)| p[0] * (-p[1] * t).exp() * (p[2] * t).cos() + p[3] - y).collect()
    })
    .with_bounds(vec![Bound::Free, Bound::Lower(0.0), Bound::Free, Bound::Free]);
    let fit = least_squares(&problem, &[1.0, 0.5, 2.9, 0.0], &FitOptions::default())?;

    for (name, (v, e)) in fit.names.iter().zip(fit.values.iter().zip(fit.std_errs())) {
        println!("{name:<10} {v:>10.6} +/- {e:.1e}");
    }
    println!("{} iterations, converged: {}", fit.n_iterations, fit.converged);
    Ok(())
}
