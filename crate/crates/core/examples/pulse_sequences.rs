// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Relaxation, Ramsey and spin-echo traces with shot noise, fitted back.
//!
//! ```not_rust
//! cargo run --example pulse_sequences
//! ```

use thermoq::experiments::{default_ramsey_detuning, fit_trace, linear_times, simulate_trace, TraceKind};
use thermoq::units::{hz_to_rad, rad_to_hz};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let times = linear_times(81, 1e-6);
    for (kind, rate_hz) in [(TraceKind::Relaxation, 3.9e6), (TraceKind::Ramsey, 2.1e6), (TraceKind::Echo, 1.9e6)] {
        let trace = simulate_trace(kind, hz_to_rad(rate_hz), default_ramsey_detuning(), &times, Some(400_000), 11)?;
        let fit = fit_trace(&trace)?;
        print!(
            "{kind:<10} injected {:.3} MHz, fitted {:.4} +/- {:.4} MHz",
            rate_hz / 1e6,
            rad_to_hz(fit.rate) / 1e6,
            rad_to_hz(fit.rate_err) / 1e6
        );
        if let Some(d) = fit.detuning {
            print!(", detuning {:.4} MHz", rad_to_hz(d) / 1e6);
        }
        println!();
    }
    Ok(())
}
