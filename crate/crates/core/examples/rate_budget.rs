// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Relaxation and dephasing budget of the characterised sample.
//!
//! ```not_rust
//! cargo run --example rate_budget
//! ```

use thermoq::cavity::{critical_photon_number, CircuitParams};
use thermoq::decoherence::{rate_budget, BudgetInputs, CouplingGeometry};
use thermoq::units::rad_to_hz;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = CircuitParams::reference_sample();
    let chi = params.dispersive_shift()?;
    let n_crit = critical_photon_number(params.detuning(), params.g)?;
    println!("detuning      {:>10.3} MHz", rad_to_hz(params.detuning()) / 1e6);
    println!("chi           {:>10.3} MHz", rad_to_hz(chi) / 1e6);
    println!("n_crit        {n_crit:>10.2}");

    let budget = rate_budget(&params, &CouplingGeometry::reference_sample(), &BudgetInputs::default())?;
    let rows = [
        ("gamma1 total", &budget.gamma1_total),
        ("gamma1 antenna", &budget.gamma1_antenna),
        ("gamma1 Purcell", &budget.gamma1_purcell),
        ("gamma1 sideband", &budget.gamma1_sideband),
        ("gamma mix", &budget.gamma_mix),
        ("gamma1 residual", &budget.gamma1_residual),
        ("gamma_phi 0", &budget.gamma_phi_0),
        ("gamma_phi 2nd", &budget.gamma_phi_2nd_antenna),
    ];
    for (name, entry) in rows {
        println!("{name:<16} {:>14.4} kHz   {}", entry.hz() / 1e3, entry.note);
    }
    for w in &budget.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
