// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Thermal occupation and noise spectra of a heated 50 Ω attenuator.
//!
//! ```not_rust
//! cargo run --example thermal_spectra
//! ```

use thermoq::spectra::{bose_occupation, dc_limits, second_order_psd, thermal_psd};
use thermoq::units::hz_to_rad;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let omega_r = hz_to_rad(6.07e9);
    println!("{:>8} {:>12} {:>14} {:>14}", "T [K]", "n_th(w_r)", "S(w_r) [W/Hz]", "S2(0) [W2/Hz]");
    for t in [0.05, 0.1, 0.2, 0.5, 1.0, 1.5] {
        let n = bose_occupation(omega_r, t)?;
        let s = thermal_psd(omega_r, t)?;
        let dc = dc_limits(t)?;
        println!("{t:>8.3} {n:>12.4e} {s:>14.4e} {:>14.4e}", dc.second_order);
    }

    // The second-order density approaches its dc limit below k_B T / ħ.
    let t = 0.5;
    let dc = dc_limits(t)?.second_order;
    for f in [1e3, 1e6, 1e9, 1e10] {
        let s2 = second_order_psd(hz_to_rad(f), t)?;
        println!("S2({f:.0e} Hz, {t} K) / S2(0) = {:.6}", s2 / dc);
    }
    Ok(())
}
