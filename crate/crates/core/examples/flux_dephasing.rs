// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Flux-noise dephasing from the antenna line, away from and at the sweet
//! spot.
//!
//! ```not_rust
//! cargo run --example flux_dephasing
//! ```

use thermoq::cavity::CircuitParams;
use thermoq::decoherence::{dephasing_first_order, dephasing_second_order, transfer_functions, CouplingGeometry, FluxPoint};
use thermoq::units::rad_to_hz;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let omega_q0 = CircuitParams::reference_sample().omega_q0;
    let geometry = CouplingGeometry::reference_sample();

    for lambda in [0.0, 0.1, 0.25, 0.4] {
        let tf = transfer_functions(FluxPoint::new(lambda)?, omega_q0)?;
        println!("lambda {lambda:>4}: D1/2pi = {:>10.4e} Hz, D2/2pi = {:>10.4e} Hz", rad_to_hz(tf.d1), rad_to_hz(tf.d2));
    }

    println!("{:>6} {:>18} {:>18}", "T [K]", "1st order @0.25 [Hz]", "2nd order @0 [Hz]");
    for t in [0.05, 0.1, 0.2, 0.5, 1.0, 1.5] {
        let first = dephasing_first_order(t, FluxPoint::new(0.25)?, &geometry, omega_q0)?.rate;
        let second = dephasing_second_order(t, &geometry)?;
        println!("{t:>6.2} {:>18.4e} {:>18.4e}", rad_to_hz(first), rad_to_hz(second));
    }
    Ok(())
}
