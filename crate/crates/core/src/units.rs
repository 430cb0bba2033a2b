// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Angular/ordinary frequency conversion.
//!
//! Everything inside the library is angular (rad/s). Files and reports use
//! ordinary frequency f = ω/2π in Hz, the same "2π × MHz" convention used for
//! circuit parameters in the lab.

use std::f64::consts::TAU;

#[inline]
pub fn hz_to_rad(f_hz: f64) -> f64 {
    TAU * f_hz
}

#[inline]
pub fn rad_to_hz(omega: f64) -> f64 {
    omega / TAU
}

/// dB of power loss to a linear transmission factor, `10^(-dB/10)`.
#[inline]
pub fn db_loss_to_linear(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

#[inline]
pub fn linear_to_db_loss(factor: f64) -> f64 {
    -10.0 * factor.log10()
}
