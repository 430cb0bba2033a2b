// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! CODATA 2018 exact and recommended values in SI units.

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J·s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Magnetic flux quantum h/2e, Wb.
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
/// Resistance quantum for Cooper pairs h/4e², Ω.
pub const RESISTANCE_QUANTUM: f64 = PLANCK / (4.0 * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE);

/// The constants as one record, for callers that want to pass them around
/// or print them. Values are compiled in and cannot be overridden.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
    pub phi0: f64,
    pub r_q: f64,
}

impl PhysicalConstants {
    pub const CODATA: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        k_b: K_B,
        phi0: FLUX_QUANTUM,
        r_q: RESISTANCE_QUANTUM,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_quanta() {
        assert!((FLUX_QUANTUM - 2.067_833_848e-15).abs() / 2.067_833_848e-15 < 1e-9);
        assert!((RESISTANCE_QUANTUM - 6_453.2).abs() < 0.1);
        let c = PhysicalConstants::default();
        assert!(c.hbar > 0.0 && c.k_b > 0.0 && c.phi0 > 0.0 && c.r_q > 0.0);
        assert!((PLANCK / (2.0 * std::f64::consts::PI) - HBAR).abs() / HBAR < 1e-9);
    }
}
