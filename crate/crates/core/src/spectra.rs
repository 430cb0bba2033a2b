// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Thermal noise of a matched 50 Ω source: photon occupation, first-order
//! (power) spectral density and second-order (intensity) spectral density.
//!
//! The occupation is evaluated as `1 / expm1(ħω/k_BT)`, which stays accurate
//! from the deep quantum limit (`ħω ≫ k_BT`, where it underflows cleanly to 0)
//! to the classical limit (`ħω ≪ k_BT`, where a naive `exp(x) - 1` loses all
//! significant digits). The hyperbolic cotangent needed by both spectra is
//! taken from the same quantity through `coth(x/2) = 1 + 2 n_th(x)`.
//!
//! `T = 0` is an explicit branch everywhere.

use std::f64::consts::PI;

use thiserror::Error;

use crate::constants::{HBAR, K_B};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectraError {
    #[error("angular frequency must be finite and > 0, got {0}")]
    Frequency(f64),
    #[error("temperature must be finite and >= 0 K, got {0}")]
    Temperature(f64),
}

/// One sample of a spectral density.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpectralPoint {
    /// rad/s
    pub omega: f64,
    /// W/Hz for first-order, W²/Hz for second-order densities.
    pub value: f64,
}

fn check(omega: f64, temperature: f64) -> Result<(), SpectraError> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(SpectraError::Frequency(omega));
    }
    check_temperature(temperature)
}

fn check_temperature(temperature: f64) -> Result<(), SpectraError> {
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(SpectraError::Temperature(temperature));
    }
    Ok(())
}

/// Occupation from the reduced energy `x = ħω/k_BT`, `x > 0`.
#[inline]
fn occupation_from_ratio(x: f64) -> f64 {
    // expm1 overflows to +inf for x > ~709; 1/inf == 0 is the right limit.
    1.0 / x.exp_m1()
}

/// Bose-Einstein occupation `n_th = 1/(exp(ħω/k_BT) - 1)`.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64, SpectraError> {
    check(omega, temperature)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(occupation_from_ratio(HBAR * omega / (K_B * temperature)))
}

/// `coth(ħω/2k_BT)`; 1 at zero temperature.
fn coth_half_ratio(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        1.0
    } else {
        1.0 + 2.0 * occupation_from_ratio(HBAR * omega / (K_B * temperature))
    }
}

/// Power spectral density emitted into a matched line, `ħω(n_th + 1/2)`,
/// in W/Hz. This is a quarter of the short-circuit density
/// [`short_circuit_psd`].
pub fn thermal_psd(omega: f64, temperature: f64) -> Result<f64, SpectraError> {
    let n = bose_occupation(omega, temperature)?;
    Ok(HBAR * omega * (n + 0.5))
}

/// Short-circuit noise density `2ħω coth(ħω/2k_BT)`, W/Hz.
pub fn short_circuit_psd(omega: f64, temperature: f64) -> Result<f64, SpectraError> {
    check(omega, temperature)?;
    Ok(2.0 * HBAR * omega * coth_half_ratio(omega, temperature))
}

/// Intensity-fluctuation density
/// `ω (ħ²ω² + 4π²k_B²T²)/(12π) · coth(ħω/2k_BT)`, W²/Hz.
pub fn second_order_psd(omega: f64, temperature: f64) -> Result<f64, SpectraError> {
    check(omega, temperature)?;
    let quantum = HBAR * omega;
    let thermal = 2.0 * PI * K_B * temperature;
    let bracket = (quantum * quantum + thermal * thermal) / (12.0 * PI);
    Ok(omega * bracket * coth_half_ratio(omega, temperature))
}

/// Zero-frequency limits of the two densities:
/// `(k_BT, 2π k_B³T³ / 3ħ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcLimits {
    /// W/Hz
    pub first_order: f64,
    /// W²/Hz
    pub second_order: f64,
}

pub fn dc_limits(temperature: f64) -> Result<DcLimits, SpectraError> {
    check_temperature(temperature)?;
    let kt = K_B * temperature;
    Ok(DcLimits {
        first_order: kt,
        second_order: 2.0 * PI * kt * kt * kt / (3.0 * HBAR),
    })
}

/// Sample [`thermal_psd`] on a frequency grid.
pub fn thermal_spectrum(omegas: &[f64], temperature: f64) -> Result<Vec<SpectralPoint>, SpectraError> {
    omegas
        .iter()
        .map(|&omega| Ok(SpectralPoint { omega, value: thermal_psd(omega, temperature)? }))
        .collect()
}

/// Sample [`second_order_psd`] on a frequency grid.
pub fn second_order_spectrum(
    omegas: &[f64],
    temperature: f64,
) -> Result<Vec<SpectralPoint>, SpectraError> {
    omegas
        .iter()
        .map(|&omega| Ok(SpectralPoint { omega, value: second_order_psd(omega, temperature)? }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::hz_to_rad;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Temperature at which ħω = k_B T for the given ω.
    fn unit_ratio_temperature(omega: f64, ratio: f64) -> f64 {
        HBAR * omega / (K_B * ratio)
    }

    #[test]
    fn occupation_examples() {
        let w = hz_to_rad(6.07e9);
        assert_eq!(bose_occupation(w, 0.0).unwrap(), 0.0);
        let t = unit_ratio_temperature(w, 1.0);
        assert_relative_eq!(bose_occupation(w, t).unwrap(), 1.0 / (std::f64::consts::E - 1.0), max_relative = 1e-14);
        assert_relative_eq!(bose_occupation(hz_to_rad(6.92e9), 1.5).unwrap(), 4.035, epsilon = 1e-3);
    }

    #[test]
    fn occupation_rejects_bad_input() {
        assert_eq!(bose_occupation(0.0, 1.0), Err(SpectraError::Frequency(0.0)));
        assert_eq!(bose_occupation(-1.0, 1.0), Err(SpectraError::Frequency(-1.0)));
        assert_eq!(bose_occupation(1.0, -0.1), Err(SpectraError::Temperature(-0.1)));
        assert!(bose_occupation(f64::NAN, 1.0).is_err());
        assert!(second_order_psd(0.0, 1.0).is_err());
    }

    #[test]
    fn thermal_psd_examples() {
        let w = hz_to_rad(6.07e9);
        assert_eq!(thermal_psd(w, 0.0).unwrap(), HBAR * w / 2.0);
        // 2.078e-23 W/Hz ± 0.1 %
        assert_relative_eq!(thermal_psd(w, 1.5).unwrap(), 2.078e-23, max_relative = 1e-3);
        for &t in &[0.0, 0.01, 0.05, 1.5, 10.0] {
            let ratio = thermal_psd(w, t).unwrap() / short_circuit_psd(w, t).unwrap();
            assert_relative_eq!(ratio, 0.25, max_relative = 1e-14);
        }
    }

    #[test]
    fn second_order_examples() {
        let w = hz_to_rad(6.92e9);
        assert_relative_eq!(
            second_order_psd(w, 0.0).unwrap(),
            HBAR * HBAR * w.powi(3) / (12.0 * PI),
            max_relative = 1e-14
        );
        let one_hz = hz_to_rad(1.0);
        let dc = dc_limits(1.5).unwrap().second_order;
        assert_relative_eq!(dc, 1.764e-34, max_relative = 1e-3);
        assert_relative_eq!(second_order_psd(one_hz, 1.5).unwrap(), dc, max_relative = 1e-8);
        assert!(second_order_psd(w, 1.5).unwrap() > second_order_psd(w, 0.05).unwrap());
    }

    #[test]
    fn dc_limit_examples() {
        let zero = dc_limits(0.0).unwrap();
        assert_eq!((zero.first_order, zero.second_order), (0.0, 0.0));
        assert_relative_eq!(dc_limits(0.05).unwrap().first_order, 6.903e-25, max_relative = 1e-3);
        assert!(dc_limits(-1.0).is_err());
    }

    #[test]
    fn classical_limit_of_occupation() {
        let w = hz_to_rad(5e9);
        let t = unit_ratio_temperature(w, 1e-4);
        let expected = K_B * t / (HBAR * w) - 0.5;
        assert!((bose_occupation(w, t).unwrap() - expected).abs() / expected < 1e-3);
    }

    #[test]
    fn quantum_limit_is_exponentially_small() {
        let w = hz_to_rad(5e9);
        let t = unit_ratio_temperature(w, 50.0);
        let n = bose_occupation(w, t).unwrap();
        assert!(n > 0.0 && n < 2.0 * (-50f64).exp());
        let excess = (thermal_psd(w, t).unwrap() - HBAR * w / 2.0) / (HBAR * w);
        assert!(excess >= 0.0 && excess < 2.0 * (-50f64).exp());
    }

    #[test]
    fn second_order_matches_dc_limit() {
        for &t in &[0.05, 0.3, 1.5, 10.0] {
            let w = K_B * t * 1e-6 / HBAR;
            let ratio = second_order_psd(w, t).unwrap() / dc_limits(t).unwrap().second_order;
            assert!((ratio - 1.0).abs() < 1e-5, "T = {t}: ratio {ratio}");
        }
    }

    #[test]
    fn spectra_helpers() {
        let pts = thermal_spectrum(&[1.0, 2.0], 0.1).unwrap();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[1].omega, 2.0);
        assert!(second_order_spectrum(&[1.0, -2.0], 0.1).is_err());
    }

    proptest! {
        #[test]
        fn finite_over_full_range(log_f in -4.0f64..12.0, t in 0.0f64..10.0) {
            let w = hz_to_rad(10f64.powf(log_f));
            let n = bose_occupation(w, t).unwrap();
            let s1 = thermal_psd(w, t).unwrap();
            let s2 = second_order_psd(w, t).unwrap();
            prop_assert!(n.is_finite() && n >= 0.0);
            prop_assert!(s1.is_finite() && s1 > 0.0);
            prop_assert!(s2.is_finite() && s2 > 0.0);
        }

        #[test]
        fn occupation_monotone_in_temperature(log_f in 6.0f64..11.0, t in 0.0f64..5.0, dt in 1e-3f64..1.0) {
            let w = hz_to_rad(10f64.powf(log_f));
            prop_assert!(bose_occupation(w, t + dt).unwrap() >= bose_occupation(w, t).unwrap());
        }
    }
}
