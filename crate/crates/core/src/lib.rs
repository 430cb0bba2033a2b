// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Thermal-field decoherence of a flux-tunable transmon: thermal noise
//! spectra, resonator-mediated relaxation and dephasing, two-level
//! fluctuator simulation, spectral estimation and fitting.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cavity;
pub mod cli;
pub mod constants;
pub mod decoherence;
pub mod experiments;
pub mod fitting;
pub mod series;
pub mod spectra;
pub mod spectral;
pub mod tls;
pub mod units;
