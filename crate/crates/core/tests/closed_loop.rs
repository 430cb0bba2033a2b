// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use thermoq::decoherence::gamma1_antenna_model;
use thermoq::experiments::{fit_trace, linear_times, simulate_trace, TraceKind};
use thermoq::fitting::linear_fit;
use thermoq::spectral::{fit_knee_spectrum, psd_estimate};
use thermoq::tls::{sample_ensemble, simulate_microscopic, EnsembleConfig};
use thermoq::units::{hz_to_rad, rad_to_hz};

#[test]
fn microscopic_ensemble_gives_one_over_f() {
    let omega_q = hz_to_rad(6.92e9);
    let betas: Vec<Option<f64>> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let ensemble = sample_ensemble(&EnsembleConfig { seed, ..EnsembleConfig::default() }).unwrap();
            let series = simulate_microscopic(&ensemble, omega_q, 1.0, 12_000.0, 10.0, seed).unwrap();
            fit_knee_spectrum(&psd_estimate(&series).unwrap()).unwrap().beta
        })
        .collect();
    let inside = betas.iter().filter(|b| b.is_some_and(|b| (0.7..=1.3).contains(&b))).count();
    assert!(inside >= 80, "{inside}/100 inside [0.7, 1.3]: {betas:?}");
}

#[test]
fn relaxation_estimator_is_unbiased() {
    let truth = hz_to_rad(3.9e6);
    let times = linear_times(41, 200e-9);
    let rates: Vec<f64> = (0..200u64)
        .into_par_iter()
        .map(|seed| {
            let trace = simulate_trace(TraceKind::Relaxation, truth, 0.0, &times, Some(400_000), seed).unwrap();
            fit_trace(&trace).unwrap().rate
        })
        .collect();
    let mean = rates.iter().sum::<f64>() / rates.len() as f64;
    assert!((mean / truth - 1.0).abs() < 0.01, "mean {} Hz", rad_to_hz(mean));
}

#[test]
fn antenna_slope_is_recovered_on_average() {
    let (g0, ga) = (hz_to_rad(3.9e6), hz_to_rad(820e3));
    let n_a: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let noise = Normal::new(0.0, hz_to_rad(215e3)).unwrap();
    let fits: Vec<(f64, f64)> = (0..50u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y: Vec<f64> = n_a.iter().map(|&n| gamma1_antenna_model(n, g0, ga).unwrap() + noise.sample(&mut rng)).collect();
            let f = linear_fit(&n_a, &y).unwrap();
            (f.values[0], f.std_errs()[0])
        })
        .collect();
    let n = fits.len() as f64;
    let mean = fits.iter().map(|f| f.0).sum::<f64>() / n;
    let se = fits.iter().map(|f| f.1).sum::<f64>() / n / n.sqrt();
    assert!((mean - 2.0 * ga).abs() <= 2.0 * se, "slope {} vs {} (se {})", mean, 2.0 * ga, se);
    let expected_se = {
        let mx = 0.5;
        let sxx: f64 = n_a.iter().map(|x| (x - mx) * (x - mx)).sum();
        hz_to_rad(215e3) / sxx.sqrt()
    };
    assert!((fits.iter().map(|f| f.1).sum::<f64>() / n / expected_se - 1.0).abs() < 0.1);
}
