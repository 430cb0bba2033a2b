// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! Uniformly sampled time series.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("sample interval must be finite and > 0, got {0}")]
    Interval(f64),
    #[error("a series needs at least 2 samples, got {0}")]
    TooShort(usize),
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("sampling is not uniform: interval {index} is {got:e} s, expected {expected:e} s")]
    NonUniform { index: usize, got: f64, expected: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeSeries {
    /// s
    pub t0: f64,
    /// s
    pub dt: f64,
    pub values: Vec<f64>,
    pub seed_used: u64,
}

impl TimeSeries {
    pub fn new(t0: f64, dt: f64, values: Vec<f64>, seed_used: u64) -> Result<Self, SeriesError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SeriesError::Interval(dt));
        }
        if values.len() < 2 {
            return Err(SeriesError::TooShort(values.len()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(SeriesError::NonFinite { index });
        }
        Ok(Self { t0, dt, values, seed_used })
    }

    /// Builds a series from explicit sample times, which must be uniformly
    /// spaced to within 1e-6 of the mean interval.
    pub fn from_samples(times: &[f64], values: Vec<f64>, seed_used: u64) -> Result<Self, SeriesError> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(SeriesError::TooShort(times.len().min(values.len())));
        }
        let n = times.len();
        let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SeriesError::Interval(dt));
        }
        for (index, w) in times.windows(2).enumerate() {
            let got = w[1] - w[0];
            if (got - dt).abs() > 1e-6 * dt {
                return Err(SeriesError::NonUniform { index, got, expected: dt });
            }
        }
        Self::new(times[0], dt, values, seed_used)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.time(i))
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (self.len() - 1) as f64
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { values: self.values.iter().map(|&v| f(v)).collect(), ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_checks() {
        assert!(TimeSeries::new(0.0, 1.0, vec![1.0, 2.0], 0).is_ok());
        assert_eq!(TimeSeries::new(0.0, 0.0, vec![1.0, 2.0], 0), Err(SeriesError::Interval(0.0)));
        assert_eq!(TimeSeries::new(0.0, 1.0, vec![1.0], 0), Err(SeriesError::TooShort(1)));
        assert_eq!(TimeSeries::new(0.0, 1.0, vec![1.0, f64::NAN], 0), Err(SeriesError::NonFinite { index: 1 }));
    }

    #[test]
    fn from_samples_rejects_jitter() {
        let s = TimeSeries::from_samples(&[0.0, 10.0, 20.0, 30.0], vec![1.0; 4], 3).unwrap();
        assert_eq!(s.dt, 10.0);
        assert_eq!(s.time(3), 30.0);
        assert!(matches!(
            TimeSeries::from_samples(&[0.0, 10.0, 21.0, 30.0], vec![1.0; 4], 3),
            Err(SeriesError::NonUniform { index: 1, .. })
        ));
    }

    #[test]
    fn moments() {
        let s = TimeSeries::new(0.0, 1.0, vec![1.0, 2.0, 3.0, 4.0], 0).unwrap();
        assert_eq!(s.mean(), 2.5);
        assert!((s.variance() - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.duration(), 4.0);
    }
}
