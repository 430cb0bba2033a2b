// Copyright 2026 thermoq contributors
// SPDX-License-Identifier: Apache-2.0

//! CSV tables with fixed headers.
//!
//! Numbers are written with 17 significant digits, so reading back a written
//! file reproduces every value bit for bit. The separator is always a comma
//! and the decimal mark always a point.

use std::io::{Read, Write};

use crate::series::TimeSeries;
use crate::spectral::Spectrum;
use crate::units::{hz_to_rad, rad_to_hz};

use super::CliError;

pub const SERIES_HEADER: [&str; 2] = ["time_s", "gamma1_hz"];
pub const SPECTRUM_HEADER: [&str; 2] = ["freq_hz", "psd_w_per_hz"];
pub const STARK_HEADER: [&str; 2] = ["temp_k", "shift_hz"];
pub const FLOOR_HEADER: [&str; 2] = ["temp_k", "mu_w_per_hz"];

pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_table<W: Write>(out: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| format_value(v))).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn io_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Reads a table whose header must equal `header`. Row numbers in errors
/// count the header as row 1.
pub fn read_table<R: Read>(input: R, header: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(input);
    let got = r.headers().map_err(|e| CliError::Validation(format!("csv header: {e}")))?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(CliError::Validation(format!(
            "csv header: expected `{}`, got `{}`",
            header.join(","),
            got.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let row_no = i + 2;
        let record = record.map_err(|e| CliError::Validation(format!("csv row {row_no}: {e}")))?;
        let values = record
            .iter()
            .map(|field| {
                field
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CliError::Validation(format!("csv row {row_no}: `{field}` is not a finite number")))
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(values);
    }
    Ok(rows)
}

fn pairs(rows: Vec<Vec<f64>>) -> Vec<(f64, f64)> {
    rows.into_iter().map(|r| (r[0], r[1])).collect()
}

/// Writes a γ1 series held in rad/s as Hz.
pub fn write_series<W: Write>(out: W, series: &TimeSeries) -> Result<(), CliError> {
    write_table(out, &SERIES_HEADER, series.times().zip(&series.values).map(|(t, &v)| vec![t, rad_to_hz(v)]))
}

/// Reads a series as written, values in Hz.
pub fn read_series_hz<R: Read>(input: R) -> Result<TimeSeries, CliError> {
    let (times, values): (Vec<f64>, Vec<f64>) = pairs(read_table(input, &SERIES_HEADER)?).into_iter().unzip();
    TimeSeries::from_samples(&times, values, 0).map_err(|e| CliError::Validation(format!("series: {e}")))
}

/// Reads a series and converts values to rad/s.
pub fn read_series<R: Read>(input: R) -> Result<TimeSeries, CliError> {
    Ok(read_series_hz(input)?.map(hz_to_rad))
}

pub fn write_spectrum<W: Write>(out: W, spectrum: &Spectrum) -> Result<(), CliError> {
    write_table(out, &SPECTRUM_HEADER, spectrum.omegas.iter().zip(&spectrum.values).map(|(&w, &s)| vec![rad_to_hz(w), s]))
}

/// Reads `(freq_hz, psd)` rows as written.
pub fn read_spectrum_rows<R: Read>(input: R) -> Result<Vec<(f64, f64)>, CliError> {
    Ok(pairs(read_table(input, &SPECTRUM_HEADER)?))
}

pub fn write_pairs<W: Write>(out: W, header: &[&str; 2], rows: &[(f64, f64)]) -> Result<(), CliError> {
    write_table(out, header, rows.iter().map(|&(a, b)| vec![a, b]))
}

pub fn read_pairs<R: Read>(input: R, header: &[&str; 2]) -> Result<Vec<(f64, f64)>, CliError> {
    Ok(pairs(read_table(input, header)?))
}
