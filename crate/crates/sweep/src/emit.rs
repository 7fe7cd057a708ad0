//! Result table output.
//!
//! Both encodings print floats through the same 9-significant-digit
//! formatter, so a CSV and a JSON of the same sweep carry identical values
//! and reruns diff cleanly.

use std::io::Write;

use serde_json::{json, Value};
use thiserror::Error;

use crate::config::OutputFormat;
use crate::runner::ResultRow;

pub const CSV_HEADER: [&str; 8] = [
    "scenario",
    "engine",
    "lambda_per_km2",
    "gamma_db",
    "p_cov",
    "ase_bps_hz_km2",
    "ci_half_width",
    "error",
];

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("no rows to write; the sweep produced an empty table")]
    Empty,
    #[error("csv write failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("json write failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// Writes the table in the requested encoding.
pub fn write_table<W: Write>(
    rows: &[ResultRow],
    format: OutputFormat,
    out: W,
) -> Result<(), EmitError> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Json => write_json(rows, out),
    }
}

/// CSV with a fixed header; absent values are empty fields.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), EmitError> {
    if rows.is_empty() {
        return Err(EmitError::Empty);
    }
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record([
            row.scenario.as_str(),
            row.engine,
            &sig(row.lambda_per_km2),
            &sig(row.gamma_db),
            &opt_sig(row.p_cov),
            &opt_sig(row.ase_bps_hz_km2),
            &opt_sig(row.ci_half_width),
            row.error.as_str(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

/// JSON array of row objects; absent values are `null`. Numbers are the
/// round-trip of the CSV formatting, so the encodings agree digit-for-digit.
pub fn write_json<W: Write>(rows: &[ResultRow], mut out: W) -> Result<(), EmitError> {
    if rows.is_empty() {
        return Err(EmitError::Empty);
    }
    let table: Vec<Value> = rows
        .iter()
        .map(|row| {
            json!({
                "scenario": row.scenario,
                "engine": row.engine,
                "lambda_per_km2": rounded(row.lambda_per_km2),
                "gamma_db": rounded(row.gamma_db),
                "p_cov": row.p_cov.map(rounded),
                "ase_bps_hz_km2": row.ase_bps_hz_km2.map(rounded),
                "ci_half_width": row.ci_half_width.map(rounded),
                "error": row.error,
            })
        })
        .collect();
    serde_json::to_writer_pretty(&mut out, &table)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// 9 significant digits, exponent notation.
fn sig(x: f64) -> String {
    format!("{x:.8e}")
}

fn opt_sig(x: Option<f64>) -> String {
    x.map(sig).unwrap_or_default()
}

fn rounded(x: f64) -> f64 {
    sig(x).parse().expect("formatter output parses back")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<ResultRow> {
        vec![
            ResultRow {
                scenario: "demo/curve".to_string(),
                engine: "analytic",
                lambda_per_km2: 100.0,
                gamma_db: 0.0,
                p_cov: Some(0.123456789123),
                ase_bps_hz_km2: None,
                ci_half_width: None,
                error: String::new(),
            },
            ResultRow {
                scenario: "demo/curve".to_string(),
                engine: "montecarlo",
                lambda_per_km2: 100.0,
                gamma_db: 0.0,
                p_cov: Some(0.1199),
                ase_bps_hz_km2: None,
                ci_half_width: Some(0.0064),
                error: "skipped: example".to_string(),
            },
        ]
    }

    #[test]
    fn csv_header_and_digit_budget_are_fixed() {
        let mut buf = Vec::new();
        write_csv(&sample_rows(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "scenario,engine,lambda_per_km2,gamma_db,p_cov,ase_bps_hz_km2,ci_half_width,error"
        );
        let first = lines.next().unwrap();
        assert!(first.contains("1.23456789e-1"), "{first}");
        assert!(first.contains("1.00000000e2"), "{first}");
        // Absent fields are empty, not zero.
        assert!(first.ends_with(",,,"), "{first}");
    }

    #[test]
    fn json_numbers_match_csv_digits() {
        let rows = sample_rows();
        let mut buf = Vec::new();
        write_json(&rows, &mut buf).unwrap();
        let table: Vec<serde_json::Value> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(table.len(), 2);
        let p = table[0]["p_cov"].as_f64().unwrap();
        assert_eq!(p, sig(rows[0].p_cov.unwrap()).parse::<f64>().unwrap());
        assert!(table[0]["ase_bps_hz_km2"].is_null());
        assert_eq!(table[1]["error"], "skipped: example");
    }

    #[test]
    fn empty_tables_are_an_error() {
        let mut buf = Vec::new();
        assert!(matches!(write_csv(&[], &mut buf), Err(EmitError::Empty)));
        assert!(matches!(write_json(&[], &mut buf), Err(EmitError::Empty)));
    }
}
