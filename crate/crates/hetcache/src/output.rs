//! Result emission: CSV (RFC 4180, 12 significant digits) and JSON.
//!
//! Output is a pure function of the rows, so identical inputs give
//! byte-identical files.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::OutputFormat;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// One harness result: a sweep point evaluated under one policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub sweep_value: Option<f64>,
    pub policy: String,
    pub analytic_hit: f64,
    pub simulated_hit: Option<f64>,
    pub stderr: Option<f64>,
    pub objective_gap: Option<f64>,
    pub backhaul_latency_ms: Option<f64>,
}

/// Formats `v` with `sig` significant digits, positional where the exponent
/// allows it and scientific otherwise, trailing zeros trimmed. Mirrors
/// printf's `%g` but with a fixed, locale-independent '.' separator.
pub fn fmt_sig(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let formatted = format!("{:.*e}", sig - 1, v);
    let (mantissa, exponent) = formatted
        .split_once('e')
        .expect("exponential format contains 'e'");
    let exp: i32 = exponent.parse().expect("valid exponent");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };
    let body = if exp >= -4 && exp < sig as i32 {
        if exp >= 0 {
            let point = exp as usize + 1;
            if digits.len() > point {
                format!("{}.{}", &digits[..point], &digits[point..])
            } else {
                format!("{}{}", digits, "0".repeat(point - digits.len()))
            }
        } else {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        }
    } else {
        let tail = &digits[1..];
        if tail.is_empty() {
            format!("{}e{}", &digits[..1], exp)
        } else {
            format!("{}.{}e{}", &digits[..1], tail, exp)
        }
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| fmt_sig(x, 12)).unwrap_or_default()
}

/// Writes rows in the requested format. CSV carries exactly the `ResultRow`
/// field names as header; empty rows produce a header-only file.
pub fn write_results<W: Write>(
    rows: &[ResultRow],
    format: OutputFormat,
    writer: W,
) -> Result<(), OutputError> {
    match format {
        OutputFormat::Csv => {
            let mut csv = csv::Writer::from_writer(writer);
            csv.write_record([
                "sweep_value",
                "policy",
                "analytic_hit",
                "simulated_hit",
                "stderr",
                "objective_gap",
                "backhaul_latency_ms",
            ])?;
            for row in rows {
                csv.write_record([
                    opt(row.sweep_value),
                    row.policy.clone(),
                    fmt_sig(row.analytic_hit, 12),
                    opt(row.simulated_hit),
                    opt(row.stderr),
                    opt(row.objective_gap),
                    opt(row.backhaul_latency_ms),
                ])?;
            }
            csv.flush().map_err(|e| OutputError::Io {
                path: "<writer>".to_string(),
                source: e,
            })?;
        }
        OutputFormat::Json => {
            let mut writer = writer;
            serde_json::to_writer_pretty(&mut writer, rows)?;
            writeln!(writer).map_err(|e| OutputError::Io {
                path: "<writer>".to_string(),
                source: e,
            })?;
        }
    }
    Ok(())
}

/// Writes rows to a file path.
pub fn emit_results(
    rows: &[ResultRow],
    format: OutputFormat,
    path: impl AsRef<Path>,
) -> Result<(), OutputError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| OutputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_results(rows, format, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.2, 12), "0.2");
        assert_eq!(fmt_sig(0.5600991535115574, 12), "0.560099153512");
        assert_eq!(fmt_sig(-4.0, 12), "-4");
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(123456.0, 12), "123456");
        assert_eq!(fmt_sig(1e-7, 12), "1e-7");
        assert_eq!(fmt_sig(1.25e15, 12), "1.25e15");
        assert_eq!(fmt_sig(238.0, 12), "238");
    }

    fn sample_rows() -> Vec<ResultRow> {
        vec![
            ResultRow {
                sweep_value: Some(0.2),
                policy: "tlcp-uniform".into(),
                analytic_hit: 0.512345678901234,
                simulated_hit: Some(0.511),
                stderr: Some(0.0016),
                objective_gap: None,
                backhaul_latency_ms: Some(151.25),
            },
            ResultRow {
                sweep_value: Some(0.2),
                policy: "mpcp".into(),
                analytic_hit: 0.498,
                simulated_hit: None,
                stderr: None,
                objective_gap: Some(0.028),
                backhaul_latency_ms: None,
            },
        ]
    }

    #[test]
    fn csv_shape() {
        let mut buf = Vec::new();
        write_results(&sample_rows(), OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            "sweep_value,policy,analytic_hit,simulated_hit,stderr,objective_gap,backhaul_latency_ms"
        );
        // Constant field count across rows.
        for line in &lines[1..] {
            assert_eq!(line.matches(',').count(), 6, "{line}");
        }
    }

    #[test]
    fn header_only_for_empty_rows() {
        let mut buf = Vec::new();
        write_results(&[], OutputFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
    }

    #[test]
    fn json_round_trip_exact() {
        let rows = sample_rows();
        let mut buf = Vec::new();
        write_results(&rows, OutputFormat::Json, &mut buf).unwrap();
        let parsed: Vec<ResultRow> = serde_json::from_slice(&buf).unwrap();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn byte_identical_for_identical_rows() {
        let rows = sample_rows();
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_results(&rows, OutputFormat::Csv, &mut a).unwrap();
        write_results(&rows, OutputFormat::Csv, &mut b).unwrap();
        assert_eq!(a, b);
    }
}
