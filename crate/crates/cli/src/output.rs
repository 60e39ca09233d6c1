//! CSV and JSON rendering.
//!
//! CSV numbers carry 12 significant digits in plain or exponent notation,
//! never locale formatting. JSON numbers are shortest round-trip literals.

use std::io::Write;

use anyhow::Context;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

const SIG_DIGITS: i32 = 12;

pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "NaN".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", (SIG_DIGITS - 1) as usize, 0.0);
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..15).contains(&exponent) {
        format!("{:.*}", (SIG_DIGITS - 1 - exponent).max(0) as usize, x)
    } else {
        format!("{:.*e}", (SIG_DIGITS - 1) as usize, x)
    }
}

/// Numeric table with named columns; missing cells are `None`.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn render(&self, format: Format) -> anyhow::Result<String> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(|v| v.map(format_number).unwrap_or_default()))?;
                }
                into_string(w)
            }
            Format::Json => {
                let doc = serde_json::json!({ "columns": self.columns, "rows": self.rows });
                Ok(serde_json::to_string_pretty(&doc)? + "\n")
            }
        }
    }
}

/// A single record: a pretty JSON object, or a CSV header and one row with
/// nested objects flattened to `outer_inner` columns.
pub fn render_record<S: Serialize>(record: &S, format: Format) -> anyhow::Result<String> {
    let value = serde_json::to_value(record)?;
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&value)? + "\n"),
        Format::Csv => {
            let Value::Object(map) = value else {
                anyhow::bail!("record is not an object");
            };
            let mut fields = Vec::new();
            flatten("", &map, &mut fields);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(fields.iter().map(|(k, _)| k))?;
            w.write_record(fields.iter().map(|(_, v)| v))?;
            into_string(w)
        }
    }
}

fn flatten(prefix: &str, map: &Map<String, Value>, out: &mut Vec<(String, String)>) {
    for (key, value) in map {
        let name = if prefix.is_empty() { key.clone() } else { format!("{prefix}_{key}") };
        match value {
            Value::Object(inner) => flatten(&name, inner, out),
            Value::Number(n) => {
                let cell = match (n.as_u64(), n.as_i64()) {
                    (Some(u), _) => u.to_string(),
                    (None, Some(i)) => i.to_string(),
                    _ => format_number(n.as_f64().unwrap_or(f64::NAN)),
                };
                out.push((name, cell));
            }
            Value::String(s) => out.push((name, s.clone())),
            Value::Bool(b) => out.push((name, b.to_string())),
            Value::Null => out.push((name, String::new())),
            Value::Array(items) => out.push((name, serde_json::to_string(items).unwrap_or_default())),
        }
    }
}

fn into_string(w: csv::Writer<Vec<u8>>) -> anyhow::Result<String> {
    let bytes = w.into_inner().context("flushing CSV")?;
    Ok(String::from_utf8(bytes)?)
}

/// Writes to standard output, treating a closed pipe as success.
pub fn write_stdout(s: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(s.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_twelve_significant_digits() {
        assert_eq!(format_number(0.1), "0.100000000000");
        assert_eq!(format_number(0.608_347_123_456_789), "0.608347123457");
        assert_eq!(format_number(1234.5), "1234.50000000");
        assert_eq!(format_number(-2.5e-9), "-2.50000000000e-9");
        assert_eq!(format_number(0.0), "0.00000000000");
        for x in [3.3e-7, 0.15865525393145707, 7.389_056_098_930_65, 1e20] {
            let back: f64 = format_number(x).parse().unwrap();
            assert!(((back - x) / x).abs() < 1e-11);
        }
    }

    #[test]
    fn table_csv_has_header_and_empty_missing_cells() {
        let t = Table {
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![Some(1.0), None]],
        };
        assert_eq!(t.render(Format::Csv).unwrap(), "a,b\n1.00000000000,\n");
    }
}
