//! Numeric text, report rendering and the three output formats.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::ValueEnum;
use costeff_core::scalar::{parse_decimal, Rational};
use costeff_core::Scalar;
use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// Fixed 12-decimal rendering; negative zero prints as zero.
pub fn decimal(x: f64) -> String {
    let s = format!("{x:.12}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Scalars the CLI can read from text and print.
pub trait CliScalar: Scalar {
    /// Parse a decimal literal or a `p/q` fraction.
    fn parse_text(text: &str) -> Option<Self>;
    /// `p/q` (or an integer) when the value is exact.
    fn exact_text(&self) -> Option<String>;
    /// Shortest text that reads back to the same value.
    fn canonical_json(&self) -> Value;
}

fn split_fraction(text: &str) -> Option<(&str, &str)> {
    let (n, d) = text.split_once('/')?;
    Some((n.trim(), d.trim()))
}

impl CliScalar for f64 {
    fn parse_text(text: &str) -> Option<Self> {
        let text = text.trim();
        let v = match split_fraction(text) {
            Some((n, d)) => n.parse::<f64>().ok()? / d.parse::<f64>().ok()?,
            None => text.parse::<f64>().ok()?,
        };
        v.is_finite().then_some(v)
    }

    fn exact_text(&self) -> Option<String> {
        None
    }

    fn canonical_json(&self) -> Value {
        // Display for f64 is the shortest round-tripping form
        let mut s = self.to_string();
        if !s.contains(['.', 'e', 'E']) {
            s.push_str(".0");
        }
        Value::Number(serde_json::Number::from_str(&s).expect("finite float"))
    }
}

impl CliScalar for Rational {
    fn parse_text(text: &str) -> Option<Self> {
        match split_fraction(text.trim()) {
            Some((n, d)) => {
                let (n, d) = (parse_decimal(n)?, parse_decimal(d)?);
                (d != Rational::zero()).then(|| n / d)
            }
            None => parse_decimal(text),
        }
    }

    fn exact_text(&self) -> Option<String> {
        Some(if self.is_integer() { self.numer().to_string() } else { format!("{}/{}", self.numer(), self.denom()) })
    }

    fn canonical_json(&self) -> Value {
        if self.is_integer() {
            Value::Number(serde_json::Number::from_str(&self.numer().to_string()).expect("integer"))
        } else {
            Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }
}

/// How numbers are rendered in the report being built.
#[derive(Debug, Clone, Copy)]
pub struct Style {
    pub format: Format,
}

impl Style {
    pub fn num<S: CliScalar>(&self, x: &S) -> Num {
        match (self.format, x.exact_text()) {
            (Format::Table, Some(text)) => Num { text, numeric: false },
            _ => Num { text: decimal(x.to_f64()), numeric: true },
        }
    }

    pub fn float(&self, x: f64) -> Num {
        Num { text: decimal(x), numeric: true }
    }

    pub fn vec<S: CliScalar>(&self, xs: &[S]) -> Vec<Num> {
        xs.iter().map(|x| self.num(x)).collect()
    }

    pub fn mat<S: CliScalar>(&self, xs: &[Vec<S>]) -> Vec<Vec<Num>> {
        xs.iter().map(|x| self.vec(x)).collect()
    }
}

/// A rendered number: a JSON number at 12 decimals, or `p/q` text in table mode.
#[derive(Debug, Clone, PartialEq)]
pub struct Num {
    text: String,
    numeric: bool,
}

impl Num {
    pub fn as_str(&self) -> &str {
        &self.text
    }
}

impl Serialize for Num {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> Result<Z::Ok, Z::Error> {
        if self.numeric {
            serde_json::Number::from_str(&self.text).map_err(serde::ser::Error::custom)?.serialize(serializer)
        } else {
            serializer.serialize_str(&self.text)
        }
    }
}

/// Columnar data of a report, emitted as CSV and as an aligned block in table mode.
pub struct Rows {
    /// Field of the JSON report that holds the same data.
    pub field: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub trait Report: Serialize {
    fn rows(&self) -> Option<Rows> {
        None
    }
}

pub fn render<R: Report>(report: &R, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(|e| CliError::Output(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let (header, rows) = match report.rows() {
                Some(r) => (r.header.iter().map(|h| h.to_string()).collect(), r.rows),
                None => {
                    let value = serde_json::to_value(report).map_err(|e| CliError::Output(e.to_string()))?;
                    let mut flat = Vec::new();
                    flatten("", &value, &mut flat);
                    (vec!["key".to_string(), "value".to_string()], flat.into_iter().map(|(k, v)| vec![k, v]).collect())
                }
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header).map_err(|e| CliError::Output(e.to_string()))?;
            for row in rows {
                w.write_record(&row).map_err(|e| CliError::Output(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
        }
        Format::Table => {
            let mut value = serde_json::to_value(report).map_err(|e| CliError::Output(e.to_string()))?;
            let rows = report.rows();
            if let (Some(r), Value::Object(map)) = (&rows, &mut value) {
                map.shift_remove(r.field);
            }
            let mut flat = Vec::new();
            flatten("", &value, &mut flat);
            let mut out = String::new();
            let width = flat.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            for (k, v) in &flat {
                let _ = writeln!(out, "{k:<width$}  {v}");
            }
            if let Some(r) = rows {
                if !flat.is_empty() {
                    out.push('\n');
                }
                out.push_str(&columns(&r));
            }
            Ok(out)
        }
    }
}

fn columns(r: &Rows) -> String {
    let mut widths: Vec<usize> = r.header.iter().map(|h| h.len()).collect();
    for row in &r.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(r.header.clone(), &mut out);
    for row in &r.rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".to_string()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

/// `key.sub[i]` paths to leaf text; arrays of scalars print inline as a tuple.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        Value::Array(items) => {
            let texts: Option<Vec<String>> = items.iter().map(scalar_text).collect();
            match texts {
                Some(t) => out.push((prefix.to_string(), format!("({})", t.join(", ")))),
                None => {
                    for (i, child) in items.iter().enumerate() {
                        flatten(&format!("{prefix}[{i}]"), child, out);
                    }
                }
            }
        }
        _ => out.push((prefix.to_string(), scalar_text(v).unwrap_or_default())),
    }
}
