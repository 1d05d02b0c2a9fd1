//! Result tables and their CSV / JSON encodings.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::sweep::Provenance;

pub const DEFAULT_PRECISION: usize = 12;
pub const PRECISION_RANGE: std::ops::RangeInclusive<usize> = 6..=17;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
    Null,
}

impl Cell {
    /// Non-finite numbers become `Null` so every table survives JSON.
    pub fn num(x: f64) -> Cell {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Null
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    /// Numeric column with `None` for nulls and text.
    pub fn numbers(&self, name: &str) -> Option<Vec<Option<f64>>> {
        Some(self.column(name)?.into_iter().map(Cell::as_f64).collect())
    }
}

/// A table plus the provenance of every sweep that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub provenance: Vec<Provenance>,
    pub table: Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputOptions {
    pub format: Format,
    pub precision: usize,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            format: Format::Csv,
            precision: DEFAULT_PRECISION,
        }
    }
}

impl OutputOptions {
    pub fn validate(&self) -> CliResult<()> {
        if !PRECISION_RANGE.contains(&self.precision) {
            return Err(CliError::config(format!(
                "precision {} outside {}..={}",
                self.precision,
                PRECISION_RANGE.start(),
                PRECISION_RANGE.end()
            )));
        }
        Ok(())
    }
}

/// Shortest `%g`-style rendering with `digits` significant digits.
///
/// Plain notation for decimal exponents in `[-5, digits)`, scientific
/// otherwise; trailing zeros are trimmed. Independent of locale.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        return format!("{mantissa}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn encode_csv(table: &Table, precision: usize) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(&table.columns).map_err(io)?;
    for row in &table.rows {
        let fields = row.iter().map(|c| match c {
            Cell::Num(x) => format_significant(*x, precision),
            Cell::Text(s) => s.clone(),
            Cell::Null => String::new(),
        });
        w.write_record(fields).map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))
}

/// Full-precision JSON; `decode_json(encode_json(d)) == d`.
pub fn encode_json(doc: &Document) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(doc).map_err(|e| CliError::Io(e.into()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn decode_json(bytes: &[u8]) -> CliResult<Document> {
    serde_json::from_slice(bytes).map_err(|e| CliError::config(format!("json: {e}")))
}

/// Encodes a document. CSV carries only the table; its provenance goes to
/// the second buffer as JSON.
pub fn encode(doc: &Document, opts: &OutputOptions) -> CliResult<(Vec<u8>, Option<Vec<u8>>)> {
    opts.validate()?;
    match opts.format {
        Format::Csv => {
            let prov = serde_json::to_vec_pretty(&doc.provenance).map_err(|e| CliError::Io(e.into()))?;
            Ok((encode_csv(&doc.table, opts.precision)?, Some(prov)))
        }
        Format::Json => Ok((encode_json(doc)?, None)),
    }
}

/// Writes the encoded document to `path` (with a `.provenance.json` sidecar
/// for CSV) or to standard output. Everything is encoded before the first
/// byte is written.
pub fn emit(doc: &Document, opts: &OutputOptions, path: Option<&std::path::Path>) -> CliResult<()> {
    let (body, sidecar) = encode(doc, opts)?;
    match path {
        Some(p) => {
            std::fs::write(p, &body)?;
            if let Some(prov) = sidecar {
                let mut side = p.as_os_str().to_owned();
                side.push(".provenance.json");
                std::fs::write(side, prov)?;
            }
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(&body)?;
            out.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_formatting() {
        assert_eq!(format_significant(0.5, 12), "0.5");
        assert_eq!(format_significant(1.0 / 3.0, 6), "0.333333");
        assert_eq!(format_significant(628.3185307179586, 12), "628.318530718");
        assert_eq!(format_significant(1.5e-7, 12), "1.5e-7");
        assert_eq!(format_significant(-2.0e20, 6), "-2e20");
        assert_eq!(format_significant(123456.0, 6), "123456");
        assert_eq!(format_significant(1234567.0, 6), "1.23457e6");
        assert_eq!(format_significant(0.0, 12), "0");
    }

    #[test]
    fn csv_uses_lf_and_blank_nulls() {
        let t = Table {
            columns: vec!["x".into(), "y".into(), "status".into()],
            rows: vec![
                vec![Cell::Num(0.25), Cell::Null, Cell::Text("zero_detuning".into())],
                vec![Cell::Num(1.0), Cell::Num(-0.5), Cell::Text("ok".into())],
            ],
        };
        let s = String::from_utf8(encode_csv(&t, 12).unwrap()).unwrap();
        assert_eq!(s, "x,y,status\n0.25,,zero_detuning\n1,-0.5,ok\n");
    }

    #[test]
    fn precision_is_bounded() {
        assert!(OutputOptions {
            format: Format::Csv,
            precision: 5
        }
        .validate()
        .is_err());
        assert!(OutputOptions {
            format: Format::Csv,
            precision: 17
        }
        .validate()
        .is_ok());
    }

    #[test]
    fn non_finite_becomes_null() {
        assert_eq!(Cell::num(f64::NAN), Cell::Null);
        assert_eq!(Cell::num(2.0), Cell::Num(2.0));
    }
}
