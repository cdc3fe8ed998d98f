//! Tables and their CSV/JSON renderings.
//!
//! Reals are written as `{:.16e}` (17 significant digits), which parses back
//! to the same `f64`. Gaps are empty CSV cells and JSON nulls.

use std::fmt;
use std::io::Write;

use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(Option<f64>),
    Text(String),
}

impl Cell {
    /// Inverse of the `Display` rendering.
    pub fn parse(s: &str) -> Cell {
        if s.is_empty() {
            return Cell::Real(None);
        }
        if let Ok(i) = s.parse::<i64>() {
            return Cell::Int(i);
        }
        match s.parse::<f64>() {
            Ok(x) => Cell::Real(Some(x)),
            Err(_) => Cell::Text(s.to_string()),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Real(Some(x)) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Real(None) => Value::Null,
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Real(Some(x)) if x.is_finite() => write!(f, "{x:.16e}"),
            Cell::Real(Some(x)) => write!(f, "{x}"),
            Cell::Real(None) => Ok(()),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(Some(x))
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// Column-named rows plus `key: value` metadata. Metadata becomes `#`
/// comment lines in CSV and extra fields of every JSON row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { meta: Vec::new(), columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> Result<(), CliError> {
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string())).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(input: &str) -> Result<Table, CliError> {
        let meta = input
            .lines()
            .take_while(|l| l.starts_with('#'))
            .filter_map(|l| l.trim_start_matches('#').trim().split_once(": "))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input.as_bytes());
        let columns = r.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.map(|rec| rec.iter().map(Cell::parse).collect()))
            .collect::<Result<Vec<Vec<Cell>>, _>>()
            .map_err(csv_error)?;
        Ok(Table { meta, columns, rows })
    }

    pub fn to_json(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (k, v) in &self.meta {
                    obj.insert(k.clone(), Value::from(v.as_str()));
                }
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert(name.clone(), cell.to_json());
                }
                Value::Object(obj)
            })
            .collect();
        Value::Array(rows)
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_keep_every_bit() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, 6.02e23, -0.0, f64::MIN_POSITIVE, f64::MAX] {
            match Cell::parse(&Cell::from(x).to_string()) {
                Cell::Real(Some(y)) => assert_eq!(x.to_bits(), y.to_bits(), "{x}"),
                other => panic!("{x} parsed as {other:?}"),
            }
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["s_db", "b_param", "p"]).with_meta("figure", "3a");
        t.push(vec![2.0.into(), None.into(), 0.5.into()]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# figure: 3a\ns_db,b_param,p\n2.0000000000000000e0,,5.0000000000000000e-1\n"
        );
        assert_eq!(Table::read_csv(&text).unwrap(), t);
    }

    #[test]
    fn json_rows_carry_metadata_and_nulls() {
        let mut t = Table::new(["k", "v"]).with_meta("case", "odd");
        t.push(vec![3usize.into(), None.into()]);
        assert_eq!(t.to_json().to_string(), r#"[{"case":"odd","k":3,"v":null}]"#);
    }
}
