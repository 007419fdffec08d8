//! Row tables and their CSV/JSON encodings.
//!
//! Floats print with 17 significant digits in CSV (`{:.16e}`) and as
//! shortest round-trip numbers in JSON. Both encodings are deterministic.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::args::Format;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if v.is_nan() => "nan".into(),
            Cell::Float(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) if v.is_finite() => json!(v),
            Cell::Float(_) | Cell::Empty => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

/// Fixed trailing columns of every table.
pub const TRAILING: [&str; 4] = ["value", "source", "residual", "status"];

#[derive(Debug, Clone)]
pub struct Row {
    pub inputs: Vec<Cell>,
    pub value: Cell,
    pub source: String,
    pub residual: Cell,
    pub status: String,
}

impl Row {
    pub fn ok(inputs: Vec<Cell>, value: impl Into<Cell>, source: &str, residual: impl Into<Cell>) -> Self {
        Self {
            inputs,
            value: value.into(),
            source: source.into(),
            residual: residual.into(),
            status: "ok".into(),
        }
    }

    pub fn failed(inputs: Vec<Cell>, source: &str, kind: &str) -> Self {
        Self {
            inputs,
            value: Cell::Empty,
            source: source.into(),
            residual: Cell::Empty,
            status: format!("error:{kind}"),
        }
    }

    pub fn is_error(&self) -> bool {
        self.status.starts_with("error") || self.status == "fail"
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub inputs: Vec<&'static str>,
    pub rows: Vec<Row>,
}

impl Table {
    pub fn new(inputs: Vec<&'static str>) -> Self {
        Self {
            inputs,
            rows: Vec::new(),
        }
    }

    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(Row::is_error)
    }

    fn header(&self) -> Vec<&str> {
        self.inputs.iter().copied().chain(TRAILING).collect()
    }

    fn cells(row: &Row) -> Vec<Cell> {
        let mut out = row.inputs.clone();
        out.push(row.value.clone());
        out.push(Cell::Text(row.source.clone()));
        out.push(row.residual.clone());
        out.push(Cell::Text(row.status.clone()));
        out
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> Result<(), CliError> {
        writeln!(w, "{}", self.header().join(","))?;
        for row in &self.rows {
            let line: Vec<String> = Self::cells(row).iter().map(|c| escape(&c.csv())).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn write_json(&self, w: &mut dyn Write, metadata: Value) -> Result<(), CliError> {
        let header = self.header();
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (k, c) in header.iter().zip(Self::cells(row)) {
                    m.insert((*k).to_string(), c.json());
                }
                Value::Object(m)
            })
            .collect();
        let doc = json!({ "metadata": metadata, "records": records });
        serde_json::to_writer_pretty(&mut *w, &doc).map_err(|e| CliError::Output(e.to_string()))?;
        writeln!(w)?;
        Ok(())
    }

    pub fn write(&self, w: &mut dyn Write, format: Format, metadata: Value) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w, metadata),
        }
    }
}

fn escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
