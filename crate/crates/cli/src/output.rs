//! Report writers.
//!
//! JSON: `{"config": <resolved config>, "result": <command record>}`.
//! CSV: one `# config: <json>` comment line, a header, then one row per
//! record. Floats are written with 17 significant digits.

use std::io::Write;

use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::Failure;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
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

/// Coordinates joined with `;` so they fit one CSV field.
pub fn coords(v: &[f64]) -> Cell {
    Cell::Text(v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(";"))
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// What a command produced, plus the exit code it asks for.
pub struct Outcome {
    pub result: serde_json::Value,
    pub table: Table,
    pub exit: Option<Failure>,
}

impl Outcome {
    pub fn new<R: Serialize>(result: &R, table: Table) -> Result<Self, Failure> {
        Ok(Self {
            result: serde_json::to_value(result).map_err(|e| Failure::Io(e.to_string()))?,
            table,
            exit: None,
        })
    }

    pub fn fail_with(mut self, f: Option<Failure>) -> Self {
        self.exit = f;
        self
    }
}

pub fn render(cfg: &RunConfig, out: &Outcome) -> Result<Vec<u8>, Failure> {
    let io = |e: &dyn std::fmt::Display| Failure::Io(e.to_string());
    match cfg.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                config: &'a RunConfig,
                result: &'a serde_json::Value,
            }
            let mut buf = serde_json::to_vec_pretty(&Doc {
                config: cfg,
                result: &out.result,
            })
            .map_err(|e| io(&e))?;
            buf.push(b'\n');
            Ok(buf)
        }
        Format::Csv => {
            let mut buf = Vec::new();
            let echo = serde_json::to_string(cfg).map_err(|e| io(&e))?;
            writeln!(buf, "# config: {echo}").map_err(|e| io(&e))?;
            {
                let mut w = csv::Writer::from_writer(&mut buf);
                w.write_record(&out.table.header).map_err(|e| io(&e))?;
                for row in &out.table.rows {
                    w.write_record(row.iter().map(Cell::render)).map_err(|e| io(&e))?;
                }
                w.flush().map_err(|e| io(&e))?;
            }
            Ok(buf)
        }
    }
}

pub fn emit(cfg: &RunConfig, bytes: &[u8]) -> Result<(), Failure> {
    match &cfg.output_path {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Failure::Io(format!("cannot write {path}: {e}"))),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| Failure::Io(e.to_string())),
    }
}
