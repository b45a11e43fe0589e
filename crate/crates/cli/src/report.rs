//! Tabular run reports rendered as JSON or CSV from the same formatted cells,
//! so both formats carry identical numbers.

use std::fmt::Write as _;

use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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
        v.map_or(Cell::Missing, Cell::Num)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    /// A single-row table from `(column, value)` pairs.
    pub fn record(name: &str, fields: Vec<(&str, Cell)>) -> Self {
        let (columns, row): (Vec<_>, Vec<_>) = fields.into_iter().unzip();
        let mut t = Table::new(name, &columns);
        t.push(row);
        t
    }

    /// Looks up a cell by column name.
    pub fn get(&self, row: usize, column: &str) -> Option<&Cell> {
        let j = self.columns.iter().position(|c| c == column)?;
        self.rows.get(row)?.get(j)
    }

    pub fn num(&self, row: usize, column: &str) -> Option<f64> {
        match self.get(row, column)? {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    /// Fully resolved configuration echoed into every output.
    pub config: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            command: command.to_string(),
            config,
            tables: Vec::new(),
        }
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn render(&self, format: Format, precision: usize) -> CliResult<String> {
        match format {
            Format::Json => Ok(self.to_json(precision)),
            Format::Csv => self.to_csv(precision),
        }
    }

    fn to_json(&self, precision: usize) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{{");
        let _ = writeln!(s, "  \"schema_version\": {SCHEMA_VERSION},");
        let _ = writeln!(s, "  \"command\": {},", json_str(&self.command));
        let _ = writeln!(s, "  \"config\": {},", self.config);
        let _ = writeln!(s, "  \"tables\": [");
        for (ti, t) in self.tables.iter().enumerate() {
            let cols: Vec<String> = t.columns.iter().map(|c| json_str(c)).collect();
            let _ = writeln!(s, "    {{");
            let _ = writeln!(s, "      \"name\": {},", json_str(&t.name));
            let _ = writeln!(s, "      \"columns\": [{}],", cols.join(", "));
            let _ = write!(s, "      \"rows\": [");
            for (ri, row) in t.rows.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|c| json_cell(c, precision)).collect();
                let sep = if ri + 1 == t.rows.len() { "" } else { "," };
                let _ = write!(s, "\n        [{}]{sep}", cells.join(", "));
            }
            let close = if t.rows.is_empty() { "]" } else { "\n      ]" };
            let _ = writeln!(s, "{close}");
            let sep = if ti + 1 == self.tables.len() { "" } else { "," };
            let _ = writeln!(s, "    }}{sep}");
        }
        let _ = writeln!(s, "  ]");
        let _ = writeln!(s, "}}");
        s
    }

    fn to_csv(&self, precision: usize) -> CliResult<String> {
        let mut s = String::new();
        let _ = writeln!(s, "# schema_version: {SCHEMA_VERSION}");
        let _ = writeln!(s, "# command: {}", self.command);
        let _ = writeln!(s, "# config: {}", self.config);
        for t in &self.tables {
            let _ = writeln!(s, "# table: {}", t.name);
            let mut w = csv::Writer::from_writer(Vec::new());
            let fail = |e: csv::Error| CliError::input(format!("writing CSV: {e}"));
            w.write_record(&t.columns).map_err(fail)?;
            for row in &t.rows {
                w.write_record(row.iter().map(|c| csv_cell(c, precision)))
                    .map_err(fail)?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| CliError::input(format!("writing CSV: {e}")))?;
            s.push_str(&String::from_utf8_lossy(&bytes));
        }
        Ok(s)
    }
}

pub fn format_num(v: f64, precision: usize) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        let s = format!("{v:.precision$}");
        // avoid a signed zero after rounding
        if s.trim_start_matches('-')
            .chars()
            .all(|c| c == '0' || c == '.')
        {
            s.trim_start_matches('-').to_string()
        } else {
            s
        }
    }
}

fn json_str(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

fn json_cell(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Num(v) if v.is_finite() => format_num(*v, precision),
        Cell::Num(v) => json_str(&format_num(*v, precision)),
        Cell::Int(v) => v.to_string(),
        Cell::Text(t) => json_str(t),
        Cell::Bool(b) => b.to_string(),
        Cell::Missing => "null".into(),
    }
}

fn csv_cell(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Num(v) => format_num(*v, precision),
        Cell::Int(v) => v.to_string(),
        Cell::Text(t) => t.clone(),
        Cell::Bool(b) => b.to_string(),
        Cell::Missing => String::new(),
    }
}
