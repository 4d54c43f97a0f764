//! Named-column result tables and their CSV/JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Significant digits used for every rendered number.
pub const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Self { name: name.into(), unit: unit.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Error(String),
}

impl Cell {
    pub fn flag(b: bool) -> Self {
        Cell::Num(if b { 1.0 } else { 0.0 })
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Error(_) => None,
        }
    }

    /// Pads `row` with error cells carrying `err` up to `width` cells.
    pub fn fill_error(mut row: Vec<Cell>, width: usize, err: &dyn std::fmt::Display) -> Vec<Cell> {
        let msg = err.to_string();
        while row.len() < width {
            row.push(Cell::Error(msg.clone()));
        }
        row
    }
}

/// One error cell, for the errors sidecar.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellError {
    pub row: usize,
    pub column: String,
    pub message: String,
}

/// Ordered rows of named numeric columns plus run metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
    metadata: BTreeMap<String, String>,
}

impl SweepTable {
    pub fn new(columns: Vec<Column>) -> Self {
        Self { columns, rows: Vec::new(), metadata: BTreeMap::new() }
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn set_meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.insert(key.into(), value.to_string());
    }

    pub fn push_row(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::InvalidArgument(format!(
                "row has {} cells but the table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Appends a column computed from each existing row.
    pub fn add_column(&mut self, column: Column, mut cell: impl FnMut(&[Cell]) -> Cell) -> Result<()> {
        if self.column_index(&column.name).is_some() {
            return Err(Error::InvalidArgument(format!("duplicate column '{}'", column.name)));
        }
        for row in &mut self.rows {
            let c = cell(row);
            row.push(c);
        }
        self.columns.push(column);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn value(&self, row: usize, column: &str) -> Option<f64> {
        let j = self.column_index(column)?;
        self.rows.get(row)?.get(j)?.as_f64()
    }

    /// Numeric values of a column, `NaN` for error cells.
    pub fn column_values(&self, column: &str) -> Option<Vec<f64>> {
        let j = self.column_index(column)?;
        Some(self.rows.iter().map(|r| r[j].as_f64().unwrap_or(f64::NAN)).collect())
    }

    pub fn errors(&self) -> Vec<CellError> {
        let mut out = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (cell, col) in row.iter().zip(&self.columns) {
                if let Cell::Error(msg) = cell {
                    out.push(CellError { row: i, column: col.name.clone(), message: msg.clone() });
                }
            }
        }
        out
    }

    /// CSV with a `#` metadata block and a `name[unit]` header.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        let header: Vec<String> = self.columns.iter().map(|c| format!("{}[{}]", c.name, c.unit)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(x) => format_sig(*x, SIGNIFICANT_DIGITS),
                    Cell::Error(_) => "NaN".to_string(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `{metadata, columns, rows}`; error cells become `null`.
    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<serde_json::Value>> = self
            .rows
            .iter()
            .map(|row| row.iter().map(json_number).collect())
            .collect();
        let doc = serde_json::json!({
            "metadata": self.metadata,
            "columns": self.columns,
            "rows": rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    /// Tab-free listing of error cells: `row,column,message` per line.
    pub fn errors_sidecar(&self) -> String {
        let mut out = String::from("row,column,message\n");
        for e in self.errors() {
            let _ = writeln!(out, "{},{},{}", e.row, e.column, e.message.replace(['\n', ','], " "));
        }
        out
    }

    /// Two-column `x y` text for plotting one column against another.
    pub fn plot_data(&self, x: &str, y: &str) -> Result<String> {
        let missing = |n: &str| Error::InvalidArgument(format!("no column '{n}'"));
        let xi = self.column_index(x).ok_or_else(|| missing(x))?;
        let yi = self.column_index(y).ok_or_else(|| missing(y))?;
        let mut out = format!("# {} {}\n", self.columns[xi].name, self.columns[yi].name);
        for row in &self.rows {
            if let (Cell::Num(a), Cell::Num(b)) = (&row[xi], &row[yi]) {
                if a.is_finite() && b.is_finite() {
                    let _ = writeln!(out, "{} {}", format_sig(*a, SIGNIFICANT_DIGITS), format_sig(*b, SIGNIFICANT_DIGITS));
                }
            }
        }
        Ok(out)
    }

    /// Parses the CSV produced by [`SweepTable::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut metadata = BTreeMap::new();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = loop {
            match lines.next() {
                Some(l) if l.starts_with('#') => {
                    if let Some((k, v)) = l.trim_start_matches('#').trim().split_once('=') {
                        metadata.insert(k.trim().to_string(), v.trim().to_string());
                    }
                }
                Some(l) => break l,
                None => return Err(Error::InvalidArgument("table has no header row".into())),
            }
        };
        let columns: Vec<Column> = header
            .split(',')
            .map(|field| match field.split_once('[') {
                Some((name, unit)) => Column::new(name.trim(), unit.trim_end_matches(']')),
                None => Column::new(field.trim(), ""),
            })
            .collect();
        let mut table = SweepTable { columns, rows: Vec::new(), metadata };
        for (i, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|f| match f.trim() {
                    "NaN" => Ok(Cell::Error("error in source table".into())),
                    v => v
                        .parse::<f64>()
                        .map(Cell::Num)
                        .map_err(|_| Error::InvalidArgument(format!("row {i}: cannot parse '{v}'"))),
                })
                .collect::<Result<Vec<_>>>()?;
            table.push_row(row)?;
        }
        Ok(table)
    }
}

fn json_number(c: &Cell) -> serde_json::Value {
    match c {
        Cell::Num(x) if x.is_finite() => {
            let rounded: f64 = format_sig(*x, SIGNIFICANT_DIGITS).parse().expect("formatted number parses");
            serde_json::Value::from(rounded)
        }
        _ => serde_json::Value::Null,
    }
}

/// `%g`-style rendering with `digits` significant digits and trailing
/// zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    // Exponent after rounding to `digits` significant digits.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent parses");
    if exp < -5 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
