//! Rectangular result tables with CSV and JSON export.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            // Adding +0 turns a signed zero into +0.
            Cell::Num(v) => format!("{:e}", v + 0.0),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
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
        Cell::Int(v as i64)
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

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// Unit label; empty for dimensionless bookkeeping columns.
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
        }
    }

    /// Header label, `name [unit]` when a unit is set.
    pub fn label(&self) -> String {
        if self.unit.is_empty() {
            self.name.clone()
        } else {
            format!("{} [{}]", self.name, self.unit)
        }
    }
}

/// Parameter point → observable records, one row per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-form description of how the table was produced.
    pub spec: serde_json::Value,
    pub notes: Vec<String>,
}

impl SweepTable {
    pub fn new(columns: Vec<Column>, spec: serde_json::Value) -> Self {
        Self {
            columns,
            rows: Vec::new(),
            spec,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn column_f64(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    /// CSV with `# key=value` comment lines first, then a unit-bearing
    /// header row.
    pub fn write_csv<W: Write>(&self, out: W, comments: &[(String, String)]) -> Result<()> {
        let mut out = out;
        for (k, v) in comments {
            writeln!(out, "# {k}={v}")?;
        }
        writeln!(out, "# spec={}", serde_json::to_string(&self.spec)?)?;
        for n in &self.notes {
            writeln!(out, "# note={n}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns.iter().map(Column::label))?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, comments: &[(String, String)]) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, comments)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = SweepTable::new(
            vec![Column::new("kappa", ""), Column::new("e0", "E_C")],
            serde_json::json!({"op": "demo"}),
        );
        t.push(vec![0.5.into(), 1.25.into()]);
        t.push(vec![0.25.into(), Cell::Text("solver failed".into())]);
        let s = t.to_csv_string(&[("manifest".into(), "abc".into())]).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "# manifest=abc");
        assert_eq!(lines[1], r#"# spec={"op":"demo"}"#);
        assert_eq!(lines[2], "kappa,e0 [E_C]");
        assert_eq!(lines[3], "5e-1,1.25e0");
        assert_eq!(t.column_f64("e0").unwrap(), vec![Some(1.25), None]);
    }
}
