//! Tabular output as CSV or JSON, numbers at 17 significant digits.

use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{Map, Number, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        // Keep the sign of zero out of the files.
        "0.0000000000000000e0".to_string()
    } else if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// JSON number at 17 significant digits; non-finite values become null.
pub fn json_num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt_num(x)).expect("formatted float is valid JSON"))
    } else {
        Value::Null
    }
}

/// Rewrites every non-integer number in `v` at 17 significant digits.
pub fn fix_precision(v: &mut Value) {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => {
            if let Some(x) = n.as_f64() {
                *v = json_num(x);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(fix_precision),
        Value::Object(o) => o.values_mut().for_each(fix_precision),
        _ => {}
    }
}

fn cell_json(c: &Cell) -> Value {
    match c {
        Cell::Num(x) => json_num(*x),
        Cell::Int(i) => Value::from(*i),
        Cell::Text(s) => Value::from(s.as_str()),
        Cell::Empty => Value::Null,
    }
}

fn cell_csv(c: &Cell) -> String {
    match c {
        Cell::Num(x) => fmt_num(*x),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    }
}

/// Rows under fixed column names, plus extra JSON-only fields.
#[derive(Debug, Clone, Default)]
pub struct Document {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub meta: Map<String, Value>,
}

impl Document {
    pub fn new(columns: &[&'static str]) -> Self {
        Document { columns: columns.to_vec(), rows: Vec::new(), meta: Map::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, timestamp: bool) -> String {
        match format {
            Format::Csv => self.csv(timestamp),
            Format::Json => self.json(timestamp),
        }
    }

    fn csv(&self, timestamp: bool) -> String {
        let mut out = String::new();
        if timestamp {
            out.push_str(&format!("# generated unix_time={}\n", unix_time()));
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(cell_csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self, timestamp: bool) -> String {
        let mut top = Map::new();
        if timestamp {
            top.insert("generated_unix_time".into(), Value::from(unix_time()));
        }
        for (k, v) in &self.meta {
            let mut v = v.clone();
            fix_precision(&mut v);
            top.insert(k.clone(), v);
        }
        let rows = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), cell_json(v))).collect()))
            .collect();
        top.insert("rows".into(), Value::Array(rows));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("serializable");
        s.push('\n');
        s
    }
}

fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}
