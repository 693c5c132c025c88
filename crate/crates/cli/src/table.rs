//! Tabular output shared by every command: a metadata line, a header row
//! and fixed-format values.

use std::io::{BufRead, Write};

use serde_json::{json, Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(CliError::config("format", format!("expected csv or json, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

/// Twelve significant digits in scientific notation. Zero is written without
/// a sign.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.11e}", 0.0);
    }
    format!("{x:.11e}")
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
        }
    }

    /// Parses a rendered value back, preferring integers, then floats.
    pub fn parse(s: &str) -> Cell {
        if let Ok(i) = s.parse::<i64>() {
            return Cell::Int(i);
        }
        match s.parse::<f64>() {
            Ok(x) => Cell::Float(x),
            Err(_) => Cell::Text(s.to_string()),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Float(x) => format_float(*x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or_else(|| Value::String(format_float(*x)), Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Advisories for stderr; not part of the file.
    pub warnings: Vec<String>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), ..Table::default() }
    }

    /// Adds a metadata entry. Whitespace in values is replaced by `_` so the
    /// header line stays splittable.
    pub fn meta(&mut self, key: &str, value: impl ToString) {
        let v: String = value.to_string().chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
        self.meta.push((key.to_string(), v));
    }

    pub fn meta_f64(&mut self, key: &str, x: f64) {
        self.meta(key, format_float(x));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        self.rows.iter().map(|r| r[i].as_f64()).collect()
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write(&self, format: Format, w: impl Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(w),
            Format::Json => self.write_json(w),
        }
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let line: Vec<String> = self.meta.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(w, "# {}", line.join(" "))?;
        let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        csv.write_record(&self.columns)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(Cell::render))?;
        }
        csv.flush()?;
        Ok(())
    }

    pub fn write_json(&self, mut w: impl Write) -> Result<()> {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::to_json).collect())).collect();
        let doc = json!({ "meta": meta, "columns": self.columns, "rows": rows });
        serde_json::to_writer_pretty(&mut w, &doc)?;
        writeln!(w)?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn read_csv(r: impl BufRead) -> Result<Self> {
        let mut r = r;
        let mut first = String::new();
        r.read_line(&mut first)?;
        let Some(meta_line) = first.trim_end_matches('\n').strip_prefix("# ") else {
            return Err(CliError::Validation("output: missing `# key=value` metadata line".into()));
        };
        let mut table = Table::default();
        for item in meta_line.split(' ').filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CliError::Validation(format!("output: bad metadata item {item:?}")))?;
            table.meta.push((k.to_string(), v.to_string()));
        }
        let mut csv = csv::Reader::from_reader(r);
        table.columns = csv.headers()?.iter().map(str::to_string).collect();
        for rec in csv.records() {
            table.rows.push(rec?.iter().map(Cell::parse).collect());
        }
        Ok(table)
    }

    pub fn read_json(r: impl std::io::Read) -> Result<Self> {
        let doc: Value = serde_json::from_reader(r)?;
        let bad = || CliError::Validation("output: json does not match the table schema".into());
        let mut table = Table::default();
        for (k, v) in doc["meta"].as_object().ok_or_else(bad)? {
            table.meta.push((k.clone(), v.as_str().ok_or_else(bad)?.to_string()));
        }
        for c in doc["columns"].as_array().ok_or_else(bad)? {
            table.columns.push(c.as_str().ok_or_else(bad)?.to_string());
        }
        for row in doc["rows"].as_array().ok_or_else(bad)? {
            let cells = row
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|v| match v {
                    Value::Number(n) if n.is_i64() => Ok(Cell::Int(n.as_i64().unwrap())),
                    Value::Number(n) => Ok(Cell::Float(n.as_f64().unwrap())),
                    Value::String(s) => Ok(Cell::parse(s)),
                    _ => Err(bad()),
                })
                .collect::<Result<Vec<_>>>()?;
            table.rows.push(cells);
        }
        Ok(table)
    }
}
