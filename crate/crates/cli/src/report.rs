//! Locale-independent rendering of command results.
//!
//! Floats are written with 12 significant digits: positional notation for
//! magnitudes in `[1e-5, 1e15)`, scientific otherwise. Lines end in `\n`.

use std::fmt::Write;

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Keyvalue,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Keyvalue => "keyvalue",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
}

impl Value {
    pub fn render(&self) -> String {
        match self {
            Value::Float(x) => format_float(*x),
            Value::Int(n) => n.to_string(),
            Value::Bool(b) => b.to_string(),
            Value::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Value::Int(n)
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.*}", SIGNIFICANT_DIGITS - 1, 0.0);
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // the exponent after rounding to 12 digits decides the layout
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// An optional table plus ordered key-value pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub table: Option<Table>,
    pub values: Vec<(String, Value)>,
}

/// Text of a rendered report: the main document and, when a table is
/// rendered as CSV alongside key-value results, a separate summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub main: String,
    pub summary: Option<String>,
}

impl Report {
    pub fn table(table: Table) -> Self {
        Self {
            table: Some(table),
            values: Vec::new(),
        }
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl Into<Value>) -> &mut Self {
        self.values.push((key.into(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.values.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// CSV when there is a table, key-value text otherwise.
    pub fn default_format(&self) -> Format {
        if self.table.is_some() {
            Format::Csv
        } else {
            Format::Keyvalue
        }
    }

    pub fn render(&self, format: Format) -> Rendered {
        match (format, &self.table) {
            (Format::Csv, Some(table)) => Rendered {
                main: csv(table),
                summary: (!self.values.is_empty()).then(|| keyvalue(&self.values)),
            },
            (Format::Csv, None) => {
                let mut t = Table::new(&["key", "value"]);
                for (k, v) in &self.values {
                    t.push(vec![Value::Text(k.clone()), v.clone()]);
                }
                Rendered {
                    main: csv(&t),
                    summary: None,
                }
            }
            (Format::Keyvalue, table) => {
                let mut pairs = self.values.clone();
                if let Some(t) = table {
                    for (i, row) in t.rows.iter().enumerate() {
                        for (col, v) in t.columns.iter().zip(row) {
                            pairs.push((format!("row.{i}.{col}"), v.clone()));
                        }
                    }
                }
                Rendered {
                    main: keyvalue(&pairs),
                    summary: None,
                }
            }
        }
    }
}

pub fn csv(table: &Table) -> String {
    let mut out = table.columns.join(",");
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(Value::render).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn keyvalue(pairs: &[(String, Value)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        writeln!(out, "{k} = {}", v.render()).expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_float(2f64.sqrt()), "1.41421356237");
        assert_eq!(format_float(2.0 * 2f64.sqrt()), "2.82842712475");
        assert_eq!(format_float(1.0), "1.00000000000");
        assert_eq!(format_float(0.999_999_999_999_999_8), "1.00000000000");
        assert_eq!(format_float(-0.0), "0.00000000000");
        assert_eq!(format_float(0.0), "0.00000000000");
        assert_eq!(format_float(-1.0), "-1.00000000000");
        assert_eq!(format_float(9.999_999_999_999_9), "10.0000000000");
        assert_eq!(format_float(0.005), "0.00500000000000");
        assert_eq!(format_float(123456.0), "123456.000000");
        assert_eq!(format_float(1.5e-7), "1.50000000000e-7");
        assert_eq!(format_float(0.30000000000000004), "0.300000000000");
    }

    #[test]
    fn csv_and_keyvalue_layouts() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![0.5.into(), 3u64.into()]);
        let mut r = Report::table(t);
        r.set("name", "x");
        let csv = r.render(Format::Csv);
        assert_eq!(csv.main, "a,b\n0.500000000000,3\n");
        assert_eq!(csv.summary.as_deref(), Some("name = x\n"));
        let kv = r.render(Format::Keyvalue);
        assert_eq!(kv.main, "name = x\nrow.0.a = 0.500000000000\nrow.0.b = 3\n");

        let mut only = Report::default();
        only.set("k", true);
        assert_eq!(only.render(Format::Csv).main, "key,value\nk,true\n");
        assert_eq!(only.default_format(), Format::Keyvalue);
    }
}
