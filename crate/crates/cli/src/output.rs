use std::fmt::Write as _;
use std::io::{self, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    /// Decimal natural of any size.
    Int(String),
    Real(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn int(v: impl ToString) -> Cell {
        Cell::Int(v.to_string())
    }

    pub fn opt_int<T: ToString>(v: Option<T>) -> Cell {
        v.map_or(Cell::Empty, Cell::int)
    }

    pub fn opt_real(v: Option<f64>) -> Cell {
        v.map_or(Cell::Empty, Cell::Real)
    }

    pub fn text(v: impl Into<String>) -> Cell {
        Cell::Text(v.into())
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(s) => s.clone(),
            Cell::Real(v) => sig10(*v),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(s) => s.parse::<u64>().map_or_else(|_| Value::String(s.clone()), |v| Value::Number(v.into())),
            Cell::Real(v) => sig10(*v).parse::<f64>().ok().and_then(Number::from_f64).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }
}

/// Ten significant digits, trailing zeros kept so columns line up.
pub fn sig10(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".into();
    }
    let magnitude = v.abs().log10().floor() as i32;
    if (-5..10).contains(&magnitude) {
        format!("{:.*}", (9 - magnitude) as usize, v)
    } else {
        format!("{v:.9e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub command: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: impl Into<String>, columns: &[&'static str]) -> Table {
        Table { command: command.into(), columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, header: bool) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                if header {
                    writeln!(out, "# heightlab {} generated-unix={}", self.command, unix_now()).unwrap();
                }
                writeln!(out, "{}", self.columns.join(",")).unwrap();
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", cells.join(",")).unwrap();
                }
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().map(Cell::json)).collect()))
                    .collect();
                let mut doc = Map::new();
                doc.insert("command".into(), Value::String(self.command.clone()));
                if header {
                    doc.insert("generated_unix".into(), Value::Number(unix_now().into()));
                }
                doc.insert("rows".into(), Value::Array(rows));
                out = serde_json::to_string_pretty(&Value::Object(doc)).expect("plain values serialize");
                out.push('\n');
            }
        }
        out
    }

    pub fn write(&self, format: Format, header: bool, mut sink: impl Write) -> io::Result<()> {
        sink.write_all(self.render(format, header).as_bytes())
    }
}

fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}
