use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(usize),
    Text(String),
}

impl Cell {
    /// Reals carry 17 significant digits so they round-trip exactly.
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_real(*x),
            Cell::Int(k) => k.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

pub fn format_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Index of a header column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn write_csv(&self, path: &Path) -> anyhow::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Result of one command: the CSV table, a JSON summary for the sidecar and
/// whether a numerical flag was raised.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub table: Table,
    pub summary: Map<String, Value>,
    pub flagged: bool,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(table: Table) -> Self {
        Self { table, ..Default::default() }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    /// Reals that are not finite become strings, since JSON has no infinity.
    pub fn set_real(&mut self, key: &str, x: f64) {
        self.set(key, real(x));
    }

    pub fn set_reals(&mut self, key: &str, xs: &[f64]) {
        self.set(key, Value::Array(xs.iter().map(|&x| real(x)).collect()));
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        value_real(self.summary.get(key)?)
    }

    pub fn reals(&self, key: &str) -> Option<Vec<f64>> {
        self.summary.get(key)?.as_array()?.iter().map(value_real).collect()
    }

    pub fn flag(&mut self, flagged: bool, note: impl Into<String>) {
        if flagged {
            self.notes.push(note.into());
        }
        self.flagged |= flagged;
    }
}

pub fn real(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(format_real(x)), Value::Number)
}

pub fn value_real(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => match s.as_str() {
            "inf" => Some(f64::INFINITY),
            "-inf" => Some(f64::NEG_INFINITY),
            "NaN" => Some(f64::NAN),
            _ => None,
        },
        _ => None,
    }
}

/// `<out>.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_round_trip_through_text() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(format_real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_real(f64::INFINITY), "inf");
    }

    #[test]
    fn non_finite_summary_values_survive() {
        let mut r = Report::default();
        r.set_reals("xs", &[1.0, f64::INFINITY]);
        assert_eq!(r.reals("xs").unwrap(), vec![1.0, f64::INFINITY]);
    }

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(sidecar_path(Path::new("out/run.csv")), PathBuf::from("out/run.csv.meta.json"));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = Table::new(&["t", "name"]);
        t.push(vec![0.5.into(), "a,b".into()]);
        t.write_csv(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "t,name\r\n5.0000000000000000e-1,\"a,b\"\r\n");
    }
}
