//! Column tables rendered as CSV or JSON.

use std::fmt::Write;

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Trailing `# ...` lines in CSV, a `notes` array in JSON.
    pub notes: Vec<String>,
    pub metadata: Map<String, Value>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
            metadata: Map::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_value(*v)))
                .expect("in-memory write");
        }
        let mut s =
            String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 input");
        for note in &self.notes {
            let _ = writeln!(s, "# {note}");
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|v| json_number(*v)).collect()))
            .collect();
        let doc = json!({
            "metadata": Value::Object(self.metadata.clone()),
            "columns": self.columns,
            "rows": rows,
            "notes": self.notes,
        });
        let mut out = serde_json::to_string_pretty(&doc).expect("tables serialize");
        out.push('\n');
        out
    }
}

/// Shortest round-tripping scientific notation.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:e}")
    }
}

/// Non-finite values become `null`.
fn json_number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}
