//! Rendering of reports. Every report is built once as a JSON value; the
//! table and CSV forms are flattenings of that value, so all three carry the
//! same exact fraction strings.

use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
    Csv,
}

/// Writes reports in input order through one locked stdout handle.
pub struct Emitter {
    format: Format,
    out: io::StdoutLock<'static>,
    csv_header_done: bool,
    records: usize,
}

impl Emitter {
    pub fn new(format: Format) -> Self {
        Self {
            format,
            out: io::stdout().lock(),
            csv_header_done: false,
            records: 0,
        }
    }

    pub fn emit<T: Serialize>(&mut self, report: &T) -> io::Result<()> {
        let value = serde_json::to_value(report).map_err(io::Error::other)?;
        match self.format {
            Format::Json => writeln!(self.out, "{}", serde_json::to_string(&value).map_err(io::Error::other)?)?,
            Format::Table => {
                if self.records > 0 {
                    writeln!(self.out)?;
                }
                let rows = flatten(&value);
                let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (key, val) in rows {
                    match decimal_hint(&val) {
                        Some(hint) => writeln!(self.out, "{key:<width$}  {val}  (~{hint})")?,
                        None => writeln!(self.out, "{key:<width$}  {val}")?,
                    }
                }
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                if !self.csv_header_done {
                    w.write_record(["record", "field", "value"]).map_err(io::Error::other)?;
                    self.csv_header_done = true;
                }
                for (key, val) in flatten(&value) {
                    w.write_record([self.records.to_string(), key, val]).map_err(io::Error::other)?;
                }
                let bytes = w.into_inner().map_err(io::Error::other)?;
                self.out.write_all(&bytes)?;
            }
        }
        self.records += 1;
        self.out.flush()
    }
}

/// `(dotted.path, scalar)` pairs in document order.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    let mut rows = Vec::new();
    walk(value, String::new(), &mut rows);
    rows
}

fn walk(value: &Value, path: String, rows: &mut Vec<(String, String)>) {
    let join = |key: &str| if path.is_empty() { key.to_string() } else { format!("{path}.{key}") };
    match value {
        Value::Object(map) if !map.is_empty() => {
            for (k, v) in map {
                walk(v, join(k), rows);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, v) in items.iter().enumerate() {
                walk(v, join(&i.to_string()), rows);
            }
        }
        Value::String(s) => rows.push((path, s.clone())),
        Value::Null => rows.push((path, String::new())),
        other => rows.push((path, other.to_string())),
    }
}

/// Decimal approximation of a non-integral `n/d` string, for tables only.
fn decimal_hint(s: &str) -> Option<String> {
    let (n, d) = s.split_once('/')?;
    let (n, d): (f64, f64) = (n.parse().ok()?, d.parse().ok()?);
    (d != 1.0).then(|| format!("{:.6}", n / d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flatten_paths() {
        let v = json!({"a": {"b": "1/2", "c": [true, null]}, "d": []});
        assert_eq!(
            flatten(&v),
            vec![
                ("a.b".into(), "1/2".into()),
                ("a.c.0".into(), "true".into()),
                ("a.c.1".into(), "".into()),
                ("d".into(), "[]".into()),
            ]
        );
    }

    #[test]
    fn hints_only_for_proper_fractions() {
        assert_eq!(decimal_hint("76/25").as_deref(), Some("3.040000"));
        assert_eq!(decimal_hint("4/1"), None);
        assert_eq!(decimal_hint("fermat"), None);
    }
}
