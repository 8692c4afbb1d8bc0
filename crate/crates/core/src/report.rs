//! Report serialization: JSON with sorted keys and floats rounded to six
//! significant digits, and CSV with the scalar fields as `# key=json` lines
//! above the row table.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::InvalidParams(format!("unknown format `{s}`"))),
        }
    }
}

pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

/// Rounds every float in `v`.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64"), SIGNIFICANT_DIGITS);
            Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(report: &T) -> Result<Value> {
    Ok(normalize(serde_json::to_value(report)?))
}

pub fn to_json<T: Serialize>(report: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&to_value(report)?)?;
    s.push('\n');
    Ok(s)
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn uncell(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()))
}

/// CSV form of a report object whose table lives under `rows_key`. An
/// empty table still gets a header when `columns` is given.
pub fn to_csv<T: Serialize>(report: &T, rows_key: &str, columns: &[&str]) -> Result<String> {
    let Value::Object(obj) = to_value(report)? else {
        return Err(Error::InvalidParams("report is not an object".into()));
    };
    let mut out = String::new();
    for (k, v) in &obj {
        if k != rows_key {
            out.push_str(&format!("# {k}={v}\n"));
        }
    }
    let rows: Vec<Map<String, Value>> = match obj.get(rows_key) {
        Some(Value::Array(a)) => a
            .iter()
            .map(|r| match r {
                Value::Object(o) => Ok(o.clone()),
                _ => Err(Error::InvalidParams("rows must be objects".into())),
            })
            .collect::<Result<_>>()?,
        _ => Vec::new(),
    };
    let header: Vec<String> = match rows.first() {
        Some(first) => first.keys().cloned().collect(),
        None => columns.iter().map(|s| s.to_string()).collect(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    if !header.is_empty() {
        w.write_record(&header)?;
    }
    for r in &rows {
        w.write_record(header.iter().map(|h| r.get(h).map_or(String::new(), cell)))?;
    }
    let body = w
        .into_inner()
        .map_err(|e| Error::InvalidParams(e.to_string()))?;
    out.push_str(&String::from_utf8(body).map_err(|e| Error::Parse(e.to_string()))?);
    Ok(out)
}

/// Inverse of [`to_csv`] on the JSON value level.
pub fn csv_to_value(s: &str, rows_key: &str) -> Result<Value> {
    let mut obj = Map::new();
    let mut table = String::new();
    for line in s.lines() {
        if let Some(meta) = line.strip_prefix("# ") {
            let (k, v) = meta
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad meta line `{line}`")))?;
            obj.insert(k.to_string(), serde_json::from_str(v)?);
        } else {
            table.push_str(line);
            table.push('\n');
        }
    }
    let mut rows = Vec::new();
    let mut r = csv::ReaderBuilder::new().from_reader(table.as_bytes());
    let header = r.headers()?.clone();
    for rec in r.records() {
        let rec = rec?;
        let row: Map<String, Value> = header
            .iter()
            .zip(rec.iter())
            .map(|(h, c)| (h.to_string(), uncell(c)))
            .collect();
        rows.push(Value::Object(row));
    }
    obj.insert(rows_key.to_string(), Value::Array(rows));
    Ok(Value::Object(obj))
}

pub fn write(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(1.0 / 3.0, 6), 0.333333);
        assert_eq!(round_sig(123456789.0, 6), 123457000.0);
        assert_eq!(round_sig(0.0, 6), 0.0);
    }

    #[test]
    fn json_keys_sorted() {
        let s = to_json(&json!({"b": 1, "a": 0.1234567})).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.contains("0.123457"));
    }

    #[test]
    fn csv_round_trip() {
        let v = json!({"q": 7, "p": 0.5, "mode": "exact", "ok": true,
            "rows": [{"alpha": 8, "exact": true}, {"alpha": 7, "exact": false}]});
        let csv = to_csv(&v, "rows", &[]).unwrap();
        assert_eq!(csv_to_value(&csv, "rows").unwrap(), v);
        let empty = json!({"q": 7, "rows": []});
        let csv = to_csv(&empty, "rows", &["alpha", "exact"]).unwrap();
        assert_eq!(csv, "# q=7\nalpha,exact\n");
        assert_eq!(csv_to_value(&csv, "rows").unwrap(), empty);
    }
}
