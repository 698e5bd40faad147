//! Record emission: JSON lines, aligned text columns or CSV.
//!
//! Records are flat JSON objects. Text and CSV keep scalar fields only;
//! nested arrays and objects appear in JSON lines alone.

use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

pub type Record = Map<String, Value>;

/// Serializes `value` into a record, prefixed with `head`.
pub fn record<T: Serialize>(head: &[(&str, Value)], value: &T) -> Record {
    let mut out: Record = head.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    match serde_json::to_value(value) {
        Ok(Value::Object(m)) => out.extend(m),
        Ok(other) => {
            out.insert("value".into(), other);
        }
        Err(e) => {
            out.insert("error".into(), Value::String(e.to_string()));
        }
    }
    out
}

fn cell(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.6e}"),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(_) | Value::Object(_) => None,
    }
}

fn columns(records: &[Record]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in records {
        for (k, v) in r {
            if cell(v).is_some() && !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

fn table(records: &[Record]) -> (Vec<String>, Vec<Vec<String>>) {
    let cols = columns(records);
    let rows = records
        .iter()
        .map(|r| cols.iter().map(|c| r.get(c).and_then(cell).unwrap_or_default()).collect())
        .collect();
    (cols, rows)
}

pub fn write_records(out: &mut dyn Write, format: Format, records: &[Record]) -> Result<(), CliError> {
    match format {
        Format::Jsonl => {
            for r in records {
                serde_json::to_writer(&mut *out, r).map_err(|e| CliError::Io(e.into()))?;
                writeln!(out)?;
            }
        }
        Format::Text => {
            let (cols, rows) = table(records);
            let widths: Vec<usize> = cols
                .iter()
                .enumerate()
                .map(|(j, c)| rows.iter().map(|r| r[j].len()).chain([c.len()]).max().unwrap_or(0))
                .collect();
            let line = |cells: &[String]| {
                cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect::<Vec<_>>().join("  ").trim_end().to_string()
            };
            writeln!(out, "{}", line(&cols))?;
            for r in &rows {
                writeln!(out, "{}", line(r))?;
            }
        }
        Format::Csv => write_csv(out, records)?,
    }
    Ok(())
}

pub fn write_csv(out: &mut dyn Write, records: &[Record]) -> Result<(), CliError> {
    let (cols, rows) = table(records);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&cols)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn recs() -> Vec<Record> {
        vec![
            record(&[("name", json!("a"))], &json!({"value": 1.5, "runs": [1, 2]})),
            record(&[("name", json!("bb"))], &json!({"value": null, "ok": true})),
        ]
    }

    #[test]
    fn text_columns_are_aligned() {
        let mut buf = Vec::new();
        write_records(&mut buf, Format::Text, &recs()).unwrap();
        let s = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "name  value       ok");
        assert_eq!(lines[1], "a     1.500000e0");
        assert_eq!(lines[2], format!("bb{}true", " ".repeat(16)));
    }

    #[test]
    fn csv_skips_nested_values() {
        let mut buf = Vec::new();
        write_records(&mut buf, Format::Csv, &recs()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,value,ok\na,1.500000e0,\nbb,,true\n");
    }

    #[test]
    fn jsonl_keeps_everything() {
        let mut buf = Vec::new();
        write_records(&mut buf, Format::Jsonl, &recs()).unwrap();
        let first: Value = serde_json::from_str(String::from_utf8(buf).unwrap().lines().next().unwrap()).unwrap();
        assert_eq!(first["runs"], json!([1, 2]));
    }
}
