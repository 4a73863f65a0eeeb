//! Deterministic text output and the matching readers.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::{Error, Result};

/// 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// Serializes `value` as pretty JSON with every float at 17 significant
/// digits. The digits are emitted through [`fmt_f64`] so the bytes do not
/// depend on the shortest-representation printer.
pub fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)
        .map_err(|e| Error::InvalidParameter(format!("serialization: {e}")))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &serde_json::Value, indent: usize, out: &mut String) {
    use serde_json::Value;
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&fmt_f64(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (k, item) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                if k + 1 < a.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (k, (key, item)) in m.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(item, indent + 1, out);
                if k + 1 < m.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Creates `path` and hands a buffered writer to `body`.
pub fn write_file(
    path: &Path,
    body: impl FnOnce(&mut std::io::BufWriter<std::fs::File>) -> std::io::Result<()>,
) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_string(path: &Path, text: &str) -> Result<()> {
    write_file(path, |w| w.write_all(text.as_bytes()))
}

/// Reads a CSV whose header must equal `columns` and whose cells are all numbers.
pub fn read_numeric_csv(
    r: impl BufRead,
    columns: &[&str],
) -> std::result::Result<Vec<Vec<f64>>, String> {
    read_csv(r, columns)?
        .into_iter()
        .enumerate()
        .map(|(n, row)| {
            row.iter()
                .zip(columns)
                .map(|(cell, name)| {
                    cell.parse::<f64>()
                        .map_err(|e| format!("line {}: {name}: {e}", n + 2))
                })
                .collect()
        })
        .collect()
}

/// Reads a CSV with the given header into string cells.
pub fn read_csv(
    r: impl BufRead,
    columns: &[&str],
) -> std::result::Result<Vec<Vec<String>>, String> {
    let mut lines = r.lines();
    let header = match lines.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(e.to_string()),
        None => return Err("empty file".into()),
    };
    let expected = columns.join(",");
    if header.trim() != expected {
        return Err(format!(
            "line 1: expected header `{expected}`, got `{header}`"
        ));
    }
    let mut rows = Vec::new();
    for (n, line) in lines.enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
        if cells.len() != columns.len() {
            return Err(format!(
                "line {}: expected {} cells, got {}",
                n + 2,
                columns.len(),
                cells.len()
            ));
        }
        rows.push(cells);
    }
    Ok(rows)
}
