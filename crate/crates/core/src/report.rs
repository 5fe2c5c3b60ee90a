//! Output formats shared by every subcommand: pretty JSON, CSV and an aligned
//! plain-text table. CSV and table render floats with 12 significant digits.

use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// 12 significant digits in scientific notation; empty for NaN.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.11e}")
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.to_string(),
            (_, Some(u)) => u.to_string(),
            _ => sig12(n.as_f64().unwrap_or(f64::NAN)),
        },
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join("; "),
        Value::Object(_) => v.to_string(),
    }
}

/// A flat table: header plus rows of rendered cells.
struct Block {
    title: Option<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

fn is_table(v: &Value) -> bool {
    matches!(v, Value::Array(a) if !a.is_empty() && a.iter().all(Value::is_object))
}

fn table_block(title: Option<String>, rows: &[Value]) -> Block {
    let header: Vec<String> = rows[0].as_object().unwrap().keys().cloned().collect();
    let rows = rows
        .iter()
        .map(|r| header.iter().map(|k| r.get(k).map(cell).unwrap_or_default()).collect())
        .collect();
    Block { title, header, rows }
}

fn flatten(prefix: &str, v: &Value, pairs: &mut Vec<Vec<String>>, tables: &mut Vec<Block>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, pairs, tables);
            }
        }
        _ if is_table(v) => tables.push(table_block(Some(prefix.to_string()), v.as_array().unwrap())),
        _ => pairs.push(vec![prefix.to_string(), cell(v)]),
    }
}

fn blocks(v: &Value) -> Vec<Block> {
    if is_table(v) {
        return vec![table_block(None, v.as_array().unwrap())];
    }
    let mut pairs = Vec::new();
    let mut tables = Vec::new();
    flatten("", v, &mut pairs, &mut tables);
    let mut out = Vec::new();
    if !pairs.is_empty() {
        out.push(Block {
            title: None,
            header: vec!["key".into(), "value".into()],
            rows: pairs,
        });
    }
    out.extend(tables);
    out
}

fn csv_block(b: &Block) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&b.header).map_err(csv_err)?;
    for r in &b.rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidArgument(format!("csv: {e}"))
}

fn table_text(b: &Block) -> String {
    let mut width: Vec<usize> = b.header.iter().map(|h| h.chars().count()).collect();
    for r in &b.rows {
        for (i, c) in r.iter().enumerate() {
            width[i] = width[i].max(c.chars().count());
        }
    }
    let line = |cells: &[String]| {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{c:<w$}", w = width[i]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = String::new();
    out.push_str(&line(&b.header));
    out.push('\n');
    out.push_str(&width.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("  "));
    out.push('\n');
    for r in &b.rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

/// Renders a JSON document in the requested format.
///
/// Objects become key/value pairs (nested keys dotted); arrays of objects
/// become their own tables, each preceded by `# name` when they are nested.
pub fn render(v: &Value, format: Format) -> Result<String> {
    if format == Format::Json {
        return Ok(serde_json::to_string_pretty(v)? + "\n");
    }
    let mut out = String::new();
    for (i, b) in blocks(v).iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if let Some(t) = &b.title {
            out.push_str(&format!("# {t}\n"));
        }
        out.push_str(&match format {
            Format::Csv => csv_block(b)?,
            _ => table_text(b),
        });
    }
    Ok(out)
}
