//! Report rendering and atomic file output.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

impl Format {
    pub fn file_name(self) -> &'static str {
        match self {
            Format::Json => "report.json",
            Format::Text => "report.txt",
            Format::Csv => "report.csv",
        }
    }
}

/// Renders a report value. Key order is the order of the serialized structs,
/// so identical inputs give identical bytes.
pub fn render(value: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).unwrap_or_default();
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            text(value, 0, &mut out);
            out
        }
        Format::Csv => {
            let mut out = String::from("key,value\n");
            let mut rows = Vec::new();
            flatten(value, String::new(), &mut rows);
            for (k, v) in rows {
                let _ = writeln!(out, "{},{}", csv_field(&k), csv_field(&v));
            }
            out
        }
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "null".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Long arrays are summarized in text output; the JSON and CSV forms carry
/// them in full.
const TEXT_ARRAY_LIMIT: usize = 8;

fn text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                match x {
                    Value::Object(m) if !m.is_empty() => {
                        let _ = writeln!(out, "{pad}{k}:");
                        text(x, indent + 1, out);
                    }
                    Value::Array(a) if a.len() > TEXT_ARRAY_LIMIT => {
                        let _ = writeln!(out, "{pad}{k}: [{} items]", a.len());
                    }
                    Value::Array(a) if a.iter().any(|e| e.is_object() || e.is_array()) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        for (i, e) in a.iter().enumerate() {
                            let _ = writeln!(out, "{pad}  - [{i}]");
                            text(e, indent + 2, out);
                        }
                    }
                    Value::Array(a) => {
                        let items: Vec<String> = a.iter().map(scalar).collect();
                        let _ = writeln!(out, "{pad}{k}: [{}]", items.join(", "));
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{k}: {}", scalar(x));
                    }
                }
            }
        }
        Value::Array(a) => {
            for e in a {
                text(e, indent, out);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other));
        }
    }
}

fn flatten(v: &Value, prefix: String, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_owned() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(x, join(k), rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(x, format!("{prefix}[{i}]"), rows);
            }
        }
        other => rows.push((prefix, scalar(other))),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// Writes through a temporary file in the same directory and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, dir.join(name))
}
