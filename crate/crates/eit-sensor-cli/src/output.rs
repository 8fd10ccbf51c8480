//! Deterministic CSV and JSON emission. Floats are serialized with 17
//! significant digits so every emitted number round-trips bit-exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn create(path: &Path) -> std::io::Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

/// Write a CSV file: a header row and then rows of 17-digit floats.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> std::io::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    w.flush()
}

/// Minimal JSON value for the summary documents.
pub enum Json {
    Num(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(String, Json)>),
}

impl Json {
    fn render(&self, out: &mut String) {
        match self {
            Json::Num(x) => {
                if x.is_finite() {
                    out.push_str(&fmt_f64(*x));
                } else {
                    // JSON has no infinity; emit a string marker
                    out.push_str(&format!("\"{x}\""));
                }
            }
            Json::Str(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Array(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    item.render(out);
                }
                out.push(']');
            }
            Json::Object(fields) => {
                out.push_str("{\n");
                for (i, (key, value)) in fields.iter().enumerate() {
                    out.push_str("  \"");
                    out.push_str(key);
                    out.push_str("\": ");
                    value.render(out);
                    if i + 1 < fields.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push('}');
            }
        }
    }
}

pub fn write_json(path: &Path, root: Json) -> std::io::Result<()> {
    let mut text = String::new();
    root.render(&mut text);
    text.push('\n');
    let mut w = create(path)?;
    w.write_all(text.as_bytes())?;
    w.flush()
}
