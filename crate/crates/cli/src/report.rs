use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::Format;

/// Report skeleton shared by every command.
pub fn doc(command: &str) -> Value {
    json!({ "schema": "1", "command": command })
}

/// SHA-256 of the compact report without its own digest field.
pub fn seal(mut v: Value) -> Value {
    if let Some(o) = v.as_object_mut() {
        o.remove("report_digest");
    }
    let d = hex::encode(Sha256::digest(serde_json::to_string(&v).expect("serializable").as_bytes()));
    v["report_digest"] = json!(d);
    v
}

/// Prints `v` as JSON, or `text` for the human format.
pub fn emit(format: Format, v: &Value, text: &str) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(v).expect("serializable")),
        Format::Text => print!("{text}"),
    }
}

/// Left-aligned columns.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let s: Vec<String> = cells.iter().enumerate().map(|(i, c)| format!("{c:<width$}", width = w[i])).collect();
        s.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.iter().map(|s| s.to_string()).collect());
    for r in rows {
        out += &line(r.clone());
    }
    out
}

/// Shows the empty word visibly.
pub fn show_word(w: &str) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.into()
    }
}
