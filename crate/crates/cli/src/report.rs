use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use yagzhev::{Field, PolyMap, Polynomial, Scalar};

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

/// Wraps a command result. Keys come out sorted because `serde_json`
/// objects are B-tree maps.
pub fn envelope(command: &str, input_digest: &str, field: Field, result: Value) -> Value {
    json!({
        "command": command,
        "field": field.to_string(),
        "input_digest": input_digest,
        "result": result,
        "tool_version": env!("CARGO_PKG_VERSION"),
    })
}

pub fn poly(p: &Polynomial) -> Value {
    Value::String(p.to_canonical_string())
}

pub fn scalars(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(|c| Value::String(c.to_string())).collect())
}

pub fn map(f: &PolyMap) -> Value {
    json!({
        "images": f.images().iter().map(poly).collect::<Vec<_>>(),
        "vars": f.ctx().names(),
    })
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// One `dotted.key: value` line per leaf.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    flatten("", v, &mut out);
    out
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => flatten_map(prefix, m, out),
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}

fn flatten_map(prefix: &str, m: &Map<String, Value>, out: &mut String) {
    for (k, v) in m {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        flatten(&key, v, out);
    }
}
