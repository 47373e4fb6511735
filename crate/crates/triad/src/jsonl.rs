//! JSON-lines IO and the canonical JSON form used for every output file.
//!
//! Canonical JSON has object keys in sorted order and floats rounded to four
//! decimals, so reruns over the same inputs write byte-identical files.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

const FLOAT_SCALE: f64 = 1e4;

/// Serialize `value` with sorted keys and floats rounded to 4 decimals.
pub fn canonical_value<T: Serialize>(value: &T) -> CliResult<Value> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Internal(format!("serialize: {e}")))?;
    Ok(round_floats(v))
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            let rounded = (x * FLOAT_SCALE).round() / FLOAT_SCALE;
            // -0.0 would otherwise print as "-0.0"
            let rounded = if rounded == 0.0 { 0.0 } else { rounded };
            serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_floats(v))).collect()),
        other => other,
    }
}

pub fn to_canonical_line<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(canonical_value(value)?.to_string())
}

/// Parse one object per non-blank line. Errors name the file and 1-based line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(line).map_err(|e| {
            CliError::Validation(format!("{}: line {}: {}", path.display(), i + 1, strip_position(&e)))
        })?;
        out.push(record);
    }
    Ok(out)
}

/// serde_json appends "at line 1 column N", which is noise for single-line records.
fn strip_position(e: &serde_json::Error) -> String {
    let msg = e.to_string();
    match msg.rfind(" at line ") {
        Some(pos) => msg[..pos].to_string(),
        None => msg,
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::in_file(path, e))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::in_file(path, e))
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> CliResult<()> {
    let mut text = String::new();
    for r in records {
        text.push_str(&to_canonical_line(r)?);
        text.push('\n');
    }
    write_text(path, &text)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let v = canonical_value(value)?;
    let mut text = serde_json::to_string_pretty(&v).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::in_file(parent, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::in_file(path, e))
}
