//! Report rendering and file output.
//!
//! Every JSON document has exactly the top-level keys `config`,
//! `result`, `residuals` and `versions`. Numbers are written by a small
//! custom renderer instead of `serde_json`'s: floats print as `{:.16e}`
//! (17 significant digits, enough to round-trip any f64 exactly) and
//! integers stay integers, so reports are bitwise reproducible across
//! runs. Object keys come out sorted because `serde_json::Value` stores
//! maps ordered by key.
//!
//! File output goes through a same-directory temporary file and an
//! atomic rename, so a crashed run never leaves a torn report behind.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::CliError;

/// Assemble the fixed four-key report envelope.
pub fn document(config: Value, result: Value, residuals: Value) -> Value {
    json!({
        "config": config,
        "result": result,
        "residuals": residuals,
        "versions": {
            "cli": env!("CARGO_PKG_VERSION"),
            "core": cmc_index::VERSION,
            "schema": 1,
        },
    })
}

/// Render a value on one line with round-trip float precision.
pub fn render_json(value: &Value) -> String {
    let mut out = String::new();
    render(value, &mut out);
    out
}

fn render(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                let _ = write!(out, "{i}");
            } else if let Some(u) = n.as_u64() {
                let _ = write!(out, "{u}");
            } else {
                write_float(n.as_f64().expect("json number"), out);
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string escapes"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                render(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("string escapes"));
                out.push(':');
                render(item, out);
            }
            out.push('}');
        }
    }
}

pub fn write_float(f: f64, out: &mut String) {
    if f.is_finite() {
        let _ = write!(out, "{f:.16e}");
    } else {
        // JSON has no infinities; nothing in the reports should reach here
        out.push_str("null");
    }
}

/// One-line error payload for stderr.
pub fn error_json(kind: &str, message: &str) -> String {
    render_json(&json!({"error": {"kind": kind, "message": message}}))
}

/// Print to stdout, or atomically replace `path` when given.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        None => {
            if contents.ends_with('\n') {
                print!("{contents}");
            } else {
                println!("{contents}");
            }
            Ok(())
        }
        Some(path) => write_atomic(path, contents),
    }
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    if !contents.ends_with('\n') {
        tmp.write_all(b"\n")?;
    }
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

/// Sweep table with the fixed column order.
pub fn sweep_csv(points: &[cmc_index::closed_spectrum::SweepPoint]) -> String {
    let mut out = String::from("r,strong,weak,zeroModes,absH,hypothesisGap\n");
    for p in points {
        write_float(p.r, &mut out);
        let _ = write!(out, ",{},{},{},", p.strong, p.weak, p.zero_modes);
        write_float(p.abs_h, &mut out);
        out.push(',');
        write_float(p.hypothesis_gap, &mut out);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_the_renderer() {
        for &x in &[
            0.0,
            1.0 / 3.0,
            -2.0_f64.sqrt(),
            6.02e23,
            5e-324,
            f64::MAX,
            7.0 / 24.0,
        ] {
            let mut s = String::new();
            write_float(x, &mut s);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} rendered as {s}");
        }
    }

    #[test]
    fn renderer_sorts_keys_and_keeps_integers() {
        let v = json!({"zeta": 1u64, "alpha": {"b": 2.5, "a": true}, "list": [1, "x"]});
        assert_eq!(
            render_json(&v),
            "{\"alpha\":{\"a\":true,\"b\":2.5000000000000000e0},\"list\":[1,\"x\"],\"zeta\":1}"
        );
    }

    #[test]
    fn document_has_exactly_the_contract_keys() {
        let doc = document(json!({}), json!({}), json!({}));
        let keys: Vec<&String> = doc.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["config", "residuals", "result", "versions"]);
    }

    #[test]
    fn csv_header_is_stable() {
        let out = sweep_csv(&[]);
        assert_eq!(out, "r,strong,weak,zeroModes,absH,hypothesisGap\n");
    }
}
