use std::fmt::Write;

use serde_json::Value;

/// Indented `key: value` rendering of a report, without the echoed inputs.
pub fn render(report: &Value) -> String {
    let mut out = String::new();
    for key in ["command", "status"] {
        let _ = writeln!(out, "{key}: {}", scalar(&report[key]));
    }
    for key in ["result", "error"] {
        if let Some(v) = report.get(key) {
            let _ = writeln!(out, "{key}:");
            block(&mut out, v, 1);
        }
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => format!("[{}]", xs.iter().map(scalar).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(xs) => xs.iter().all(|x| !x.is_object() && (!x.is_array() || is_flat(x))),
        _ => true,
    }
}

fn block(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                if is_flat(x) {
                    let _ = writeln!(out, "{pad}{k}: {}", scalar(x));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    block(out, x, depth + 1);
                }
            }
        }
        Value::Array(xs) => {
            for x in xs {
                if is_flat(x) {
                    let _ = writeln!(out, "{pad}- {}", scalar(x));
                } else {
                    let _ = writeln!(out, "{pad}-");
                    block(out, x, depth + 1);
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other));
        }
    }
}
