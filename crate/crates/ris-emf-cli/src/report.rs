//! Deterministic report emission: JSON with insertion-ordered keys and CSV
//! with LF line endings, every float fixed at 9 significant digits.

use serde_json::Value;

/// Round to 9 significant digits through a decimal representation, so equal
/// inputs always print identically.
pub fn round_sig9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

/// Fixed 9-significant-digit text form; plain decimal for everyday
/// magnitudes, scientific otherwise.
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded = round_sig9(x);
    let abs = rounded.abs();
    if (1e-4..1e9).contains(&abs) {
        let digits_before = abs.log10().floor() as i32 + 1;
        let decimals = (9 - digits_before).max(0) as usize;
        let mut s = format!("{rounded:.decimals$}");
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.pop();
            }
        }
        s
    } else {
        format!("{rounded:e}")
    }
}

/// Apply [`round_sig9`] to every number in a JSON tree.
pub fn round_json(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig9(f)) {
                        *n = rounded;
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Render a JSON report with stable key order and rounded floats.
pub fn to_json_string(mut value: Value) -> String {
    round_json(&mut value);
    let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
    text.push('\n');
    text
}

/// Build a CSV body from a header and rows of preformatted cells.
pub fn to_csv_string(header: &str, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
