//! Numeric text formatting shared by every output file.
//!
//! Numbers are rounded to 12 significant digits and then printed in the
//! shortest form that reads back to the rounded value.

use serde::Serialize;
use serde_json::Value;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Text form used in CSV cells.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round_sig(x);
    // serde_json prints the shortest round-trip representation
    match serde_json::Number::from_f64(if r == 0.0 { 0.0 } else { r }) {
        Some(n) => n.to_string(),
        None => r.to_string(),
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            let r = round_sig(x);
            *v = serde_json::Number::from_f64(if r == 0.0 { 0.0 } else { r }).map_or(Value::Null, Value::Number);
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded, newline terminated.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_num(0.797_884_560_802_865_4), "0.797884560803");
        assert_eq!(fmt_num(1.0), "1.0");
        assert_eq!(fmt_num(-2.5e-20), "-2.5e-20");
        assert_eq!(fmt_num(-0.0), "0.0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(123_456_789_012_345.0), "123456789012000.0");
    }

    #[test]
    fn json_rounding_keeps_integers() {
        let s = to_json(&serde_json::json!({"n": 3, "x": [1.0 / 3.0, 2.0]})).unwrap();
        assert!(s.contains("\"n\": 3"));
        assert!(s.contains("0.333333333333"));
        assert!(!s.contains("0.3333333333333"));
    }
}
