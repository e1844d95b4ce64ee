//! Fixed 12-significant-digit output for CSV and JSON.

use serde::Serialize;
use serde_json::Value;

const SIG_DIGITS: usize = 12;

fn scientific(x: f64) -> (String, i32) {
    let s = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = s.split_once('e').expect("scientific notation");
    (mantissa.to_owned(), exp.parse().expect("integer exponent"))
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `printf("%.12g")`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let (mantissa, exp) = scientific(x);
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(&mantissa), exp.abs())
    }
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(0.0));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_value).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_value(v))).collect())
        }
        other => other,
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let v = round_value(serde_json::to_value(value)?);
    serde_json::to_string_pretty(&v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(0.25), "0.25");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(11.0 / 12.0), "0.916666666667");
        assert_eq!(fmt_sig(-0.16), "-0.16");
        assert_eq!(fmt_sig(1e-7), "1e-07");
        assert_eq!(fmt_sig(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_sig(0.99999999999999), "1");
        assert_eq!(fmt_sig(0.000123), "0.000123");
    }

    #[test]
    fn rounding_is_idempotent() {
        for &x in &[1.0 / 3.0, 0.1 + 0.2, 2.0_f64.sqrt() * 1e-9, 0.999979654948] {
            let r = round_sig(x);
            assert_eq!(round_sig(r), r);
        }
    }
}
