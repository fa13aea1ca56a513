//! Instance files and report serialization.
//!
//! An instance file is a JSON object in exactly one of two forms:
//!
//! ```json
//! { "q": [1, "4/3", 2.5], "z": [2, 0.75, 0.25], "K": 2 }
//! { "q": [0.5, 0.5], "B": 1, "C": 1 }
//! ```
//!
//! Scalars may be JSON numbers (decimals are parsed exactly) or strings of
//! the form `"p/q"`, so the exact-rational oracle sees the written values
//! without any lossy round trip. Optional `metadata` holds `name` and
//! `seed`. Reports serialize every float with 17 significant digits so runs
//! are bit-identical for fixed inputs.

use crate::model::{LpInstance, ModelError};
use crate::oracle::{Rational, RationalInstance};
use crate::reduction::{MechanismInstance, ReductionError};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad instance file: {0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Oracle(#[from] crate::oracle::OracleError),
}

/// Parsed LP-form instance: float view plus the exact values as written.
#[derive(Debug, Clone)]
pub struct LpForm {
    pub float: LpInstance,
    pub exact: RationalInstance,
}

#[derive(Debug, Clone)]
pub enum InstanceData {
    Lp(LpForm),
    Mechanism(MechanismInstance),
}

#[derive(Debug, Clone)]
pub struct InstanceFile {
    pub data: InstanceData,
    pub name: Option<String>,
    pub seed: Option<u64>,
}

// Exact decimal-to-rational parsing: sign, digits, optional fraction and
// exponent.
fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(pos) => (&digits[..pos], &digits[pos + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mut num: BigInt = joined.parse().ok()?;
    if neg {
        num = -num;
    }
    let scale = frac_part.len() as i64 - exp10;
    let mut value = Rational::from_integer(num);
    let ten = Rational::from_integer(BigInt::from(10));
    if scale > 0 {
        let mut den = Rational::one();
        for _ in 0..scale {
            den *= &ten;
        }
        value /= den;
    } else {
        for _ in 0..(-scale) {
            value *= &ten;
        }
    }
    Some(value)
}

fn parse_scalar(v: &Value, field: &str) -> Result<Rational, IoError> {
    let bad = || IoError::Schema(format!("cannot parse scalar in field '{field}': {v}"));
    match v {
        Value::Number(n) => parse_decimal(&n.to_string()).ok_or_else(bad),
        Value::String(s) => match s.split_once('/') {
            Some((num, den)) => {
                let num = parse_decimal(num).ok_or_else(bad)?;
                let den = parse_decimal(den).ok_or_else(bad)?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(num / den)
            }
            None => parse_decimal(s).ok_or_else(bad),
        },
        _ => Err(bad()),
    }
}

fn parse_scalar_array(v: &Value, field: &str) -> Result<Vec<Rational>, IoError> {
    let arr = v
        .as_array()
        .ok_or_else(|| IoError::Schema(format!("field '{field}' must be an array")))?;
    arr.iter().map(|e| parse_scalar(e, field)).collect()
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses an instance file from its JSON text.
pub fn parse_instance_str(text: &str) -> Result<InstanceFile, IoError> {
    let root: Value = serde_json::from_str(text)?;
    let obj = root
        .as_object()
        .ok_or_else(|| IoError::Schema("top level must be an object".into()))?;

    let (name, seed) = match obj.get("metadata") {
        Some(Value::Object(meta)) => (
            meta.get("name").and_then(|v| v.as_str()).map(String::from),
            meta.get("seed").and_then(|v| v.as_u64()),
        ),
        _ => (None, None),
    };

    let has_lp = obj.contains_key("z") || obj.contains_key("K");
    let has_mech = obj.contains_key("B") || obj.contains_key("C");
    if has_lp == has_mech {
        return Err(IoError::Schema(
            "exactly one of the LP form {q, z, K} or the mechanism form {q, B, C} must be present"
                .into(),
        ));
    }

    let q = parse_scalar_array(
        obj.get("q")
            .ok_or_else(|| IoError::Schema("missing field 'q'".into()))?,
        "q",
    )?;

    let data = if has_lp {
        let z = parse_scalar_array(
            obj.get("z")
                .ok_or_else(|| IoError::Schema("missing field 'z'".into()))?,
            "z",
        )?;
        let k = parse_scalar(
            obj.get("K")
                .ok_or_else(|| IoError::Schema("missing field 'K'".into()))?,
            "K",
        )?;
        let float = LpInstance::new(
            q.iter().map(to_f64).collect(),
            z.iter().map(to_f64).collect(),
            to_f64(&k),
        )?;
        let exact = RationalInstance::new(q, z, k)?;
        InstanceData::Lp(LpForm { float, exact })
    } else {
        let b = parse_scalar(
            obj.get("B")
                .ok_or_else(|| IoError::Schema("missing field 'B'".into()))?,
            "B",
        )?;
        let c = parse_scalar(
            obj.get("C")
                .ok_or_else(|| IoError::Schema("missing field 'C'".into()))?,
            "C",
        )?;
        let q_f64: Vec<f64> = q.iter().map(to_f64).collect();
        InstanceData::Mechanism(MechanismInstance::new(&q_f64, to_f64(&b), to_f64(&c))?)
    };

    Ok(InstanceFile { data, name, seed })
}

/// Report schema version written into every report file.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// A finite float as a JSON number with 17 significant digits.
pub fn json_f64(v: f64) -> Value {
    assert!(v.is_finite(), "reports only carry finite numbers");
    let text = format!("{:.16e}", v);
    let number: serde_json::Number = serde_json::from_str(&text).expect("formatted float is JSON");
    Value::Number(number)
}

pub fn json_f64_array(values: &[f64]) -> Value {
    Value::Array(values.iter().map(|&v| json_f64(v)).collect())
}

/// Empty report skeleton carrying the schema version.
pub fn report_base() -> Map<String, Value> {
    let mut map = Map::new();
    map.insert("schema_version".into(), Value::from(REPORT_SCHEMA_VERSION));
    map
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ratio;

    #[test]
    fn parses_lp_form_with_rational_strings() {
        let file =
            parse_instance_str(r#"{ "q": [1, 2, 4], "z": [2, "3/4", 0.25], "K": 2 }"#).unwrap();
        match file.data {
            InstanceData::Lp(lp) => {
                assert_eq!(lp.float.z(), &[2.0, 0.75, 0.25]);
                assert_eq!(lp.exact.z()[1], ratio(3, 4));
            }
            _ => panic!("expected LP form"),
        }
    }

    #[test]
    fn parses_mechanism_form_with_metadata() {
        let file = parse_instance_str(
            r#"{ "q": [0.5, 0.5], "B": 1, "C": 1, "metadata": { "name": "pair", "seed": 9 } }"#,
        )
        .unwrap();
        assert_eq!(file.name.as_deref(), Some("pair"));
        assert_eq!(file.seed, Some(9));
        assert!(matches!(file.data, InstanceData::Mechanism(_)));
    }

    #[test]
    fn rejects_mixed_forms() {
        let err = parse_instance_str(r#"{ "q": [1], "z": [1], "K": 1, "B": 1, "C": 1 }"#);
        assert!(matches!(err, Err(IoError::Schema(_))));
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(parse_decimal("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_decimal("-2.5e-1").unwrap(), ratio(-1, 4));
        assert_eq!(parse_decimal("300").unwrap(), ratio(300, 1));
        assert!(parse_decimal("abc").is_none());
    }

    #[test]
    fn json_f64_has_seventeen_significant_digits() {
        let v = json_f64(16.0 / 3.0);
        assert_eq!(v.to_string(), "5.3333333333333330e+0");
    }
}
