//! Exact scalar types.
//!
//! Path geometry uses [`Frac`] (`i64` numerator and denominator): the
//! coordinates that occur in crystals of moderate rank stay tiny. Anything
//! probabilistic uses the arbitrary precision [`Q`].

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Frac = Ratio<i64>;
pub type Q = BigRational;

pub fn frac(n: i64, d: i64) -> Frac {
    Frac::new(n, d)
}

pub fn int(n: i64) -> Frac {
    Frac::from_integer(n)
}

pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_q(f: &Frac) -> Q {
    Q::new(BigInt::from(*f.numer()), BigInt::from(*f.denom()))
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"p/q"`, `"p"` or a JSON integer into an exact rational.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| Error::Format(format!("bad rational {s:?}")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| Error::Format(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Format(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(n, d))
}

pub fn parse_frac(s: &str) -> Result<Frac> {
    let q = parse_q(s)?;
    let n = q
        .numer()
        .to_i64()
        .ok_or_else(|| Error::Format(format!("rational {s:?} out of range")))?;
    let d = q
        .denom()
        .to_i64()
        .ok_or_else(|| Error::Format(format!("rational {s:?} out of range")))?;
    Ok(Frac::new(n, d))
}

/// Reads a rational from a JSON string (`"1/2"`) or number (`3`).
pub fn q_from_json(v: &serde_json::Value) -> Result<Q> {
    match v {
        serde_json::Value::String(s) => parse_q(s),
        serde_json::Value::Number(n) => match n.as_i64() {
            Some(k) => Ok(q_int(k)),
            None => Err(Error::Format(format!(
                "non-integer JSON number {n}; write rationals as \"p/q\" strings"
            ))),
        },
        other => Err(Error::Format(format!("expected a rational, got {other}"))),
    }
}

pub fn frac_from_json(v: &serde_json::Value) -> Result<Frac> {
    let q = q_from_json(v)?;
    parse_frac(&q.to_string())
}

/// `q^k` for any integer `k` (negative powers invert).
pub fn q_pow(q: &Q, k: i64) -> Q {
    if k >= 0 {
        num_traits::pow(q.clone(), k as usize)
    } else {
        num_traits::pow(q.recip(), k.unsigned_abs() as usize)
    }
}

/// Exact `{"exact": "p/q", "float": x}` rendering used by every JSON output.
pub fn q_json(q: &Q) -> serde_json::Value {
    serde_json::json!({ "exact": q.to_string(), "float": to_f64(q) })
}

pub fn ceil_to_i64(f: &Frac) -> i64 {
    f.ceil().to_integer()
}

pub fn abs_q(q: &Q) -> Q {
    q.abs()
}

pub fn is_unit_interval_open(q: &Q) -> bool {
    q.is_positive() && q < &Q::one()
}
