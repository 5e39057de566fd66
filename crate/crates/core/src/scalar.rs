//! Scalars: exact rationals and doubles behind one trait.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar used throughout.
pub type Q = BigRational;

pub trait Scalar: Clone + Debug + PartialEq + Num + Neg<Output = Self> + Send + Sync {
    fn from_i64(v: i64) -> Self;
    fn from_q(q: &Q) -> Self;
    fn to_f64(&self) -> f64;

    /// Zero test; exact for rationals, within `tol` for doubles.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Text form used in JSON output.
    fn render(&self) -> String;
}

impl Scalar for Q {
    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_q(q: &Q) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
    fn render(&self) -> String {
        format!("{self:e}")
    }
}

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Parses `"p/q"` or `"p"`; rejects zero denominators.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| Error::Schema(format!("malformed rational `{s}`")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| Error::Schema(format!("malformed rational `{s}`")))?;
    if d.is_zero() {
        return Err(Error::Schema(format!("zero denominator in `{s}`")));
    }
    Ok(Q::new(n, d))
}

pub fn format_q(v: &Q) -> String {
    v.to_string()
}

/// Integer power of a rational, with `0^0 = 1`.
pub fn pow_q(base: &Q, exp: usize) -> Q {
    let mut acc = Q::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn sqrt_q(v: &Q) -> Option<Q> {
    if v < &Q::zero() {
        return None;
    }
    let n = v.numer().sqrt();
    let d = v.denom().sqrt();
    if &(&n * &n) == v.numer() && &(&d * &d) == v.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Serde codec for a rational as a `"p/q"` string.
pub mod q_str {
    use super::{parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let raw = String::deserialize(d)?;
        parse_q(&raw).map_err(serde::de::Error::custom)
    }
}
