//! Exact rational scalars and the coefficient trait shared by exact and
//! floating-point evaluation.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in reduced form with a positive denominator.
pub type Scalar = BigRational;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-0.125"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let t = s.trim();
    let bad = || Error::Schema(format!("not a rational number: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Schema(format!("zero denominator in {s:?}")));
        }
        return Ok(Scalar::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{whole_digits}{frac}");
        let mut num: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Scalar::new(num, den));
    }
    let p: BigInt = t.parse().map_err(|_| bad())?;
    Ok(Scalar::from_integer(p))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_scalar(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

pub fn to_f64(s: &Scalar) -> f64 {
    s.to_f64().unwrap_or(f64::NAN)
}

pub fn abs(s: &Scalar) -> Scalar {
    s.abs()
}

/// Ring operations needed by the tensor formulas. Implemented for `f64`
/// (simulation) and `Scalar` (exact verification and oracle checks).
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_scalar(s: &Scalar) -> Self;

    /// Entries as plain floats when the type is `f64`; `None` for exact types.
    fn to_f64_slice(z: &[Self]) -> Option<Vec<f64>>;

    fn from_f64_vec(v: Vec<f64>) -> Option<Vec<Self>>;

    fn abs_f64(&self) -> f64;
}

impl Coeff for f64 {
    fn from_scalar(s: &Scalar) -> Self {
        to_f64(s)
    }
    fn to_f64_slice(z: &[Self]) -> Option<Vec<f64>> {
        Some(z.to_vec())
    }
    fn from_f64_vec(v: Vec<f64>) -> Option<Vec<Self>> {
        Some(v)
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
}

impl Coeff for Scalar {
    fn from_scalar(s: &Scalar) -> Self {
        s.clone()
    }
    fn to_f64_slice(_: &[Self]) -> Option<Vec<f64>> {
        None
    }
    fn from_f64_vec(_: Vec<f64>) -> Option<Vec<Self>> {
        None
    }
    fn abs_f64(&self) -> f64 {
        to_f64(&self.abs())
    }
}

pub fn to_f64_vec(v: &[Scalar]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

/// Parses a comma-separated list of rationals, e.g. `"1,1/2,-3"`.
pub fn parse_scalar_list(s: &str) -> Result<Vec<Scalar>> {
    s.split(',').map(parse_scalar).collect()
}

/// Serde adapter: rationals travel as strings, integers are also accepted as JSON numbers.
pub mod serde_scalar {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_scalar(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        d.deserialize_any(ScalarVisitor)
    }

    struct ScalarVisitor;

    impl<'de> Visitor<'de> for ScalarVisitor {
        type Value = Scalar;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a rational string such as \"3/4\" or an integer")
        }
        fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Scalar, E> {
            parse_scalar(v).map_err(E::custom)
        }
        fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Scalar, E> {
            Ok(int(v))
        }
        fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Scalar, E> {
            Ok(Scalar::from_integer(BigInt::from(v)))
        }
        fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Scalar, E> {
            Scalar::from_float(v).ok_or_else(|| E::custom("non-finite number"))
        }
    }
}

/// Serde adapter for dense rational matrices given as nested arrays.
pub mod serde_matrix {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    #[serde(transparent)]
    struct Cell(#[serde(with = "serde_scalar")] Scalar);

    pub fn serialize<S: Serializer>(m: &[Vec<Scalar>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Cell>> = m
            .iter()
            .map(|r| r.iter().cloned().map(Cell).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Scalar>>, D::Error> {
        let rows: Vec<Vec<Cell>> = Vec::deserialize(d)?;
        Ok(rows
            .into_iter()
            .map(|r| r.into_iter().map(|c| c.0).collect())
            .collect())
    }
}
