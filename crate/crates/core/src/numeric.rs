//! Scalar abstraction over the two numeric modes: exact rational arithmetic
//! and `f64` with a comparison tolerance.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::{BigRational, FromPrimitive, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Denominator used when sampling exact rationals in [0, 1].
const DYADIC_SAMPLE_DEN: i64 = 1 << 12;

/// Arithmetic shared by the exact-rational and float modes.
///
/// All instance weights, set-function values and derived quantities are
/// expressed in one scalar type per instance. Rational scalars compare
/// exactly; float scalars compare with a relative slack supplied by the
/// instance tolerance.
pub trait Scalar:
    Clone
    + PartialOrd
    + PartialEq
    + Debug
    + Display
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True when comparisons are exact (no tolerance applies).
    const EXACT: bool;

    fn from_int(v: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64_lossy(&self) -> f64;
    fn is_finite_value(&self) -> bool;
    fn abs_value(&self) -> Self;

    /// `self ≤ other`, with `tol`-relative slack in float mode.
    fn le_within(&self, other: &Self, tol: f64) -> bool;

    /// JSON representation: `"p/q"` strings for rationals, numbers for floats.
    fn to_json(&self) -> serde_json::Value;
    fn from_json(v: &serde_json::Value) -> Result<Self>;

    /// Uniform-ish sample in [0, 1]; exact mode draws dyadic rationals so that
    /// downstream sums keep small denominators.
    fn sample_unit(rng: &mut ChaCha8Rng) -> Self;

    fn powi(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc * self.clone();
        }
        acc
    }
}

/// Exact rational scalar.
pub type Rational = BigRational;

pub fn rational_from_parts(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `"p/q"`, `"p"` or a JSON number into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p = BigInt::from_str(p.trim())
            .map_err(|e| Error::Json(format!("bad rational numerator {p:?}: {e}")))?;
        let q = BigInt::from_str(q.trim())
            .map_err(|e| Error::Json(format!("bad rational denominator {q:?}: {e}")))?;
        if q.is_zero() {
            return Err(Error::Json(format!("zero denominator in {text:?}")));
        }
        Ok(BigRational::new(p, q))
    } else {
        let p = BigInt::from_str(text)
            .map_err(|e| Error::Json(format!("bad rational {text:?}: {e}")))?;
        Ok(BigRational::from_integer(p))
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        rational_from_parts(num, den)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn le_within(&self, other: &Self, _tol: f64) -> bool {
        self <= other
    }

    fn to_json(&self) -> serde_json::Value {
        if self.is_integer() {
            serde_json::Value::String(self.numer().to_string())
        } else {
            serde_json::Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Self::from_int(i))
                } else {
                    // Convert the (exact) binary f64 value to a rational.
                    let f = n.as_f64().ok_or_else(|| {
                        Error::Json(format!("cannot read {n} as exact rational"))
                    })?;
                    BigRational::from_f64(f)
                        .ok_or_else(|| Error::Json(format!("non-finite number {f}")))
                }
            }
            other => Err(Error::Json(format!("expected rational, got {other}"))),
        }
    }

    fn sample_unit(rng: &mut ChaCha8Rng) -> Self {
        let k = rng.gen_range(0..=DYADIC_SAMPLE_DEN);
        rational_from_parts(k, DYADIC_SAMPLE_DEN)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn le_within(&self, other: &Self, tol: f64) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        *self <= other + tol * scale
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Json(format!("bad number {n}"))),
            serde_json::Value::String(s) => {
                // Accept "p/q" in float mode too.
                let r = parse_rational(s)?;
                Ok(r.to_f64_lossy())
            }
            other => Err(Error::Json(format!("expected number, got {other}"))),
        }
    }

    fn sample_unit(rng: &mut ChaCha8Rng) -> Self {
        rng.gen::<f64>()
    }
}

/// Sum of a scalar slice.
pub fn sum<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    values.into_iter().fold(S::zero(), |acc, v| acc + v)
}
