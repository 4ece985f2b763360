//! Scalar field abstraction.
//!
//! Two arithmetic modes are supported: exact rationals ([`Rational`], the
//! default) and `f64`. Every algorithm in the crate is generic over
//! [`Scalar`], so the mode is chosen once per computation by the type
//! parameter. In exact mode zero tests are exact; in float mode they use the
//! tolerance carried by the structure the computation runs on.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Default zero tolerance for float mode.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-9;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True for the rational mode.
    const EXACT: bool;

    /// Mode name used in the interchange format (`"rational"` or `"float"`).
    const MODE: &'static str;

    fn from_i64(v: i64) -> Self;

    /// `p / q`; `q` must be nonzero.
    fn ratio(p: i64, q: i64) -> Self {
        Self::from_i64(p) / Self::from_i64(q)
    }

    /// Exact conversion of a finite `f64` (rationals take the binary value).
    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// Zero test. Exact mode ignores `tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    /// Square root when it exists in the field (always for non-negative
    /// floats, only for perfect squares in exact mode).
    fn sqrt_exact(&self) -> Option<Self>;

    /// Default tolerance of the mode: zero for exact arithmetic.
    fn default_tolerance() -> f64 {
        if Self::EXACT {
            0.0
        } else {
            DEFAULT_FLOAT_TOL
        }
    }

    /// Canonical text form (`"p/q"`, `"p"` for integers, or the shortest
    /// round-trip float representation).
    fn to_text(&self) -> String;

    fn parse_text(s: &str) -> Result<Self>;

    fn to_json(&self) -> Value;

    fn from_json(v: &Value) -> Result<Self>;
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "rational";

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(Zero::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let num = self.numer().sqrt();
        let den = self.denom().sqrt();
        if &num * &num == *self.numer() && &den * &den == *self.denom() {
            Some(BigRational::new(num, den))
        } else {
            None
        }
    }

    fn to_text(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Input(format!("invalid rational literal {s:?}"));
        match s.split_once('/') {
            None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
            Some((p, q)) => {
                let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
                let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
                if !q.is_positive() {
                    return Err(Error::Input(format!(
                        "rational literal {s:?} must have a positive denominator"
                    )));
                }
                let r = BigRational::new(p.clone(), q.clone());
                if *r.numer() != p || *r.denom() != q {
                    return Err(Error::Input(format!("rational literal {s:?} is not in lowest terms")));
                }
                Ok(r)
            }
        }
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_text())
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => Self::parse_text(s),
            Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(Self::from_i64(i)),
                None => Err(Error::Input(format!(
                    "rational mode accepts integers or \"p/q\" strings, got {n}"
                ))),
            },
            other => Err(Error::Input(format!("expected a scalar, got {other}"))),
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn is_negligible(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }

    fn sqrt_exact(&self) -> Option<Self> {
        (*self >= 0.0).then(|| self.sqrt())
    }

    fn to_text(&self) -> String {
        format!("{self:?}")
    }

    fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("invalid float {s:?}")))?;
            let q: f64 = q
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("invalid float {s:?}")))?;
            return Ok(p / q);
        }
        s.parse().map_err(|_| Error::Input(format!("invalid float {s:?}")))
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(self.to_text()))
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Input(format!("unrepresentable number {n}"))),
            Value::String(s) => Self::parse_text(s),
            other => Err(Error::Input(format!("expected a scalar, got {other}"))),
        }
    }
}

/// Shorthand for building rationals in tests and sample tables.
pub fn q(p: i64, den: i64) -> Rational {
    Rational::ratio(p, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_roundtrip() {
        for s in ["0", "8", "-3/4", "1/2"] {
            assert_eq!(Rational::parse_text(s).unwrap().to_text(), s);
        }
    }

    #[test]
    fn rational_rejects_unreduced_and_negative_denominator() {
        assert!(Rational::parse_text("2/4").is_err());
        assert!(Rational::parse_text("1/-2").is_err());
        assert!(Rational::parse_text("1/0").is_err());
        assert!(Rational::parse_text("0.5").is_err());
    }

    #[test]
    fn rational_json_accepts_integer_shorthand() {
        let v: Value = serde_json::from_str("[3, \"-1/7\", 1.5]").unwrap();
        let arr = v.as_array().unwrap();
        assert_eq!(Rational::from_json(&arr[0]).unwrap(), q(3, 1));
        assert_eq!(Rational::from_json(&arr[1]).unwrap(), q(-1, 7));
        assert!(Rational::from_json(&arr[2]).is_err());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(q(9, 4).sqrt_exact(), Some(q(3, 2)));
        assert_eq!(q(2, 1).sqrt_exact(), None);
        assert_eq!(q(-1, 1).sqrt_exact(), None);
        assert_eq!(2.25f64.sqrt_exact(), Some(1.5));
    }

    #[test]
    fn zero_tests_by_mode() {
        assert!(!q(1, 1_000_000_000).is_negligible(1e-3));
        assert!(1e-12f64.is_negligible(1e-9));
        assert_eq!(Rational::default_tolerance(), 0.0);
    }
}
