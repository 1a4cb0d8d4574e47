//! Coefficient domains for forms and matrices.
//!
//! Two domains are supported: exact rationals ([`Rational`], arbitrary
//! precision) and `f64`. Identities that hold exactly (orbit membership of the
//! standard 3-form, invariant-form counts, neck-form preservation) are checked
//! in the rational domain with zero tolerance.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::linalg;

/// Exact rational number.
pub type Rational = num_rational::BigRational;

/// Which coefficient domain a value lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Exact,
    Real,
}

/// Field operations plus the few extra capabilities the geometry code needs.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const DOMAIN: Domain;

    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Sign as -1, 0 or 1. In the real domain this is the plain IEEE sign.
    fn sign(&self) -> i32;
    /// Real `n`-th root. For odd `n` negative inputs are allowed. Exact
    /// values return `None` when the root is not rational.
    fn root(&self, n: u32) -> Option<Self>;
    /// Whether the symmetric matrix is positive definite (exactly, or to the
    /// scale-invariant eigenvalue-ratio tolerance for reals).
    fn positive_definite(m: &[Vec<Self>]) -> bool;
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self, ParseScalarError>;

    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse scalar from {0}")]
pub struct ParseScalarError(pub String);

/// Smallest eigenvalue must exceed this fraction of the largest one.
pub const POSITIVITY_RATIO: f64 = 1e-10;

impl Scalar for f64 {
    const DOMAIN: Domain = Domain::Real;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sign(&self) -> i32 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }

    fn root(&self, n: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        if *self < 0.0 {
            if n % 2 == 0 {
                return None;
            }
            return Some(-(-self).powf(1.0 / n as f64));
        }
        Some(self.powf(1.0 / n as f64))
    }

    fn positive_definite(m: &[Vec<Self>]) -> bool {
        let eig = linalg::symmetric_eigenvalues(m);
        let max = eig.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
        max > 0.0 && min > POSITIVITY_RATIO * max
    }

    fn to_json(&self) -> Value {
        serde_json::json!(*self)
    }

    fn from_json(v: &Value) -> Result<Self, ParseScalarError> {
        match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| ParseScalarError(v.to_string())),
            Value::String(s) => {
                let r = parse_rational(s)?;
                Ok(Scalar::to_f64(&r))
            }
            _ => Err(ParseScalarError(v.to_string())),
        }
    }
}

impl Scalar for Rational {
    const DOMAIN: Domain = Domain::Exact;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sign(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }

    fn root(&self, n: u32) -> Option<Self> {
        if n == 0 {
            return None;
        }
        let neg = self.is_negative();
        if neg && n % 2 == 0 {
            return None;
        }
        let num = self.numer().abs();
        let den = self.denom().clone();
        let rn = num.nth_root(n);
        let rd = den.nth_root(n);
        if num_traits::pow(rn.clone(), n as usize) != num || num_traits::pow(rd.clone(), n as usize) != den {
            return None;
        }
        let r = Rational::new(rn, rd);
        Some(if neg { -r } else { r })
    }

    fn positive_definite(m: &[Vec<Self>]) -> bool {
        linalg::exact_positive_definite(m)
    }

    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn from_json(v: &Value) -> Result<Self, ParseScalarError> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => n
                .as_i64()
                .map(Rational::from_i64)
                .ok_or_else(|| ParseScalarError(v.to_string())),
            _ => Err(ParseScalarError(v.to_string())),
        }
    }
}

/// Parses `"n"`, `"-n"` or `"n/d"`.
pub fn parse_rational(s: &str) -> Result<Rational, ParseScalarError> {
    let s = s.trim();
    let err = || ParseScalarError(s.to_string());
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| err())?)),
    }
}

/// Formats as `"n/d"`, or `"n"` when the denominator is one.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roots() {
        assert_eq!(rat(8, 27).root(3), Some(rat(2, 3)));
        assert_eq!(rat(-1, 512).root(9), Some(rat(-1, 2)));
        assert_eq!(rat(2, 1).root(3), None);
        assert_eq!(rat(-4, 1).root(2), None);
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["3/4", "-7", "0", "12/5"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn real_odd_root_of_negative() {
        assert!((f64::root(&-8.0, 3).unwrap() + 2.0).abs() < 1e-15);
        assert!(f64::root(&-8.0, 2).is_none());
    }
}
