//! Arithmetic backends.
//!
//! Every algebraic routine in this crate is generic over [`Scalar`], with two
//! implementations: `f64` (fast, approximate) and [`Rational`] (exact). Exact
//! arithmetic matters in two places: proving axioms rather than testing them
//! within a tolerance, and evaluating characters at rational points where the
//! minimal solution of the recurrence would otherwise be destroyed by
//! roundoff amplification.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

/// Exact rational scalar (arbitrary precision).
pub type Rational = BigRational;

/// Error from [`Scalar::parse`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseNumberError {
    pub text: String,
}

impl fmt::Display for ParseNumberError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse `{}` as a number (decimal or p/q)", self.text)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParseNumberError {}

/// Field scalar for the algebra layer.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + fmt::Debug
    + fmt::Display
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
{
    /// True when arithmetic is exact: comparisons may use zero tolerance.
    const EXACT: bool;

    fn from_int(v: i64) -> Self;

    /// The fraction `num/den`. Panics if `den == 0`.
    fn ratio(num: i64, den: i64) -> Self;

    /// Exact conversion from a finite `f64` (dyadic rational). `None` for
    /// NaN/infinite input.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    /// False only for non-finite floats; rationals are always finite.
    fn is_finite(&self) -> bool;

    /// Parse a decimal literal (`-0.25`, `1e-10`) or a fraction (`p/q`).
    /// Exact for the rational backend.
    fn parse(text: &str) -> Result<Self, ParseNumberError>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(v: i64) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        Float::abs(*self)
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn parse(text: &str) -> Result<Self, ParseNumberError> {
        let bad = || ParseNumberError { text: text.to_string() };
        if let Some((p, q)) = text.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            return Ok(p / q);
        }
        let v: f64 = text.trim().parse().map_err(|_| bad())?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Out-of-range magnitudes collapse to signed infinity.
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn parse(text: &str) -> Result<Self, ParseNumberError> {
        parse_rational(text).ok_or_else(|| ParseNumberError { text: text.to_string() })
    }
}

/// Parse `p/q` or a decimal/scientific literal into an exact rational.
fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    // Split off an exponent part, if any.
    let (mantissa, exp) = match text.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().ok()?),
        None => (text, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if joined.is_empty() { BigInt::zero() } else { joined.parse().ok()? };
    numer *= BigInt::from(sign);
    let shift = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let pow = num_traits::pow::pow(ten, shift.unsigned_abs() as usize);
    Some(if shift >= 0 {
        BigRational::from_integer(numer * pow)
    } else {
        BigRational::new(numer, pow)
    })
}

/// `base^n` by repeated squaring.
pub fn pow_usize<S: Scalar>(base: &S, n: usize) -> S {
    let mut result = S::one();
    let mut sq = base.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            result = result * &sq;
        }
        sq = sq.clone() * &sq;
        n >>= 1;
    }
    result
}

/// Render values for byte-stable CSV output: 17 significant digits,
/// scientific notation, `.` decimal separator.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{v:.16e}")
    }
}

/// Collect `xs` through [`Scalar::parse`], reporting the first failure.
pub fn parse_all<S: Scalar>(xs: &[&str]) -> Result<Vec<S>, ParseNumberError> {
    xs.iter().map(|x| S::parse(x)).collect()
}
