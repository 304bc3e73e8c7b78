//! Arithmetic backends.
//!
//! Every analysis runs in one of two modes: exact rationals (the default for
//! integer instances, so identities are checked by equality) or `f64` with a
//! relative tolerance of [`FLOAT_REL_TOL`].

use std::fmt::{self, Debug};
use std::ops::{AddAssign, MulAssign, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Exact arbitrary-precision rational.
pub type Rational = BigRational;

/// Relative tolerance used for every identity check in float mode.
pub const FLOAT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Rational,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const MAX_EXPONENT: i32 = 400;

/// A numeric token as read from text: kept both as the exact decimal value
/// and as the nearest `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Literal {
    pub exact: Rational,
    pub approx: f64,
}

impl Literal {
    pub fn from_i64(v: i64) -> Self {
        Literal {
            exact: Rational::from_integer(BigInt::from(v)),
            approx: v as f64,
        }
    }

    pub fn is_integer(&self) -> bool {
        self.exact.is_integer()
    }
}

impl FromStr for Literal {
    type Err = String;

    /// Accepts `[+-]digits[.digits][(e|E)[+-]digits]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("not a number: {s:?}");
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(pos) => {
                let e: i32 = s[pos + 1..].parse().map_err(|_| bad())?;
                if e.abs() > MAX_EXPONENT {
                    return Err(format!("exponent out of range: {s:?}"));
                }
                (&s[..pos], e)
            }
            None => (s, 0),
        };
        let (negative, body) = match mantissa.as_bytes().first() {
            Some(b'-') => (true, &mantissa[1..]),
            Some(b'+') => (false, &mantissa[1..]),
            _ => (false, mantissa),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((a, b)) => (a, b),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut numer = BigInt::from_str(&digits).map_err(|_| bad())?;
        if negative {
            numer = -numer;
        }
        let scale = exponent - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let exact = if scale >= 0 {
            Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
        } else {
            Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
        };
        let approx: f64 = s.parse().map_err(|_| bad())?;
        Ok(Literal { exact, approx })
    }
}

/// Numeric backend shared by every evaluator.
pub trait Scalar:
    Num + Signed + Clone + Debug + PartialOrd + AddAssign + SubAssign + MulAssign + Send + Sync + 'static
{
    const MODE: Mode;

    fn from_i64(v: i64) -> Self;

    /// `num / den`, built without any floating intermediate in exact mode.
    fn ratio(num: i64, den: i64) -> Self;

    fn from_literal(lit: &Literal) -> Self;

    fn to_f64(&self) -> f64;

    /// The value as an integer, when it is one and fits in `i64`.
    fn to_exact_i64(&self) -> Option<i64>;

    fn from_i128(v: i128) -> Self;

    /// Rational mode: `residual == 0`. Float mode:
    /// `|residual| <= FLOAT_REL_TOL * max(|scale|, 1)`.
    fn negligible(residual: &Self, scale: &Self) -> bool;

    /// Exact fraction string (`"7/15"`) in rational mode, decimal in float mode.
    fn render(&self) -> String;

    /// Token for QAPLIB text; fails when no finite decimal exists.
    fn qaplib_token(&self) -> crate::Result<String>;

    fn from_usize(v: usize) -> Self {
        Self::from_i64(v as i64)
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::Rational;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_literal(lit: &Literal) -> Self {
        lit.exact.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_exact_i64(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    fn from_i128(v: i128) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn negligible(residual: &Self, _scale: &Self) -> bool {
        residual.is_zero()
    }

    fn render(&self) -> String {
        self.to_string()
    }

    fn qaplib_token(&self) -> crate::Result<String> {
        if self.is_integer() {
            return Ok(self.numer().to_string());
        }
        // Terminating iff the reduced denominator is 2^a * 5^b.
        let mut den = self.denom().clone();
        let (two, five) = (BigInt::from(2), BigInt::from(5));
        let (mut twos, mut fives) = (0usize, 0usize);
        while (&den % &two).is_zero() {
            den /= &two;
            twos += 1;
        }
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        if !den.is_one() {
            return Err(crate::Error::NonTerminating(self.to_string()));
        }
        let places = twos.max(fives);
        let scaled = self * Rational::from_integer(num_traits::pow(BigInt::from(10), places));
        let digits = scaled.to_integer().abs().to_string();
        let digits = format!("{digits:0>width$}", width = places + 1);
        let (int_part, frac_part) = digits.split_at(digits.len() - places);
        let sign = if self.is_negative() { "-" } else { "" };
        Ok(format!("{sign}{int_part}.{frac_part}"))
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_literal(lit: &Literal) -> Self {
        lit.approx
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_exact_i64(&self) -> Option<i64> {
        const EXACT_LIMIT: f64 = (1u64 << 53) as f64;
        (self.fract() == 0.0 && self.abs() <= EXACT_LIMIT).then_some(*self as i64)
    }

    fn from_i128(v: i128) -> Self {
        v as f64
    }

    fn negligible(residual: &Self, scale: &Self) -> bool {
        residual.abs() <= FLOAT_REL_TOL * scale.abs().max(1.0)
    }

    fn render(&self) -> String {
        self.to_string()
    }

    fn qaplib_token(&self) -> crate::Result<String> {
        Ok(self.to_string())
    }
}

/// Population mean and variance of a finite sample.
pub fn mean_and_variance<S: Scalar>(values: &[S]) -> (S, S) {
    let count = S::from_usize(values.len().max(1));
    let mut sum = S::zero();
    for v in values {
        sum += v.clone();
    }
    let mean = sum / count.clone();
    let mut sq = S::zero();
    for v in values {
        let dev = v.clone() - mean.clone();
        sq += dev.clone() * dev;
    }
    (mean, sq / count)
}
