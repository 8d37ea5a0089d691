use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Relative tolerance used by float mode wherever exact mode tests for zero.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// Numeric mode of a [`Scalar`] implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    ExactRational,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::ExactRational => "exact",
            Mode::Float => "float",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "rational" | "exact_rational" => Ok(Mode::ExactRational),
            "float" | "f64" => Ok(Mode::Float),
            other => Err(Error::Parse(format!("unknown numeric mode `{other}`"))),
        }
    }
}

/// A real-number representation all of the game, oracle and adversary code is
/// generic over.
///
/// Two implementations exist: [`Rational`] (exact) and `f64`. Mixing modes is
/// ruled out by the type system: every vector, matrix and strategy carries a
/// single scalar type.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn from_int(n: i64) -> Self;

    /// `num / den`; panics on a zero denominator.
    fn ratio(num: i64, den: i64) -> Self;

    /// Exact conversion for rationals (every finite double is a dyadic
    /// rational); `None` for non-finite input.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    fn floor(&self) -> Self;

    /// Exact mode: `self == 0`. Float mode: `|self| <= FLOAT_TOLERANCE * scale`.
    fn is_negligible(&self, scale: &Self) -> bool;

    /// `"num/den"` for rationals, shortest round-trip decimal for floats.
    fn to_canonical(&self) -> String;

    fn parse_canonical(s: &str) -> Result<Self>;

    fn is_exact() -> bool {
        Self::MODE == Mode::ExactRational
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for Rational {
    const MODE: Mode = Mode::ExactRational;

    fn from_int(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Option<Self> {
        Rational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        // Shift both parts down so huge numerators/denominators do not overflow
        // the intermediate conversion.
        let (n, d) = (self.numer(), self.denom());
        let excess = n.bits().max(d.bits()).saturating_sub(1000);
        if excess == 0 {
            return match (n.to_f64(), d.to_f64()) {
                (Some(a), Some(b)) => a / b,
                _ => f64::NAN,
            };
        }
        let n2: BigInt = n >> excess;
        let d2: BigInt = d >> excess;
        if d2.is_zero() {
            return if n.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        n2.to_f64().unwrap_or(f64::NAN) / d2.to_f64().unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn floor(&self) -> Self {
        Rational::from_integer(self.numer().div_floor(self.denom()))
    }

    fn is_negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }

    fn to_canonical(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_canonical(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

impl Scalar for f64 {
    const MODE: Mode = Mode::Float;

    fn from_int(n: i64) -> Self {
        n as f64
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
        f64::abs(*self)
    }

    fn floor(&self) -> Self {
        f64::floor(*self)
    }

    fn is_negligible(&self, scale: &Self) -> bool {
        f64::abs(*self) <= FLOAT_TOLERANCE * f64::abs(*scale)
    }

    fn to_canonical(&self) -> String {
        // Rust's float Display is the shortest string that round-trips.
        format!("{self}")
    }

    fn parse_canonical(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('/') {
            return Ok(Scalar::to_f64(&parse_rational(s)?));
        }
        s.parse::<f64>()
            .map_err(|e| Error::Parse(format!("`{s}`: {e}")))
    }
}

/// Parses `"n/d"`, `"n"` or a finite decimal such as `"-0.125"` into an exact
/// rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = |why: &str| Error::Parse(format!("`{s}`: {why}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad("bad numerator"))?;
        let d: BigInt = d.trim().parse().map_err(|_| bad("bad denominator"))?;
        if d.is_zero() {
            return Err(bad("zero denominator"));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let mut n: BigInt = digits.parse().map_err(|_| bad("bad decimal"))?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(n, d));
    }
    let n: BigInt = s.parse().map_err(|_| bad("not a number"))?;
    Ok(Rational::from_integer(n))
}

/// Lossy conversion between modes through `f64` (exact when the source is a
/// float and the target is rational).
pub fn convert<A: Scalar, B: Scalar>(x: &A) -> B {
    B::from_f64(x.to_f64()).expect("finite scalar")
}

/// `base^exp` for a possibly negative integer exponent.
pub fn powi<S: Scalar>(base: &S, exp: i32) -> S {
    let mut acc = S::one();
    for _ in 0..exp.unsigned_abs() {
        acc = acc * base.clone();
    }
    if exp < 0 {
        S::one() / acc
    } else {
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_canonical() {
        let x = Rational::ratio(6, -8);
        assert_eq!(x.to_canonical(), "-3/4");
        assert_eq!(Rational::from_int(3).to_canonical(), "3/1");
    }

    #[test]
    fn exact_cancellation() {
        let a = Rational::ratio(1, 3);
        let b = Rational::ratio(1, 7);
        assert_eq!(a.clone() + b.clone() - b, a);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/6").unwrap(), Rational::ratio(1, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), Rational::ratio(-1, 8));
        assert_eq!(parse_rational("7").unwrap(), Rational::from_int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(f64::parse_canonical("1/4").unwrap(), 0.25);
    }

    #[test]
    fn float_shortest_roundtrip() {
        let x = 0.1_f64 + 0.2;
        assert_eq!(f64::parse_canonical(&x.to_canonical()).unwrap(), x);
    }

    #[test]
    fn to_f64_of_tiny_rational() {
        let tiny = powi(&Rational::ratio(1, 2), 81);
        assert_eq!(Scalar::to_f64(&tiny), 2f64.powi(-81));
        let huge_parts = Rational::new(
            num_traits::pow(BigInt::from(3), 900),
            num_traits::pow(BigInt::from(3), 901),
        );
        assert!((Scalar::to_f64(&huge_parts) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn floor_negative() {
        assert_eq!(Rational::ratio(-1, 2).floor(), Rational::from_int(-1));
        assert_eq!(Rational::ratio(7, 2).floor(), Rational::from_int(3));
    }
}
