//! Exact rational numbers used for weights, densities and box bounds.
//!
//! Text form is `num/den` (always with a denominator on output). Parsing also
//! accepts plain integers and base-10 decimals such as `2.5` or `1e6`, which
//! are converted literally, so `0.1` is exactly `1/10`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(Rational(BigRational::new(numer.into(), denom)))
    }

    pub fn from_integer(value: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(value.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `2^exp` exactly.
    pub fn pow2(exp: u32) -> Self {
        Rational::from_integer(BigInt::one() << exp)
    }

    /// Exact value of a finite float (every finite `f64` is a dyadic rational).
    pub fn from_f64(value: f64) -> Result<Self> {
        BigRational::from_float(value)
            .map(Rational)
            .ok_or_else(|| Error::InvalidInput(format!("non-finite value {value}")))
    }

    /// Nearest `f64`.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Smallest `f64` that is `>= self`.
    pub fn to_f64_up(&self) -> f64 {
        let f = self.to_f64();
        match Rational::from_f64(f) {
            Ok(r) if r < *self => f.next_up(),
            _ => f,
        }
    }

    /// Largest `f64` that is `<= self`.
    pub fn to_f64_down(&self) -> f64 {
        let f = self.to_f64();
        match Rational::from_f64(f) {
            Ok(r) if r > *self => f.next_down(),
            _ => f,
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn ceil(&self) -> Rational {
        Rational(self.0.ceil())
    }

    pub fn floor(&self) -> Rational {
        Rational(self.0.floor())
    }

    /// `ceil(self)` as an integer; errors if it does not fit.
    pub fn ceil_u64(&self) -> Result<u64> {
        self.0
            .ceil()
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::InvalidInput(format!("{self} does not fit in u64 after ceil")))
    }

    pub fn recip(&self) -> Result<Rational> {
        if self.is_zero() {
            return Err(Error::InvalidInput("reciprocal of zero".into()));
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn pow(&self, exp: u32) -> Rational {
        Rational(num_traits::pow(self.0.clone(), exp as usize))
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }

    pub fn lcm_denom<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
        values
            .into_iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Rational::from_integer(v)
    }
}

impl From<u64> for Rational {
    fn from(v: u64) -> Self {
        Rational::from_integer(v)
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("cannot parse {s:?} as a rational"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            return Rational::new(n, d).map_err(|_| bad());
        }
        parse_decimal(s).ok_or_else(bad)
    }
}

/// `[-+]digits[.digits][e[-+]digits]`, converted literally.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let scale = exponent.checked_sub(i32::try_from(frac_part.len()).ok()?)?;
    if scale.unsigned_abs() > 4096 {
        return None;
    }
    let ten = BigInt::from(10);
    let value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, scale.unsigned_abs() as usize))
    };
    Some(Rational(if negative { -value } else { value }))
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

/// Compares `x` against `(3 + sqrt 5) / 2` exactly.
pub fn cmp_golden_square(x: &Rational) -> Ordering {
    // x >= (3+√5)/2  <=>  2x - 3 >= 0 and (2x - 3)^2 >= 5
    let t = x * &Rational::from(2) - Rational::from(3);
    if !t.is_positive() {
        return Ordering::Less;
    }
    (&t * &t).cmp(&Rational::from(5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn parses_all_forms() {
        assert_eq!(r("3"), Rational::from(3));
        assert_eq!(r("6/4"), Rational::new(3, 2).unwrap());
        assert_eq!(r("2.5"), Rational::new(5, 2).unwrap());
        assert_eq!(r("0.1"), Rational::new(1, 10).unwrap());
        assert_eq!(r("1e6"), Rational::from(1_000_000));
        assert_eq!(r("-1.25e-1"), Rational::new(-1, 8).unwrap());
        assert_eq!(r(".5"), Rational::new(1, 2).unwrap());
        for bad in ["", "abc", "1/0", "1.2.3", "e5", "--1", "1/x"] {
            assert!(bad.parse::<Rational>().is_err(), "{bad}");
        }
    }

    #[test]
    fn display_always_has_denominator() {
        assert_eq!(Rational::from(3).to_string(), "3/1");
        assert_eq!(r("10/4").to_string(), "5/2");
    }

    #[test]
    fn directed_float_conversion() {
        let third = r("1/3");
        assert!(Rational::from_f64(third.to_f64_up()).unwrap() >= third);
        assert!(Rational::from_f64(third.to_f64_down()).unwrap() <= third);
        assert_eq!(r("1/2").to_f64_up(), 0.5);
        assert_eq!(r("1/2").to_f64_down(), 0.5);
    }

    #[test]
    fn golden_comparison() {
        assert_eq!(cmp_golden_square(&r("2.618")), Ordering::Less);
        assert_eq!(cmp_golden_square(&r("2.6181")), Ordering::Greater);
        assert_eq!(cmp_golden_square(&r("3")), Ordering::Greater);
        assert_eq!(cmp_golden_square(&r("1")), Ordering::Less);
    }

    #[test]
    fn serde_as_string() {
        let json = serde_json::to_string(&r("7/3")).unwrap();
        assert_eq!(json, "\"7/3\"");
        let back: Rational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r("7/3"));
    }
}
