//! Exact arbitrary-precision rational numbers.
//!
//! Every quantity in this crate is a `Rational`; there is no floating point
//! anywhere on a certificate-relevant path. Values are kept in canonical form
//! (reduced, denominator positive) after every operation.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact rational number `p/q` with `q > 0` and `gcd(|p|, q) = 1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_bigint(v: BigInt) -> Self {
        Rational(BigRational::from_integer(v))
    }

    /// `numer/denom`, reduced on construction. Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Self {
        assert!(!denom.is_zero(), "zero denominator");
        Rational(BigRational::new(numer, denom))
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

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    /// Largest integer `<= self`.
    pub fn floor_int(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// Smallest integer `>= self`.
    pub fn ceil_int(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    /// Renders as `p/q` with the denominator always spelled out, e.g. `7/1`.
    pub fn to_ratio_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }

    /// Parses a decimal literal with a finite expansion, e.g. `3.25` -> `13/4`.
    pub fn from_decimal_str(s: &str) -> Result<Self, ParseRationalError> {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some(parts) => parts,
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return Err(ParseRationalError::Malformed(s.to_string()));
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = digits
            .parse()
            .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        let value = Rational::from_big(numer, denom);
        Ok(if neg { -&value } else { value })
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p`, `-p`, `p/q`, and `-p/q` with `q > 0` after reduction.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        match s.split_once('/') {
            None => {
                let n: BigInt = s
                    .parse()
                    .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
                Ok(Rational::from_bigint(n))
            }
            Some((p, q)) => {
                let p: BigInt = p
                    .trim()
                    .parse()
                    .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
                let q: BigInt = q
                    .trim()
                    .parse()
                    .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
                if q.is_zero() {
                    return Err(ParseRationalError::ZeroDenominator(s.to_string()));
                }
                Ok(Rational::from_big(p, q))
            }
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_int(v)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $trait<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        self.0 -= rhs.0;
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn div(self, rhs: &'a Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn canonical_form_on_construction() {
        let r = Rational::new(6, -4);
        assert_eq!(r.numer(), &BigInt::from(-3));
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.to_string(), "-3/2");
    }

    #[test]
    fn parse_and_display_roundtrip() {
        for s in ["0", "7", "-7", "1/2", "-3/2", "22/7"] {
            assert_eq!(q(s).to_string(), s);
        }
        assert_eq!(q("4/2").to_string(), "2");
        assert_eq!(q("-4/6").to_string(), "-2/3");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Rational::from_str("").is_err());
        assert!(Rational::from_str("a/b").is_err());
        assert_eq!(
            Rational::from_str("1/0"),
            Err(ParseRationalError::ZeroDenominator("1/0".into()))
        );
    }

    #[test]
    fn decimal_literals() {
        assert_eq!(Rational::from_decimal_str("3.25").unwrap(), q("13/4"));
        assert_eq!(Rational::from_decimal_str("-0.5").unwrap(), q("-1/2"));
        assert_eq!(Rational::from_decimal_str("7.0").unwrap(), q("7"));
        assert_eq!(Rational::from_decimal_str("12").unwrap(), q("12"));
        assert!(Rational::from_decimal_str("1.2.3").is_err());
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(q("7/2").floor_int(), BigInt::from(3));
        assert_eq!(q("7/2").ceil_int(), BigInt::from(4));
        assert_eq!(q("-7/2").floor_int(), BigInt::from(-4));
        assert_eq!(q("-7/2").ceil_int(), BigInt::from(-3));
        assert_eq!(q("4").floor_int(), BigInt::from(4));
    }

    #[test]
    fn ratio_string_keeps_denominator() {
        assert_eq!(q("7").to_ratio_string(), "7/1");
        assert_eq!(q("-1/2").to_ratio_string(), "-1/2");
    }
}
