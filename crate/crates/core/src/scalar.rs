//! Exact scalar types for slope arithmetic.
//!
//! Everything in the slope calculus is written against [`Scalar`], which is
//! implemented for `Ratio<T>` over any signed machine or big integer. The
//! default instantiation is [`crate::Rational`] (`Ratio<BigInt>`); the
//! fixed-width variants are handy for fast sweeps where the values are known
//! to be small. Floating point types are deliberately not scalars: slope
//! comparisons must be exact.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FractionParseError {
    #[error("empty fraction string")]
    Empty,
    #[error("invalid integer `{0}` in fraction")]
    InvalidInteger(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// An exact ordered field element.
pub trait Scalar:
    Clone + Ord + Debug + Display + Signed + FromStr + Send + Sync + 'static
{
    fn from_int(value: i64) -> Self;

    fn from_uint(value: u64) -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn is_integral(&self) -> bool;

    /// Smallest integer `>= self`, when it fits in an `i64`.
    fn ceil_i64(&self) -> Option<i64>;

    /// Canonical `"num/den"` form in lowest terms; the denominator is always
    /// written, even when it is 1.
    fn to_fraction_string(&self) -> String;

    /// Accepts `"num/den"` or a bare integer `"num"`.
    fn parse_fraction(text: &str) -> Result<Self, FractionParseError>;

    fn pow_u32(&self, exp: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc * self.clone();
        }
        acc
    }

    /// `p^s` as a scalar.
    fn power_of(base: u64, exp: u32) -> Self {
        Self::from_uint(base).pow_u32(exp)
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Clone
        + Integer
        + Signed
        + FromPrimitive
        + ToPrimitive
        + Display
        + Debug
        + FromStr
        + Send
        + Sync
        + 'static,
{
    fn from_int(value: i64) -> Self {
        Ratio::from_integer(T::from_i64(value).expect("integer type too narrow"))
    }

    fn from_uint(value: u64) -> Self {
        Ratio::from_integer(T::from_u64(value).expect("integer type too narrow"))
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(
            T::from_i64(numer).expect("integer type too narrow"),
            T::from_i64(denom).expect("integer type too narrow"),
        )
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn ceil_i64(&self) -> Option<i64> {
        self.ceil().to_integer().to_i64()
    }

    fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    fn parse_fraction(text: &str) -> Result<Self, FractionParseError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(FractionParseError::Empty);
        }
        let parse_int = |s: &str| {
            let s = s.trim();
            let (negative, digits) = match s.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, s.strip_prefix('+').unwrap_or(s)),
            };
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(FractionParseError::InvalidInteger(s.to_string()));
            }
            let value = T::from_str_radix(digits, 10)
                .map_err(|_| FractionParseError::InvalidInteger(s.to_string()))?;
            Ok(if negative { -value } else { value })
        };
        match text.split_once('/') {
            None => Ok(Ratio::from_integer(parse_int(text)?)),
            Some((n, d)) => {
                let numer = parse_int(n)?;
                let denom = parse_int(d)?;
                if denom.is_zero() {
                    return Err(FractionParseError::ZeroDenominator(text.to_string()));
                }
                Ok(Ratio::new(numer, denom))
            }
        }
    }
}

/// Serde adapter writing scalars as exact fraction strings.
pub mod fraction_serde {
    use super::Scalar;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Scalar, Ser: Serializer>(value: &S, ser: Ser) -> Result<Ser::Ok, Ser::Error> {
        ser.serialize_str(&value.to_fraction_string())
    }

    pub fn deserialize<'de, S: Scalar, De: Deserializer<'de>>(de: De) -> Result<S, De::Error> {
        let text = String::deserialize(de)?;
        S::parse_fraction(&text).map_err(De::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn fraction_strings_are_lowest_terms() {
        let x = Rational::from_ratio(152, 50);
        assert_eq!(x.to_fraction_string(), "76/25");
        assert_eq!(Rational::from_int(-8).to_fraction_string(), "-8/1");
        assert_eq!(Rational::parse_fraction("6/-4").unwrap(), Rational::from_ratio(-3, 2));
        assert_eq!(Rational::parse_fraction(" 12 ").unwrap(), Rational::from_int(12));
    }

    #[test]
    fn malformed_fractions_are_rejected() {
        assert!(matches!(
            Rational::parse_fraction("3/0"),
            Err(FractionParseError::ZeroDenominator(_))
        ));
        assert!(matches!(Rational::parse_fraction(""), Err(FractionParseError::Empty)));
        assert!(Rational::parse_fraction("1.5").is_err());
        assert!(Rational::parse_fraction("1/2/3").is_err());
        assert!(Rational::parse_fraction("--1").is_err());
    }

    #[test]
    fn ceiling() {
        assert_eq!(Rational::from_ratio(81, 2).ceil_i64(), Some(41));
        assert_eq!(Rational::from_ratio(-1, 2).ceil_i64(), Some(0));
        assert_eq!(Rational::from_int(7).ceil_i64(), Some(7));
    }

    #[test]
    fn machine_width_ratios_are_scalars() {
        let x = Ratio::<i64>::parse_fraction("-10/4").unwrap();
        assert_eq!(x.to_fraction_string(), "-5/2");
        assert_eq!(Ratio::<i64>::power_of(3, 4), Ratio::from_integer(81));
    }
}
