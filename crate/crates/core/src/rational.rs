//! Exact rational scalars and the extended line with `+inf`.
//!
//! Every quantity that feeds a verdict is a [`Rational`]; floating point is
//! never used. Weights live on the extended line [`ExtRational`], where
//! `Infinite` encodes a missing arc and is propagated symbolically.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

/// Shorthand for small rational constants in construction code and tests.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn rat_int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("empty rational token")]
    Empty,
    #[error("invalid rational token `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `p` or `p/q` with optional leading sign.
pub fn parse_rational(token: &str) -> Result<Rational, RationalParseError> {
    let token = token.trim();
    if token.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let invalid = || RationalParseError::Invalid(token.to_string());
    match token.split_once('/') {
        None => {
            let p = BigInt::from_str(token).map_err(|_| invalid())?;
            Ok(Rational::from_integer(p))
        }
        Some((num, den)) => {
            let p = BigInt::from_str(num.trim()).map_err(|_| invalid())?;
            let q = BigInt::from_str(den.trim()).map_err(|_| invalid())?;
            if q.is_zero() {
                return Err(RationalParseError::ZeroDenominator(token.to_string()));
            }
            Ok(Rational::new(p, q))
        }
    }
}

/// Canonical text form: `p` when the reduced denominator is 1, else `p/q`.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// A rational extended with `+inf`; there is no `-inf` on this line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExtRational {
    Finite(Rational),
    Infinite,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtRational::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(r) => Some(r),
            ExtRational::Infinite => None,
        }
    }

    /// Addition saturating at `+inf`.
    pub fn add(&self, other: &ExtRational) -> ExtRational {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinite,
        }
    }

    /// Parses `inf`, `p`, or `p/q`.
    pub fn parse(token: &str) -> Result<Self, RationalParseError> {
        let token = token.trim();
        if token.eq_ignore_ascii_case("inf") {
            Ok(ExtRational::Infinite)
        } else {
            parse_rational(token).map(ExtRational::Finite)
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(r) => write!(f, "{}", format_rational(r)),
            ExtRational::Infinite => write!(f, "inf"),
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
            (ExtRational::Finite(_), ExtRational::Infinite) => Ordering::Less,
            (ExtRational::Infinite, ExtRational::Finite(_)) => Ordering::Greater,
            (ExtRational::Infinite, ExtRational::Infinite) => Ordering::Equal,
        }
    }
}

impl From<Rational> for ExtRational {
    fn from(value: Rational) -> Self {
        ExtRational::Finite(value)
    }
}

/// Exact decimal expansion when the reduced denominator divides a power of
/// ten, i.e. has no prime factors besides 2 and 5.
pub fn exact_decimal(value: &Rational) -> Option<String> {
    let mut q = value.denom().abs();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0u32;
    let mut fives = 0u32;
    while (&q % &two).is_zero() {
        q /= &two;
        twos += 1;
    }
    while (&q % &five).is_zero() {
        q /= &five;
        fives += 1;
    }
    if !q.is_one() {
        return None;
    }
    let shift = twos.max(fives);
    // value = p / (2^a 5^b) = p * 2^(s-a) 5^(s-b) / 10^s
    let mut scaled = value.numer().abs();
    scaled *= two.pow(shift - twos);
    scaled *= five.pow(shift - fives);
    let digits = scaled.to_string();
    let sign = if value.is_negative() { "-" } else { "" };
    if shift == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let s = shift as usize;
    let text = if digits.len() <= s {
        format!("0.{}{}", "0".repeat(s - digits.len()), digits)
    } else {
        let (int_part, frac_part) = digits.split_at(digits.len() - s);
        format!("{int_part}.{frac_part}")
    };
    // trim trailing zeros of the fractional part but keep at least one digit
    let trimmed = text.trim_end_matches('0').trim_end_matches('.');
    Some(format!("{sign}{trimmed}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert_eq!(parse_rational("-3/6").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational(" 10/4 ").unwrap(), rat(5, 2));
        assert!(matches!(
            parse_rational("1/0"),
            Err(RationalParseError::ZeroDenominator(_))
        ));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn canonical_formatting() {
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(-1, 3)), "-1/3");
        assert_eq!(format_rational(&rat(2, -4)), "-1/2");
    }

    #[test]
    fn extended_ordering_and_addition() {
        let inf = ExtRational::Infinite;
        let one = ExtRational::Finite(rat_int(1));
        assert!(one < inf);
        assert_eq!(one.add(&inf), ExtRational::Infinite);
        assert_eq!(
            one.add(&ExtRational::Finite(rat(1, 2))),
            ExtRational::Finite(rat(3, 2))
        );
        assert_eq!(ExtRational::parse("inf").unwrap(), ExtRational::Infinite);
        assert_eq!(ExtRational::parse("-2").unwrap(), ExtRational::Finite(rat_int(-2)));
    }

    #[test]
    fn exact_decimals() {
        assert_eq!(exact_decimal(&rat(1, 2)).unwrap(), "0.5");
        assert_eq!(exact_decimal(&rat(-3, 8)).unwrap(), "-0.375");
        assert_eq!(exact_decimal(&rat(7, 1)).unwrap(), "7");
        assert_eq!(exact_decimal(&rat(1, 20)).unwrap(), "0.05");
        assert_eq!(exact_decimal(&rat(1, 3)), None);
        assert_eq!(exact_decimal(&rat(0, 5)).unwrap(), "0");
    }
}
