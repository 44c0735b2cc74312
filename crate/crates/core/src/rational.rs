//! Exact rational helpers shared by every engine.
//!
//! All exact quantities are [`Q`] values (arbitrary precision). The external
//! rendering is always `p/q`, integers included, plus a decimal string with
//! 12 significant digits.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(value: i64) -> Q {
    Q::from_integer(BigInt::from(value))
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, k| acc * k)
}

/// `n! / (n-k)!`, the number of ordered k-tuples of distinct items.
pub fn falling_factorial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    ((n - k + 1) as u64..=n as u64).fold(BigUint::one(), |acc, v| acc * v)
}

/// `2^-k` as an exact rational.
pub fn pow2_neg(k: u32) -> Q {
    Q::new(BigInt::one(), BigInt::one() << k as usize)
}

/// Renders `p/q`, keeping the denominator even for integers.
pub fn to_fraction(value: &Q) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Decimal rendering with 12 significant digits.
pub fn to_decimal(value: &Q) -> String {
    decimal_sig(value.to_f64().unwrap_or(f64::NAN), 12)
}

pub fn decimal_sig(x: f64, digits: i32) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits - 1 - magnitude).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// Parses `p/q` or a bare integer.
pub fn parse_fraction(text: &str) -> Result<Q> {
    let text = text.trim();
    let bad = || Error::InvalidArgument(format!("not a rational: '{text}'"));
    let (num, den) = match text.split_once('/') {
        Some((p, d)) => (p.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(num, den))
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.247` exactly.
pub fn parse_rational(text: &str) -> Result<Q> {
    let trimmed = text.trim();
    if let Some((int_part, frac_part)) = trimmed.split_once('.') {
        let bad = || Error::InvalidArgument(format!("not a rational: '{trimmed}'"));
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int_part.starts_with('-');
        let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
        let mut num: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        return Ok(Q::new(num, den));
    }
    parse_fraction(trimmed)
}

/// Exact rational from a finite float (every finite `f64` is a dyadic rational).
pub fn from_f64(x: f64) -> Q {
    Q::from_float(x).unwrap_or_else(Q::zero)
}

/// First continued-fraction convergent of `x` within `tolerance`; falls back
/// to the exact dyadic value when none is found.
pub fn nearby_rational(x: f64, tolerance: f64) -> Q {
    if !x.is_finite() {
        return Q::zero();
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        (h0, h1) = (h1, a * h1 + h0);
        (k0, k1) = (k1, a * k1 + k0);
        if (x - h1 as f64 / k1 as f64).abs() <= tolerance {
            return Q::new(h1.into(), k1.into());
        }
        let frac = rest - a as f64;
        if frac == 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    from_f64(x)
}

pub fn to_f64(value: &Q) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn is_probability(value: &Q) -> bool {
    !value.is_negative() && *value <= Q::one()
}

/// Serde adapter writing a rational as its `p/q` string.
pub mod fraction_string {
    use super::{parse_fraction, to_fraction, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(value: &Q, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&to_fraction(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Q, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_fraction(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a sequence of rationals as `p/q` strings.
pub mod fraction_strings {
    use super::{parse_fraction, to_fraction, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(values: &[Q], serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(values.iter().map(to_fraction))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Vec<Q>, D::Error> {
        let texts = Vec::<String>::deserialize(deserializer)?;
        texts
            .iter()
            .map(|t| parse_fraction(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearby_rationals() {
        assert_eq!(nearby_rational(0.5 + 1e-15, 1e-12), q(1, 2));
        assert_eq!(nearby_rational(1.0 / 3.0, 1e-12), q(1, 3));
        assert_eq!(nearby_rational(0.0, 1e-12), qi(0));
        assert_eq!(nearby_rational(2.25, 1e-12), q(9, 4));
        assert_eq!(to_f64(&nearby_rational(0.123456789, 0.0)), 0.123456789);
    }

    #[test]
    fn fraction_rendering_keeps_denominator() {
        assert_eq!(to_fraction(&q(5, 2)), "5/2");
        assert_eq!(to_fraction(&qi(3)), "3/1");
        assert_eq!(to_fraction(&q(-6, 4)), "-3/2");
    }

    #[test]
    fn decimal_has_twelve_significant_digits() {
        assert_eq!(to_decimal(&q(5, 2)), "2.50000000000");
        assert_eq!(to_decimal(&q(1, 3)), "0.333333333333");
        assert_eq!(to_decimal(&Q::zero()), "0");
        assert_eq!(to_decimal(&qi(1234)), "1234.00000000");
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_fraction("9/24").unwrap(), q(3, 8));
        assert_eq!(parse_fraction(" 7 ").unwrap(), qi(7));
        assert!(parse_fraction("1/0").is_err());
        assert!(parse_fraction("x/2").is_err());
        assert_eq!(parse_rational("0.25").unwrap(), q(1, 4));
        assert_eq!(parse_rational("0.24749").unwrap(), q(24749, 100000));
        assert_eq!(parse_rational("1/4").unwrap(), q(1, 4));
        assert!(parse_rational("0.").is_err());
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(8), BigUint::from(40320u32));
        assert_eq!(falling_factorial(5, 2), BigUint::from(20u32));
        assert_eq!(falling_factorial(3, 4), BigUint::zero());
        assert_eq!(pow2_neg(3), q(1, 8));
    }
}
