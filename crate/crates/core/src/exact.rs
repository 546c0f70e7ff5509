//! Exact rational views of decimal inputs.
//!
//! A float such as `1.2` is interpreted as the decimal it was written as
//! (`6/5`), recovered from its shortest round-trip representation, so that
//! boundary equalities like `α + β = 2` hold exactly for `(1.2, 0.8)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{GlvError, Result};

pub type Rational = BigRational;

/// Parse a decimal literal (`-1.25`, `3`, `2.5e-3`) exactly.
pub fn parse_decimal(text: &str) -> Result<Rational> {
    let bad = || GlvError::invalid(format!("not a decimal number: {text:?}"));
    let s = text.trim();
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: BigInt = all.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Ok(if shift >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, shift as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-shift) as usize))
    })
}

/// The decimal a finite float was most plausibly written as.
pub fn from_f64(v: f64) -> Result<Rational> {
    if !v.is_finite() {
        return Err(GlvError::invalid(format!("non-finite value {v}")));
    }
    parse_decimal(&format!("{v:e}"))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

pub fn one() -> Rational {
    Rational::one()
}
