//! Arbitrary-precision rational scalars and their canonical text form.
//!
//! Every probability, Green value and identity check in this crate runs on
//! [`Rational`]; floats appear only as convenience renderings.

use alloc::string::String;
use core::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Pow, ToPrimitive, Zero};

/// Exact rational scalar (`BigInt` numerator and denominator).
pub type Rational = num_rational::BigRational;

/// `n` as an exact rational.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `base^e` for a (possibly negative) integer exponent.
///
/// Panics if `base` is zero and `e < 0`.
pub fn pow_int(base: &Rational, e: i64) -> Rational {
    if e >= 0 {
        let exp = u32::try_from(e).expect("exponent fits in u32");
        Rational::new(Pow::pow(base.numer(), exp), Pow::pow(base.denom(), exp))
    } else {
        assert!(!base.is_zero(), "zero base with negative exponent");
        let exp = u32::try_from(e.unsigned_abs()).expect("exponent fits in u32");
        Rational::new(Pow::pow(base.denom(), exp), Pow::pow(base.numer(), exp))
    }
}

/// Canonical `"p/q"` rendering; the denominator is always present and positive.
pub fn format_rational(x: &Rational) -> String {
    let mut s = String::new();
    let _ = write!(s, "{}/{}", x.numer(), x.denom());
    s
}

/// Nearest-double rendering for convenience columns; exact values should use
/// [`format_rational`].
pub fn rational_to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Error from [`parse_rational`].
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum RationalParseError {
    /// Not of the form `p` or `p/q` with integer parts.
    Malformed,
    /// Denominator was zero.
    ZeroDenominator,
}

impl core::fmt::Display for RationalParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RationalParseError::Malformed => write!(f, "expected an integer or \"p/q\" fraction"),
            RationalParseError::ZeroDenominator => write!(f, "fraction has zero denominator"),
        }
    }
}

impl core::error::Error for RationalParseError {}

/// Parse `"p/q"` (or a bare integer `"p"`) into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, RationalParseError> {
    let mut parts = text.splitn(2, '/');
    let numer: BigInt = parts
        .next()
        .and_then(|p| p.trim().parse().ok())
        .ok_or(RationalParseError::Malformed)?;
    let denom: BigInt = match parts.next() {
        Some(q) => q
            .trim()
            .parse()
            .map_err(|_| RationalParseError::Malformed)?,
        None => BigInt::from(1),
    };
    if denom.is_zero() {
        return Err(RationalParseError::ZeroDenominator);
    }
    Ok(Rational::new(numer, denom))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_cover_negative_exponents() {
        let third = rat(1, 3);
        assert_eq!(pow_int(&third, 3), rat(1, 27));
        assert_eq!(pow_int(&third, -2), rat_int(9));
        assert_eq!(pow_int(&rat(-2, 5), 0), rat_int(1));
    }

    #[test]
    fn format_always_carries_denominator() {
        assert_eq!(format_rational(&rat_int(2)), "2/1");
        assert_eq!(format_rational(&rat(-4, 6)), "-2/3");
        assert_eq!(format_rational(&Rational::zero()), "0/1");
    }

    #[test]
    fn parse_roundtrips_and_rejects_garbage() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-7").unwrap(), rat_int(-7));
        assert_eq!(parse_rational("4/6").unwrap(), rat(2, 3));
        assert_eq!(
            parse_rational("1/0"),
            Err(RationalParseError::ZeroDenominator)
        );
        assert_eq!(parse_rational("x"), Err(RationalParseError::Malformed));
    }
}
