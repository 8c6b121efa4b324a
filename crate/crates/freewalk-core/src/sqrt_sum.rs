//! Exact arithmetic in the ring `ℚ + ℚ·√m` where `m = 2d − 1` for a free
//! group of rank `d`.
//!
//! Quantities of the form `Σ c_j · m^{j/2}` (half-integer powers of `m`) fold
//! into this ring: even exponents land in the rational part, odd exponents in
//! the `√m` part, after shifting whole powers of `m` into the coefficient.
//! Comparisons are exact — no floating point is consulted.

use alloc::collections::BTreeMap;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{Rational, format_rational, pow_int, rat_int, rational_to_f64};

/// An exact value `rational_part + root_part · √(2d − 1)`.
///
/// Equality (`PartialEq`) compares representations. For every rank where
/// `2d − 1` is not a perfect square the representation is unique, so this is
/// also value equality; [`SqrtPowerSum::cmp_value`] compares values exactly in
/// all cases.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SqrtPowerSum {
    rank: u8,
    rational_part: Rational,
    root_part: Rational,
}

impl SqrtPowerSum {
    /// The zero value.
    pub fn zero(rank: u8) -> Self {
        SqrtPowerSum {
            rank,
            rational_part: Rational::zero(),
            root_part: Rational::zero(),
        }
    }

    /// A purely rational value.
    pub fn from_rational(rank: u8, value: Rational) -> Self {
        SqrtPowerSum {
            rank,
            rational_part: value,
            root_part: Rational::zero(),
        }
    }

    /// `coeff · m^{half_exponent / 2}` with `m = 2d − 1`, folded to canonical
    /// form: `m^{j/2} = m^{⌊j/2⌋} · √m^{j mod 2}`.
    pub fn from_half_power(rank: u8, half_exponent: i64, coeff: Rational) -> Self {
        let m = radicand(rank);
        let whole = pow_int(&rat_int(m), half_exponent.div_euclid(2));
        let scaled = coeff * whole;
        if half_exponent.rem_euclid(2) == 0 {
            SqrtPowerSum {
                rank,
                rational_part: scaled,
                root_part: Rational::zero(),
            }
        } else {
            SqrtPowerSum {
                rank,
                rational_part: Rational::zero(),
                root_part: scaled,
            }
        }
    }

    /// The rank `d` of the underlying free group.
    pub fn rank(&self) -> u8 {
        self.rank
    }

    /// The coefficient of `m^0 = 1`.
    pub fn rational_part(&self) -> &Rational {
        &self.rational_part
    }

    /// The coefficient of `√m`.
    pub fn root_part(&self) -> &Rational {
        &self.root_part
    }

    /// Nonzero coefficients keyed by half-power (`0` for the rational part,
    /// `1` for the `√m` part).
    pub fn coeffs(&self) -> BTreeMap<i64, Rational> {
        let mut out = BTreeMap::new();
        if !self.rational_part.is_zero() {
            out.insert(0, self.rational_part.clone());
        }
        if !self.root_part.is_zero() {
            out.insert(1, self.root_part.clone());
        }
        out
    }

    /// Whether the representation is zero.
    pub fn is_zero(&self) -> bool {
        self.rational_part.is_zero() && self.root_part.is_zero()
    }

    pub fn add(&self, other: &SqrtPowerSum) -> SqrtPowerSum {
        assert_eq!(self.rank, other.rank, "rank mismatch in √-sum addition");
        SqrtPowerSum {
            rank: self.rank,
            rational_part: &self.rational_part + &other.rational_part,
            root_part: &self.root_part + &other.root_part,
        }
    }

    pub fn sub(&self, other: &SqrtPowerSum) -> SqrtPowerSum {
        assert_eq!(self.rank, other.rank, "rank mismatch in √-sum subtraction");
        SqrtPowerSum {
            rank: self.rank,
            rational_part: &self.rational_part - &other.rational_part,
            root_part: &self.root_part - &other.root_part,
        }
    }

    pub fn scale(&self, factor: &Rational) -> SqrtPowerSum {
        SqrtPowerSum {
            rank: self.rank,
            rational_part: &self.rational_part * factor,
            root_part: &self.root_part * factor,
        }
    }

    /// Exact value comparison (the sign of the difference `A + B·√m` is
    /// decided by comparing `A²` against `B²·m` with the sign pattern of `A`
    /// and `B`).
    pub fn cmp_value(&self, other: &SqrtPowerSum) -> Ordering {
        assert_eq!(self.rank, other.rank, "rank mismatch in √-sum comparison");
        let diff = self.sub(other);
        sign(&diff.rational_part, &diff.root_part, radicand(self.rank))
    }

    /// Approximate numeric value, for reporting only.
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.rational_part)
            + rational_to_f64(&self.root_part) * libm::sqrt(radicand(self.rank) as f64)
    }
}

impl fmt::Display for SqrtPowerSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = radicand(self.rank);
        match (self.rational_part.is_zero(), self.root_part.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", format_rational(&self.rational_part)),
            (true, false) => {
                write!(f, "{}*sqrt({m})", format_rational(&self.root_part))
            }
            (false, false) => write!(
                f,
                "{} + {}*sqrt({m})",
                format_rational(&self.rational_part),
                format_rational(&self.root_part)
            ),
        }
    }
}

fn radicand(rank: u8) -> i64 {
    2 * i64::from(rank) - 1
}

/// Sign of `a + b·√m` for `m > 0`.
fn sign(a: &Rational, b: &Rational, m: i64) -> Ordering {
    let sa = a.is_positive() as i8 - a.is_negative() as i8;
    let sb = b.is_positive() as i8 - b.is_negative() as i8;
    match (sa, sb) {
        (0, 0) => Ordering::Equal,
        (_, 0) => a.cmp(&Rational::zero()),
        (0, _) => b.cmp(&Rational::zero()),
        (1, 1) => Ordering::Greater,
        (-1, -1) => Ordering::Less,
        // Opposite signs: |a| vs |b|√m decides, i.e. a² vs b²·m.
        _ => {
            let lhs = a * a;
            let rhs = b * b * rat_int(m);
            if sa > 0 { lhs.cmp(&rhs) } else { rhs.cmp(&lhs) }
        }
    }
}
