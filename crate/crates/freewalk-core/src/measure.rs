//! Finitely supported nonnegative measures on a free group, their
//! convolutions and convolution powers, and left convolution of a measure
//! against a (possibly partial) rational-valued function on the group.
//!
//! All arithmetic is exact. Convolution powers are the workhorse of the rest
//! of the crate, so [`PowerTable`] memoizes them; [`windowed_power`] computes
//! the exact restriction of a power to a ball without materializing the full
//! support, by pruning intermediate points that cannot re-enter the window in
//! the remaining steps.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::rational::{Rational, pow_int, rat};
use crate::word::{ReducedWord, check_rank};

/// Cap on `|supp μ| · |supp ν|` for a single convolution; exceeding it means
/// the requested computation would not finish at desk scale.
pub(crate) const CONVOLUTION_BUDGET: u128 = 50_000_000;

/// Errors from measure construction and convolution.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MeasureError {
    /// A measure entry had negative mass.
    NegativeMass { point: ReducedWord },
    /// Two operands were built over different ranks.
    RankMismatch { left: u8, right: u8 },
    /// A partial function was not defined at a point the convolution needs.
    NotEvaluable { point: ReducedWord },
    /// The computation would exceed the convolution work budget.
    Budget { pairs: u128 },
    /// Underlying word problem.
    Word(crate::word::WordError),
}

impl fmt::Display for MeasureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureError::NegativeMass { point } => {
                write!(f, "negative mass at {point}")
            }
            MeasureError::RankMismatch { left, right } => {
                write!(f, "rank mismatch: {left} vs {right}")
            }
            MeasureError::NotEvaluable { point } => {
                write!(f, "function not evaluable at {point}")
            }
            MeasureError::Budget { pairs } => {
                write!(f, "convolution budget exceeded ({pairs} support pairs)")
            }
            MeasureError::Word(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MeasureError {}

impl From<crate::word::WordError> for MeasureError {
    fn from(e: crate::word::WordError) -> Self {
        MeasureError::Word(e)
    }
}

/// A finitely supported measure with nonnegative rational masses.
///
/// Zero-mass points are never stored, so equality of measures is equality of
/// the stored maps.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinMeasure {
    rank: u8,
    entries: BTreeMap<ReducedWord, Rational>,
}

impl FinMeasure {
    /// The zero measure.
    pub fn zero(rank: u8) -> Self {
        check_rank(rank).expect("valid rank");
        FinMeasure {
            rank,
            entries: BTreeMap::new(),
        }
    }

    /// Unit point mass at `point`.
    pub fn delta(rank: u8, point: ReducedWord) -> Self {
        assert_eq!(rank, point.rank(), "rank mismatch in point mass");
        let mut entries = BTreeMap::new();
        entries.insert(point, rat(1, 1));
        FinMeasure { rank, entries }
    }

    /// Uniform probability on the `2d` generators and inverse generators.
    pub fn uniform_generators(rank: u8) -> Result<Self, MeasureError> {
        check_rank(rank)?;
        let mass = rat(1, 2 * i64::from(rank));
        let entries = crate::word::sphere(rank, 1)?
            .into_iter()
            .map(|g| (g, mass.clone()))
            .collect();
        Ok(FinMeasure { rank, entries })
    }

    /// Build from `(point, mass)` pairs, accumulating duplicates and dropping
    /// zero totals. Any negative entry is rejected.
    pub fn from_entries<I>(rank: u8, pairs: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (ReducedWord, Rational)>,
    {
        check_rank(rank)?;
        let mut entries: BTreeMap<ReducedWord, Rational> = BTreeMap::new();
        for (point, mass) in pairs {
            if point.rank() != rank {
                return Err(MeasureError::RankMismatch {
                    left: rank,
                    right: point.rank(),
                });
            }
            if mass.is_negative() {
                return Err(MeasureError::NegativeMass { point });
            }
            *entries.entry(point).or_insert_with(Rational::zero) += mass;
        }
        entries.retain(|_, v| !v.is_zero());
        Ok(FinMeasure { rank, entries })
    }

    /// The rank `d` of the underlying free group.
    pub fn rank(&self) -> u8 {
        self.rank
    }

    /// Mass at a single point (zero off the support).
    pub fn mass(&self, point: &ReducedWord) -> Rational {
        self.entries
            .get(point)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Total mass.
    pub fn total_mass(&self) -> Rational {
        let mut acc = Rational::zero();
        for v in self.entries.values() {
            acc += v;
        }
        acc
    }

    /// Whether the total mass is exactly 1.
    pub fn is_probability(&self) -> bool {
        self.total_mass() == rat(1, 1)
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Whether the measure is identically zero.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The support, in shortlex order.
    pub fn support(&self) -> impl Iterator<Item = &ReducedWord> {
        self.entries.keys()
    }

    /// `(point, mass)` pairs in shortlex order.
    pub fn iter(&self) -> impl Iterator<Item = (&ReducedWord, &Rational)> {
        self.entries.iter()
    }

    /// Σ over the given points of their masses.
    pub fn mass_of_set<'a, I>(&self, points: I) -> Rational
    where
        I: IntoIterator<Item = &'a ReducedWord>,
    {
        let mut acc = Rational::zero();
        for p in points {
            if let Some(v) = self.entries.get(p) {
                acc += v;
            }
        }
        acc
    }

    /// The restriction to the closed ball of the given radius.
    pub fn restricted(&self, radius: usize) -> FinMeasure {
        let entries = self
            .entries
            .iter()
            .filter(|(g, _)| g.len() <= radius)
            .map(|(g, v)| (g.clone(), v.clone()))
            .collect();
        FinMeasure {
            rank: self.rank,
            entries,
        }
    }

    /// Longest word length in the support (0 for the zero measure).
    pub fn support_radius(&self) -> usize {
        self.entries.keys().map(ReducedWord::len).max().unwrap_or(0)
    }

    /// Convolution `(self ∗ other)(g) = Σ_h self(h) · other(h⁻¹ g)`.
    pub fn convolve(&self, other: &FinMeasure) -> Result<FinMeasure, MeasureError> {
        if self.rank != other.rank {
            return Err(MeasureError::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        let pairs = self.entries.len() as u128 * other.entries.len() as u128;
        if pairs > CONVOLUTION_BUDGET {
            return Err(MeasureError::Budget { pairs });
        }
        let mut acc: BTreeMap<ReducedWord, Rational> = BTreeMap::new();
        for (h, mh) in &self.entries {
            for (x, nx) in &other.entries {
                let term = mh * nx;
                *acc.entry(h.mul(x)).or_insert_with(Rational::zero) += term;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(FinMeasure {
            rank: self.rank,
            entries: acc,
        })
    }

    pub(crate) fn retain_within(&mut self, radius: usize) {
        self.entries.retain(|g, _| g.len() <= radius);
    }
}

/// Whether `mu` is exactly the uniform probability on the `2d` one-letter
/// words — the case with a radial fast path.
pub(crate) fn is_uniform_step(mu: &FinMeasure) -> bool {
    match FinMeasure::uniform_generators(mu.rank()) {
        Ok(uniform) => *mu == uniform,
        Err(_) => false,
    }
}

/// Memoized convolution powers of a fixed base measure; `power(0)` is the
/// point mass at the identity.
pub struct PowerTable {
    base: FinMeasure,
    powers: Vec<FinMeasure>,
}

impl PowerTable {
    pub fn new(base: FinMeasure) -> Self {
        let identity = FinMeasure::delta(base.rank(), ReducedWord::identity(base.rank()));
        PowerTable {
            base,
            powers: vec![identity],
        }
    }

    pub fn base(&self) -> &FinMeasure {
        &self.base
    }

    /// The `n`-fold convolution power, computing and caching as needed.
    pub fn power(&mut self, n: u32) -> Result<&FinMeasure, MeasureError> {
        while self.powers.len() <= n as usize {
            let next = self
                .powers
                .last()
                .expect("table starts nonempty")
                .convolve(&self.base)?;
            self.powers.push(next);
        }
        Ok(&self.powers[n as usize])
    }
}

/// One convolution power without a table; prefer [`PowerTable`] when several
/// powers of the same base are needed.
pub fn power(mu: &FinMeasure, n: u32) -> Result<FinMeasure, MeasureError> {
    let mut table = PowerTable::new(mu.clone());
    table.power(n).cloned()
}

/// An exact restriction of a convolution power to a ball, with a flag
/// recording whether anything was cut off.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WindowedPower {
    /// The power restricted to the window ball.
    pub measure: FinMeasure,
    /// True when mass fell outside the window (the restriction is proper).
    pub truncated: bool,
}

/// The exact restriction of `μ^{∗n}` to the ball of radius `window_radius`.
///
/// Intermediate supports are pruned: after `t` of `n` steps, a point at
/// distance greater than `(n − t)·s + window_radius` (with `s` the support
/// radius of `μ`) cannot reach the window in the remaining steps, so dropping
/// it changes nothing inside the window. The result equals
/// `power(μ, n).restricted(window_radius)` but stays feasible for large `n`.
pub fn windowed_power(
    mu: &FinMeasure,
    n: u32,
    window_radius: usize,
) -> Result<WindowedPower, MeasureError> {
    let step = mu.support_radius();
    let mut current = FinMeasure::delta(mu.rank(), ReducedWord::identity(mu.rank()));
    for t in 1..=n {
        current = current.convolve(mu)?;
        let keep = (n - t) as usize * step + window_radius;
        current.retain_within(keep);
    }
    let full_mass = if n == 0 {
        rat(1, 1)
    } else {
        pow_int(&mu.total_mass(), i64::from(n))
    };
    let truncated = current.total_mass() != full_mass;
    Ok(WindowedPower {
        measure: current,
        truncated,
    })
}

/// A rational-valued, possibly partial, function on the group.
pub trait GroupFunction {
    /// The rank `d` of the underlying free group.
    fn rank(&self) -> u8;
    /// The value at `g`, or `None` where the function is not defined.
    fn value(&self, g: &ReducedWord) -> Option<Rational>;
}

impl GroupFunction for FinMeasure {
    fn rank(&self) -> u8 {
        self.rank
    }

    fn value(&self, g: &ReducedWord) -> Option<Rational> {
        Some(self.mass(g))
    }
}

/// A function given by a finite table, undefined outside it. Values may have
/// either sign, and explicit zeros are kept.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WindowFn {
    rank: u8,
    values: BTreeMap<ReducedWord, Rational>,
}

impl WindowFn {
    pub fn new(rank: u8, values: BTreeMap<ReducedWord, Rational>) -> Self {
        for g in values.keys() {
            assert_eq!(g.rank(), rank, "rank mismatch in function table");
        }
        WindowFn { rank, values }
    }

    pub fn insert(&mut self, point: ReducedWord, value: Rational) {
        assert_eq!(point.rank(), self.rank, "rank mismatch in function table");
        self.values.insert(point, value);
    }
}

impl GroupFunction for WindowFn {
    fn rank(&self) -> u8 {
        self.rank
    }

    fn value(&self, g: &ReducedWord) -> Option<Rational> {
        self.values.get(g).cloned()
    }
}

/// The indicator function of a finite set (total: zero off the set).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Indicator {
    rank: u8,
    points: BTreeSet<ReducedWord>,
}

impl Indicator {
    pub fn new(rank: u8, points: BTreeSet<ReducedWord>) -> Self {
        for g in &points {
            assert_eq!(g.rank(), rank, "rank mismatch in indicator set");
        }
        Indicator { rank, points }
    }
}

impl GroupFunction for Indicator {
    fn rank(&self) -> u8 {
        self.rank
    }

    fn value(&self, g: &ReducedWord) -> Option<Rational> {
        Some(if self.points.contains(g) {
            rat(1, 1)
        } else {
            Rational::zero()
        })
    }
}

/// The constant function.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConstantFn {
    rank: u8,
    value: Rational,
}

impl ConstantFn {
    pub fn new(rank: u8, value: Rational) -> Self {
        ConstantFn { rank, value }
    }
}

impl GroupFunction for ConstantFn {
    fn rank(&self) -> u8 {
        self.rank
    }

    fn value(&self, _g: &ReducedWord) -> Option<Rational> {
        Some(self.value.clone())
    }
}

/// `[μ ∗ f](g) = Σ_h μ(h) · f(h⁻¹ g)`, failing if `f` is undefined at some
/// needed point.
pub fn left_convolve(
    mu: &FinMeasure,
    f: &dyn GroupFunction,
    g: &ReducedWord,
) -> Result<Rational, MeasureError> {
    if mu.rank() != f.rank() {
        return Err(MeasureError::RankMismatch {
            left: mu.rank(),
            right: f.rank(),
        });
    }
    let mut acc = Rational::zero();
    for (h, mh) in mu.iter() {
        let point = h.inv().mul(g);
        match f.value(&point) {
            Some(v) => acc += mh * &v,
            None => return Err(MeasureError::NotEvaluable { point }),
        }
    }
    Ok(acc)
}

/// `max over the window of |[μ ∗ f](g) − f(g)|` — zero exactly when `f` is
/// μ-harmonic on the window. An empty window yields zero.
pub fn harmonicity_defect<'a, I>(
    mu: &FinMeasure,
    f: &dyn GroupFunction,
    window: I,
) -> Result<Rational, MeasureError>
where
    I: IntoIterator<Item = &'a ReducedWord>,
{
    let mut worst = Rational::zero();
    for g in window {
        let through = left_convolve(mu, f, g)?;
        let at = match f.value(g) {
            Some(v) => v,
            None => return Err(MeasureError::NotEvaluable { point: g.clone() }),
        };
        let defect = (through - at).abs();
        if defect > worst {
            worst = defect;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{ball, sphere};

    fn w(text: &str) -> ReducedWord {
        ReducedWord::parse(2, text).unwrap()
    }

    fn uniform2() -> FinMeasure {
        FinMeasure::uniform_generators(2).unwrap()
    }

    #[test]
    fn uniform_generators_is_a_probability_on_the_sphere() {
        let mu = uniform2();
        assert_eq!(mu.len(), 4);
        assert!(mu.is_probability());
        assert_eq!(mu.mass(&w("a")), rat(1, 4));
        assert_eq!(mu.mass(&w("B")), rat(1, 4));
        assert_eq!(mu.mass(&w("e")), rat(0, 1));
        assert_eq!(mu.mass_of_set(sphere(2, 1).unwrap().iter()), rat(1, 1));
    }

    #[test]
    fn from_entries_accumulates_and_rejects_negatives() {
        let m = FinMeasure::from_entries(
            2,
            [
                (w("a"), rat(1, 3)),
                (w("a"), rat(1, 6)),
                (w("b"), rat(0, 1)),
            ],
        )
        .unwrap();
        assert_eq!(m.mass(&w("a")), rat(1, 2));
        assert_eq!(m.len(), 1, "zero entries must be dropped");
        assert_eq!(
            FinMeasure::from_entries(2, [(w("a"), rat(-1, 2))]),
            Err(MeasureError::NegativeMass { point: w("a") })
        );
    }

    #[test]
    fn convolution_squares_the_uniform_step() {
        let mu = uniform2();
        let two = mu.convolve(&mu).unwrap();
        // Return probability: 4 ways back over 16 equally likely pairs.
        assert_eq!(two.mass(&w("e")), rat(1, 4));
        assert_eq!(two.mass(&w("ab")), rat(1, 16));
        assert_eq!(two.mass(&w("aa")), rat(1, 16));
        assert_eq!(two.mass(&w("a")), rat(0, 1));
        assert_eq!(two.len(), 13, "support is the even ball: 12 + identity");
        assert!(two.is_probability());
    }

    #[test]
    fn delta_is_the_convolution_identity() {
        let mu = uniform2();
        let e = FinMeasure::delta(2, w("e"));
        assert_eq!(mu.convolve(&e).unwrap(), mu);
        assert_eq!(e.convolve(&mu).unwrap(), mu);
        // Left translation by a point mass shifts the support.
        let shifted = FinMeasure::delta(2, w("a")).convolve(&mu).unwrap();
        assert_eq!(shifted.mass(&w("aa")), rat(1, 4));
        assert_eq!(shifted.mass(&w("e")), rat(1, 4));
    }

    #[test]
    fn powers_alternate_parity_and_keep_mass_one() {
        let mut table = PowerTable::new(uniform2());
        assert_eq!(table.power(0).unwrap().mass(&w("e")), rat(1, 1));
        assert_eq!(table.power(2).unwrap().mass(&w("e")), rat(1, 4));
        assert_eq!(table.power(3).unwrap().mass(&w("e")), rat(0, 1));
        // Three-step paths to a: first step a (then return mass 1/4), or any
        // of the three other letters followed by the unique two-letter path
        // back out: 1/4·(1/4 + 3·1/16) = 7/64.
        assert_eq!(table.power(3).unwrap().mass(&w("a")), rat(7, 64));
        for n in 0..=6 {
            assert!(
                table.power(n).unwrap().is_probability(),
                "mass must stay 1 at n={n}"
            );
        }
    }

    #[test]
    fn windowed_power_matches_the_restricted_full_power() {
        let mu = uniform2();
        for n in 0..=7u32 {
            for radius in 0..=3usize {
                let windowed = windowed_power(&mu, n, radius).unwrap();
                let full = power(&mu, n).unwrap();
                assert_eq!(
                    windowed.measure,
                    full.restricted(radius),
                    "n={n} W={radius}"
                );
                let expect_cut = full.support_radius() > radius;
                assert_eq!(windowed.truncated, expect_cut, "n={n} W={radius}");
            }
        }
        assert!(!windowed_power(&mu, 4, 10).unwrap().truncated);
    }

    #[test]
    fn left_convolution_against_simple_functions() {
        let mu = uniform2();
        // Indicator of {e}: averaging over one step leaves e with value 0.
        let ind = Indicator::new(2, [w("e")].into_iter().collect());
        assert_eq!(left_convolve(&mu, &ind, &w("e")).unwrap(), rat(0, 1));
        assert_eq!(left_convolve(&mu, &ind, &w("a")).unwrap(), rat(1, 4));
        assert_eq!(
            harmonicity_defect(&mu, &ind, [w("e")].iter()).unwrap(),
            rat(1, 1)
        );
        // Constants are harmonic for any probability step.
        let c = ConstantFn::new(2, rat(7, 3));
        assert_eq!(
            harmonicity_defect(&mu, &c, ball(2, 2).unwrap().iter()).unwrap(),
            rat(0, 1)
        );
        // An empty window reports zero defect.
        assert_eq!(harmonicity_defect(&mu, &c, [].iter()).unwrap(), rat(0, 1));
    }

    #[test]
    fn partial_functions_fail_loudly_outside_their_table() {
        let mu = uniform2();
        let mut f = WindowFn::new(2, BTreeMap::new());
        for g in ball(2, 1).unwrap() {
            f.insert(g, rat(1, 1));
        }
        assert!(left_convolve(&mu, &f, &w("e")).is_ok());
        // Evaluating at a needs f at a·a, outside the stored ball.
        assert_eq!(
            left_convolve(&mu, &f, &w("a")),
            Err(MeasureError::NotEvaluable { point: w("aa") })
        );
    }

    #[test]
    fn rank_mismatch_is_rejected() {
        let mu2 = uniform2();
        let mu3 = FinMeasure::uniform_generators(3).unwrap();
        assert_eq!(
            mu2.convolve(&mu3),
            Err(MeasureError::RankMismatch { left: 2, right: 3 })
        );
    }
}
