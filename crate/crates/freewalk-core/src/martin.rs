//! Boundary kernels of the uniform nearest-neighbour walk, the exit measure
//! on the space of infinite reduced words, and "lightness" bookkeeping: how
//! fast kernel values (or their square roots, in ζ-expectation) accumulate
//! over a subset of the group.
//!
//! For an eventually periodic direction `w`, the kernel is
//! `f_w(g) = (2d−1)^{e(g)}` with `e(g) = 2·lcp(g⁻¹, w) − |g|` — the limit of
//! `G(g·h)/G(h)` as `h` runs out along `w`. It is exactly harmonic for the
//! uniform step, which the tests check pointwise with no tolerance.
//!
//! The exit measure ζ gives every cylinder of reduced words with a fixed
//! prefix of length `n ≥ 1` mass `1/(2d·(2d−1)^{n−1})` — equivalently, each
//! sphere is hit uniformly. Averages of `√f` over ζ depend only on `|g|`;
//! the sphere census behind that symmetry is computed both by walking the
//! tree (per reference word) and in closed form, and the two routes are
//! pinned against each other in tests.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::rational::{Rational, pow_int, rat, rat_int};
use crate::ray::RaySpec;
use crate::sqrt_sum::SqrtPowerSum;
use crate::word::{Letter, ReducedWord, check_rank, sphere_size};

/// Cap on tree nodes a census walk may visit.
const CENSUS_BUDGET: u128 = 20_000_000;

/// Errors from kernel and boundary computations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MartinError {
    /// The computation would visit too many words.
    Budget {
        requested: u128,
    },
    RankMismatch {
        left: u8,
        right: u8,
    },
    Word(crate::word::WordError),
}

impl fmt::Display for MartinError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MartinError::Budget { requested } => {
                write!(f, "census budget exceeded ({requested} words)")
            }
            MartinError::RankMismatch { left, right } => {
                write!(f, "rank mismatch: {left} vs {right}")
            }
            MartinError::Word(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for MartinError {}

impl From<crate::word::WordError> for MartinError {
    fn from(e: crate::word::WordError) -> Self {
        MartinError::Word(e)
    }
}

/// A kernel value, kept as the exponent of `2d − 1`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct KernelValue {
    pub rank: u8,
    pub exponent: i64,
}

impl KernelValue {
    /// `(2d−1)^exponent` as an exact rational.
    pub fn rational(&self) -> Rational {
        pow_int(&rat_int(2 * i64::from(self.rank) - 1), self.exponent)
    }

    /// `(2d−1)^{exponent/2}` as an exact √-sum.
    pub fn sqrt_value(&self) -> SqrtPowerSum {
        SqrtPowerSum::from_half_power(self.rank, self.exponent, rat(1, 1))
    }
}

/// `e(g) = 2·lcp(g⁻¹, w) − |g|`.
pub fn kernel_exponent(ray: &RaySpec, g: &ReducedWord) -> i64 {
    assert_eq!(ray.rank(), g.rank(), "rank mismatch in kernel evaluation");
    2 * g.inv().lcp_with_ray(ray) as i64 - g.len() as i64
}

/// `f_w(g) = (2d−1)^{e(g)}`.
pub fn kernel_value(ray: &RaySpec, g: &ReducedWord) -> KernelValue {
    KernelValue {
        rank: ray.rank(),
        exponent: kernel_exponent(ray, g),
    }
}

/// The kernel toward a fixed direction, as a total group function.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MartinKernelFn {
    ray: RaySpec,
}

impl MartinKernelFn {
    pub fn new(ray: RaySpec) -> Self {
        MartinKernelFn { ray }
    }

    pub fn ray(&self) -> &RaySpec {
        &self.ray
    }
}

impl crate::measure::GroupFunction for MartinKernelFn {
    fn rank(&self) -> u8 {
        self.ray.rank()
    }

    fn value(&self, g: &ReducedWord) -> Option<Rational> {
        Some(kernel_value(&self.ray, g).rational())
    }
}

/// ζ-mass of the set of infinite reduced words starting with `prefix`:
/// `1` for the empty prefix, else `1/(2d·(2d−1)^{n−1})`.
pub fn hitting_cylinder(prefix: &ReducedWord) -> Rational {
    let n = prefix.len();
    if n == 0 {
        return rat(1, 1);
    }
    let d = i64::from(prefix.rank());
    rat(1, 2 * d) * pow_int(&rat_int(2 * d - 1), -(n as i64 - 1))
}

/// Draw the first `length` letters of a ζ-distributed infinite word:
/// a uniformly random non-backtracking word. Deterministic in the seed.
pub fn sample_ray(rank: u8, length: usize, seed: u64) -> Result<ReducedWord, MartinError> {
    check_rank(rank)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letter_count = u32::from(rank) * 2;
    let mut letters = Vec::with_capacity(length);
    let mut banned: Option<Letter> = None;
    for _ in 0..length {
        let picked = match banned {
            None => Letter::from_code(uniform_below(&mut rng, letter_count) as u8),
            Some(b) => {
                let mut index = uniform_below(&mut rng, letter_count - 1) as u8;
                let mut code = 0u8;
                loop {
                    if code != b.code() {
                        if index == 0 {
                            break;
                        }
                        index -= 1;
                    }
                    code += 1;
                }
                Letter::from_code(code)
            }
        };
        banned = Some(picked.inverse());
        letters.push(picked);
    }
    Ok(ReducedWord::from_reduced(rank, letters))
}

/// Rejection-sampled uniform draw from `0..n`, unbiased.
fn uniform_below(rng: &mut ChaCha8Rng, n: u32) -> u32 {
    let span = 1u64 << 32;
    let zone = span - span % u64::from(n);
    loop {
        let v = u64::from(rng.next_u32());
        if v < zone {
            return (v % u64::from(n)) as u32;
        }
    }
}

/// Count sphere words by their longest common prefix with a reference word,
/// walking the tree of reduced words.
fn lcp_census(rank: u8, radius: usize, reference: &[Letter]) -> Result<Vec<u64>, MartinError> {
    check_rank(rank)?;
    let nodes = sphere_size(rank, radius);
    if nodes > CENSUS_BUDGET {
        return Err(MartinError::Budget { requested: nodes });
    }
    let mut counts = vec![0u64; radius + 1];
    descend(rank, radius, reference, 0, None, 0, true, &mut counts);
    Ok(counts)
}

#[allow(clippy::too_many_arguments)]
fn descend(
    rank: u8,
    radius: usize,
    reference: &[Letter],
    depth: usize,
    last: Option<Letter>,
    lcp: usize,
    matching: bool,
    counts: &mut [u64],
) {
    if depth == radius {
        counts[lcp] += 1;
        return;
    }
    for code in 0..2 * rank {
        let letter = Letter::from_code(code);
        if last == Some(letter.inverse()) {
            continue;
        }
        let matches_here = matching && reference.get(depth) == Some(&letter);
        descend(
            rank,
            radius,
            reference,
            depth + 1,
            Some(letter),
            if matches_here { lcp + 1 } else { lcp },
            matches_here,
            counts,
        );
    }
}

/// The same census in closed form: of the `2d(2d−1)^{r−1}` sphere words,
/// `(2d−1)^r` share no prefix with the reference, `(2d−2)(2d−1)^{r−t−1}`
/// agree to exactly `t` letters (`1 ≤ t ≤ r−1`), and one is the reference's
/// own prefix. Independent of the reference word — that is the spherical
/// symmetry the tree walk confirms.
fn closed_census(rank: u8, radius: usize) -> Vec<Rational> {
    let m = rat_int(2 * i64::from(rank) - 1);
    if radius == 0 {
        return vec![rat(1, 1)];
    }
    let mut counts = Vec::with_capacity(radius + 1);
    counts.push(pow_int(&m, radius as i64));
    for t in 1..radius {
        counts.push(rat_int(2 * i64::from(rank) - 2) * pow_int(&m, (radius - t - 1) as i64));
    }
    counts.push(rat(1, 1));
    counts
}

fn sphere_size_rational(rank: u8, radius: usize) -> Rational {
    Rational::from_integer(BigInt::from(sphere_size(rank, radius)))
}

/// `Σ over the sphere of √f_w`, evaluated by the per-reference tree walk
/// against the ray's own prefix. By spherical symmetry the result does not
/// depend on the ray.
pub fn sphere_sqrt_sum(
    rank: u8,
    radius: usize,
    ray: &RaySpec,
) -> Result<SqrtPowerSum, MartinError> {
    if ray.rank() != rank {
        return Err(MartinError::RankMismatch {
            left: rank,
            right: ray.rank(),
        });
    }
    let reference = ray.word_prefix(radius);
    let counts = lcp_census(rank, radius, reference.letters())?;
    let mut acc = SqrtPowerSum::zero(rank);
    for (t, count) in counts.iter().enumerate() {
        let exponent = 2 * t as i64 - radius as i64;
        acc = acc.add(&SqrtPowerSum::from_half_power(
            rank,
            exponent,
            rat_int(*count as i64),
        ));
    }
    Ok(acc)
}

/// `E_ζ[√f_·(g)]` — the ζ-average over directions of `√(kernel at g)`,
/// evaluated by the per-point tree walk against `g⁻¹`. Depends only on `|g|`.
pub fn expected_sqrt_kernel(rank: u8, g: &ReducedWord) -> Result<SqrtPowerSum, MartinError> {
    if g.rank() != rank {
        return Err(MartinError::RankMismatch {
            left: rank,
            right: g.rank(),
        });
    }
    let n = g.len();
    let reference = g.inv();
    let counts = lcp_census(rank, n, reference.letters())?;
    let sphere = sphere_size_rational(rank, n);
    let mut acc = SqrtPowerSum::zero(rank);
    for (t, count) in counts.iter().enumerate() {
        let exponent = 2 * t as i64 - n as i64;
        let weight = rat_int(*count as i64) / &sphere;
        acc = acc.add(&SqrtPowerSum::from_half_power(rank, exponent, weight));
    }
    Ok(acc)
}

/// The closed-form ζ-average of `√f` on a whole sphere (what
/// [`expected_sqrt_kernel`] returns for any single point of it).
fn symmetric_expected(rank: u8, radius: usize) -> SqrtPowerSum {
    let counts = closed_census(rank, radius);
    let sphere = sphere_size_rational(rank, radius);
    let mut acc = SqrtPowerSum::zero(rank);
    for (t, count) in counts.iter().enumerate() {
        let exponent = 2 * t as i64 - radius as i64;
        acc = acc.add(&SqrtPowerSum::from_half_power(
            rank,
            exponent,
            count / &sphere,
        ));
    }
    acc
}

/// Whether the tail of an increment sequence looks summable.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Trend {
    /// The last comparisons all contract by at least 4/5.
    BoundedLooking,
    /// Some late increment fails the contraction test.
    Diverging,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trend::BoundedLooking => write!(f, "bounded-looking"),
            Trend::Diverging => write!(f, "diverging"),
        }
    }
}

/// Classify the tail of the nonzero increments: bounded-looking when the
/// last (up to three) consecutive ratios satisfy `5·next ≤ 4·prev`. Fewer
/// than two nonzero increments make no ratio, which counts as bounded.
fn classify_tail<F>(nonzero_count: usize, pair_contracts: F) -> Trend
where
    F: Fn(usize) -> bool,
{
    if nonzero_count < 2 {
        return Trend::BoundedLooking;
    }
    let comparisons = nonzero_count - 1;
    let take = comparisons.min(3);
    for i in comparisons - take..comparisons {
        if !pair_contracts(i) {
            return Trend::Diverging;
        }
    }
    Trend::BoundedLooking
}

/// One radius of a kernel-mass table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LightnessRow {
    pub radius: usize,
    /// Number of set points on this sphere.
    pub new_points: usize,
    /// Σ of kernel values over those points.
    pub increment: Rational,
    pub cumulative: Rational,
}

/// Kernel mass of a set toward one direction, accumulated sphere by sphere.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LightnessTable {
    pub ray: RaySpec,
    pub rows: Vec<LightnessRow>,
}

impl LightnessTable {
    pub fn trend(&self) -> Trend {
        let nonzero: Vec<&Rational> = self
            .rows
            .iter()
            .filter(|r| !r.increment.is_zero())
            .map(|r| &r.increment)
            .collect();
        classify_tail(nonzero.len(), |i| {
            rat_int(5) * nonzero[i + 1] <= rat_int(4) * nonzero[i]
        })
    }

    /// Total kernel mass of the set points within radius `r`.
    pub fn cumulative_at(&self, radius: usize) -> Option<&Rational> {
        self.rows.get(radius).map(|row| &row.cumulative)
    }
}

/// Tabulate `Σ_{x ∈ set, |x| = r} f_w(x)` and its partial sums for
/// `r = 0..=r_max`.
pub fn lightness_partial_sums(
    ray: &RaySpec,
    set: &BTreeSet<ReducedWord>,
    r_max: usize,
) -> LightnessTable {
    let mut increments = vec![Rational::zero(); r_max + 1];
    let mut counts = vec![0usize; r_max + 1];
    for x in set {
        assert_eq!(x.rank(), ray.rank(), "rank mismatch in kernel-mass table");
        let r = x.len();
        if r <= r_max {
            increments[r] += kernel_value(ray, x).rational();
            counts[r] += 1;
        }
    }
    let mut rows = Vec::with_capacity(r_max + 1);
    let mut cumulative = Rational::zero();
    for (radius, (increment, new_points)) in increments.into_iter().zip(counts).enumerate() {
        cumulative += &increment;
        rows.push(LightnessRow {
            radius,
            new_points,
            increment,
            cumulative: cumulative.clone(),
        });
    }
    LightnessTable {
        ray: ray.clone(),
        rows,
    }
}

/// One radius of a ζ-averaged √-kernel-mass table.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExpectedLightnessRow {
    pub radius: usize,
    pub new_points: usize,
    /// `|set ∩ sphere| · E_ζ[√f]` at this radius, exact.
    pub increment: SqrtPowerSum,
    pub cumulative: SqrtPowerSum,
}

/// ζ-averaged √-kernel mass of a set, accumulated sphere by sphere. By
/// spherical symmetry the direction drops out, so no ray is involved.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExpectedLightnessTable {
    pub rank: u8,
    pub rows: Vec<ExpectedLightnessRow>,
}

impl ExpectedLightnessTable {
    pub fn trend(&self) -> Trend {
        let nonzero: Vec<&SqrtPowerSum> = self
            .rows
            .iter()
            .filter(|r| !r.increment.is_zero())
            .map(|r| &r.increment)
            .collect();
        classify_tail(nonzero.len(), |i| {
            nonzero[i + 1]
                .scale(&rat_int(5))
                .cmp_value(&nonzero[i].scale(&rat_int(4)))
                != core::cmp::Ordering::Greater
        })
    }

    pub fn cumulative_at(&self, radius: usize) -> Option<&SqrtPowerSum> {
        self.rows.get(radius).map(|row| &row.cumulative)
    }
}

/// Tabulate `|set ∩ sphere_r| · E_ζ[√f]` and its partial sums for
/// `r = 0..=r_max`, using the closed-form census (pinned against the tree
/// walk in tests).
pub fn expected_lightness_sum(
    rank: u8,
    set: &BTreeSet<ReducedWord>,
    r_max: usize,
) -> Result<ExpectedLightnessTable, MartinError> {
    check_rank(rank)?;
    let mut counts = vec![0usize; r_max + 1];
    for x in set {
        if x.rank() != rank {
            return Err(MartinError::RankMismatch {
                left: rank,
                right: x.rank(),
            });
        }
        if x.len() <= r_max {
            counts[x.len()] += 1;
        }
    }
    let mut rows = Vec::with_capacity(r_max + 1);
    let mut cumulative = SqrtPowerSum::zero(rank);
    for (radius, new_points) in counts.into_iter().enumerate() {
        let increment = symmetric_expected(rank, radius).scale(&rat_int(new_points as i64));
        cumulative = cumulative.add(&increment);
        rows.push(ExpectedLightnessRow {
            radius,
            new_points,
            increment,
            cumulative: cumulative.clone(),
        });
    }
    Ok(ExpectedLightnessTable { rank, rows })
}
