//! Resolvent ("Green") evaluation for finitely supported random walks on a
//! free group, with three interchangeable models:
//!
//! * a closed form for the uniform nearest-neighbour step, exact at every
//!   point of the group;
//! * a radial recursion for the same step truncated at a chosen depth — the
//!   value at `g` depends only on `|g|`, so partial sums to depth in the
//!   hundreds stay cheap while agreeing exactly with direct convolution;
//! * a direct convolution table for arbitrary steps, truncated at a depth.
//!
//! The truncated models satisfy the renewal identity
//! `G_N − μ∗G_N = δ_e − μ^{∗(N+1)}` exactly, with the final power exposed as
//! [`GreenEvaluator::residual_power`]; the closed form satisfies
//! `G − μ∗G = δ_e` on the nose. On top of the evaluator sit comparison
//! witnesses for shifted values, a per-sphere search for translates with
//! small weighted mass, and an exact two-stage decomposition of power sums.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::measure::{FinMeasure, GroupFunction, MeasureError, PowerTable};
use crate::rational::{Rational, pow_int, rat, rat_int};
use crate::word::{ReducedWord, WordError, check_rank, sphere};

/// Errors from resolvent construction and the derived checks.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GreenError {
    Measure(MeasureError),
    Word(WordError),
    /// No convolution power up to the requested depth charges the point, so
    /// no comparison constant can be extracted from it.
    WitnessNotFound {
        point: ReducedWord,
        depth: u32,
    },
    /// The weighted set is empty.
    EmptySet,
}

impl fmt::Display for GreenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GreenError::Measure(e) => write!(f, "{e}"),
            GreenError::Word(e) => write!(f, "{e}"),
            GreenError::WitnessNotFound { point, depth } => {
                write!(
                    f,
                    "no convolution power up to depth {depth} charges {point}"
                )
            }
            GreenError::EmptySet => write!(f, "the set must be nonempty"),
        }
    }
}

impl core::error::Error for GreenError {}

impl From<MeasureError> for GreenError {
    fn from(e: MeasureError) -> Self {
        GreenError::Measure(e)
    }
}

impl From<WordError> for GreenError {
    fn from(e: WordError) -> Self {
        GreenError::Word(e)
    }
}

/// Point values of the powers of the uniform nearest-neighbour step, stored
/// by word length: `rows[n][r]` is the mass the `n`-th power puts on any
/// single word of length `r`.
///
/// One step from a word of length `r ≥ 1` reaches length `r − 1` one way and
/// length `r + 1` in `2d − 1` ways; from the identity all `2d` steps reach
/// length 1. That drives the whole table from `rows[0] = [1]`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RadialWalk {
    rank: u8,
    rows: Vec<Vec<Rational>>,
}

impl RadialWalk {
    pub fn new(rank: u8, max_time: u32) -> Result<Self, WordError> {
        check_rank(rank)?;
        let back = rat_int(2 * i64::from(rank) - 1);
        let step = rat(1, 2 * i64::from(rank));
        let mut rows: Vec<Vec<Rational>> = vec![vec![rat(1, 1)]];
        for n in 0..max_time as usize {
            let prev = &rows[n];
            let at = |r: usize| prev.get(r).cloned().unwrap_or_else(Rational::zero);
            let mut next = Vec::with_capacity(n + 2);
            next.push(at(1));
            for r in 1..=n + 1 {
                next.push(&step * (at(r - 1) + &back * at(r + 1)));
            }
            rows.push(next);
        }
        Ok(RadialWalk { rank, rows })
    }

    pub fn rank(&self) -> u8 {
        self.rank
    }

    pub fn max_time(&self) -> u32 {
        (self.rows.len() - 1) as u32
    }

    /// Mass of the `time`-th power at any single word of length `radius`.
    pub fn point_mass(&self, time: u32, radius: usize) -> Rational {
        self.rows
            .get(time as usize)
            .and_then(|row| row.get(radius))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }
}

/// How to evaluate the resolvent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GreenModel {
    /// Exact closed form for the uniform nearest-neighbour step:
    /// `G(g) = (2d−1)/(2d−2) · (2d−1)^{−|g|}`.
    ClosedFormUniform { rank: u8 },
    /// Partial sum `Σ_{n ≤ depth} μ^{∗n}` for any finitely supported step.
    /// The uniform step is detected and routed through [`RadialWalk`].
    TruncatedSeries { mu: FinMeasure, depth: u32 },
}

enum EvalKind {
    Closed,
    Radial {
        depth: u32,
        cumulative: Vec<Rational>,
        tail: Vec<Rational>,
    },
    Table {
        depth: u32,
        values: BTreeMap<ReducedWord, Rational>,
        tail: FinMeasure,
    },
}

/// Evaluates `G(g)`, sums it over (translated) finite sets, and exposes the
/// truncation residual needed to state exact identities about partial sums.
pub struct GreenEvaluator {
    rank: u8,
    step: FinMeasure,
    kind: EvalKind,
}

impl GreenEvaluator {
    pub fn new(model: GreenModel) -> Result<Self, GreenError> {
        match model {
            GreenModel::ClosedFormUniform { rank } => {
                check_rank(rank)?;
                Ok(GreenEvaluator {
                    rank,
                    step: FinMeasure::uniform_generators(rank)?,
                    kind: EvalKind::Closed,
                })
            }
            GreenModel::TruncatedSeries { mu, depth } => {
                let rank = mu.rank();
                if crate::measure::is_uniform_step(&mu) {
                    let walk = RadialWalk::new(rank, depth + 1)?;
                    let mut cumulative = vec![Rational::zero(); depth as usize + 1];
                    for n in 0..=depth {
                        for (r, slot) in cumulative.iter_mut().enumerate() {
                            *slot += walk.point_mass(n, r);
                        }
                    }
                    let tail = (0..=depth as usize + 1)
                        .map(|r| walk.point_mass(depth + 1, r))
                        .collect();
                    Ok(GreenEvaluator {
                        rank,
                        step: mu,
                        kind: EvalKind::Radial {
                            depth,
                            cumulative,
                            tail,
                        },
                    })
                } else {
                    let mut table = PowerTable::new(mu.clone());
                    let mut values: BTreeMap<ReducedWord, Rational> = BTreeMap::new();
                    for n in 0..=depth {
                        for (g, v) in table.power(n)?.iter() {
                            *values.entry(g.clone()).or_insert_with(Rational::zero) += v;
                        }
                    }
                    let tail = table.power(depth + 1)?.clone();
                    Ok(GreenEvaluator {
                        rank,
                        step: mu,
                        kind: EvalKind::Table {
                            depth,
                            values,
                            tail,
                        },
                    })
                }
            }
        }
    }

    /// The rank `d` of the underlying free group.
    pub fn rank(&self) -> u8 {
        self.rank
    }

    /// The step distribution the model sums powers of.
    pub fn step_measure(&self) -> &FinMeasure {
        &self.step
    }

    /// `G(g)` under this model.
    pub fn value(&self, g: &ReducedWord) -> Rational {
        assert_eq!(g.rank(), self.rank, "rank mismatch in resolvent evaluation");
        match &self.kind {
            EvalKind::Closed => {
                let m = 2 * i64::from(self.rank) - 1;
                rat(m, m - 1) * pow_int(&rat_int(m), -(g.len() as i64))
            }
            EvalKind::Radial { cumulative, .. } => cumulative
                .get(g.len())
                .cloned()
                .unwrap_or_else(Rational::zero),
            EvalKind::Table { values, .. } => values.get(g).cloned().unwrap_or_else(Rational::zero),
        }
    }

    /// `Σ over the set of G(x)`.
    pub fn set_sum<'a, I>(&self, set: I) -> Rational
    where
        I: IntoIterator<Item = &'a ReducedWord>,
    {
        let mut acc = Rational::zero();
        for x in set {
            acc += self.value(x);
        }
        acc
    }

    /// `Σ over the set of G(x · k)` — the weight the `k`-translate assigns.
    pub fn translated_set_sum<'a, I>(&self, k: &ReducedWord, set: I) -> Rational
    where
        I: IntoIterator<Item = &'a ReducedWord>,
    {
        let mut acc = Rational::zero();
        for x in set {
            acc += self.value(&x.mul(k));
        }
        acc
    }

    /// The `(depth+1)`-st power of the step at `g` — the exact correction in
    /// `G_N − μ∗G_N = δ_e − μ^{∗(N+1)}`. `None` for the closed form, whose
    /// identity has no correction.
    pub fn residual_power(&self, g: &ReducedWord) -> Option<Rational> {
        match &self.kind {
            EvalKind::Closed => None,
            EvalKind::Radial { tail, .. } => {
                Some(tail.get(g.len()).cloned().unwrap_or_else(Rational::zero))
            }
            EvalKind::Table { tail, .. } => Some(tail.mass(g)),
        }
    }

    /// Whether this model truncates the power series.
    pub fn is_truncated(&self) -> bool {
        !matches!(self.kind, EvalKind::Closed)
    }

    /// The truncation depth, if any.
    pub fn depth(&self) -> Option<u32> {
        match &self.kind {
            EvalKind::Closed => None,
            EvalKind::Radial { depth, .. } | EvalKind::Table { depth, .. } => Some(*depth),
        }
    }

    /// `"closed"`, `"radial"`, or `"general"` — which evaluation path is in
    /// use.
    pub fn model_label(&self) -> &'static str {
        match &self.kind {
            EvalKind::Closed => "closed",
            EvalKind::Radial { .. } => "radial",
            EvalKind::Table { .. } => "general",
        }
    }
}

impl GroupFunction for GreenEvaluator {
    fn rank(&self) -> u8 {
        self.rank
    }

    fn value(&self, g: &ReducedWord) -> Option<Rational> {
        Some(GreenEvaluator::value(self, g))
    }
}

/// A constant `ε ∈ (0, 1]` extracted from the walk itself: the largest mass
/// any power up to `depth` puts on the point or on its inverse (the smaller
/// of the two maxima, so it works on both sides).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EpsilonWitness {
    pub point: ReducedWord,
    pub depth: u32,
    pub value: Rational,
}

/// Extract a comparison constant for shifts by `h`: some power `n ≤ depth`
/// has `μ^{∗n}(h) ≥ ε` and some has `μ^{∗n}(h⁻¹) ≥ ε`, which forces the
/// two-sided bounds checked by [`verify_gamma_bounds`].
pub fn epsilon_witness(
    mu: &FinMeasure,
    h: &ReducedWord,
    depth: u32,
) -> Result<EpsilonWitness, GreenError> {
    if h.is_identity() {
        return Ok(EpsilonWitness {
            point: h.clone(),
            depth,
            value: rat(1, 1),
        });
    }
    let (forward, backward) = if crate::measure::is_uniform_step(mu) {
        // The uniform step is symmetric and radial: both maxima coincide and
        // depend only on |h|.
        let walk = RadialWalk::new(mu.rank(), depth)?;
        let mut best = Rational::zero();
        for n in 0..=depth {
            let v = walk.point_mass(n, h.len());
            if v > best {
                best = v;
            }
        }
        (best.clone(), best)
    } else {
        let mut table = PowerTable::new(mu.clone());
        let inverse = h.inv();
        let mut forward = Rational::zero();
        let mut backward = Rational::zero();
        for n in 0..=depth {
            let power = table.power(n)?;
            let f = power.mass(h);
            if f > forward {
                forward = f;
            }
            let b = power.mass(&inverse);
            if b > backward {
                backward = b;
            }
        }
        (forward, backward)
    };
    let value = forward.min(backward);
    if value.is_zero() {
        return Err(GreenError::WitnessNotFound {
            point: h.clone(),
            depth,
        });
    }
    Ok(EpsilonWitness {
        point: h.clone(),
        depth,
        value,
    })
}

/// Which of the two comparison chains a bound belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GammaChain {
    /// Compare `G(h⁻¹·x·k)` against `G(x·k)` (the shift acts on the left of
    /// the evaluation point).
    LeftShift,
    /// Compare `G(k⁻¹·x·h)` against `G(k⁻¹·x)` (the shift multiplies on the
    /// right).
    RightShift,
}

impl fmt::Display for GammaChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaChain::LeftShift => write!(f, "left-shift"),
            GammaChain::RightShift => write!(f, "right-shift"),
        }
    }
}

/// Which side of the sandwich failed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoundSide {
    Lower,
    Upper,
}

impl fmt::Display for BoundSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundSide::Lower => write!(f, "lower"),
            BoundSide::Upper => write!(f, "upper"),
        }
    }
}

/// One failed inequality: `lhs ≤ rhs` was required but did not hold.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GammaViolation {
    pub point: ReducedWord,
    pub chain: GammaChain,
    pub side: BoundSide,
    pub lhs: Rational,
    pub rhs: Rational,
}

/// Result of checking the two-sided comparison bounds on a sample.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GammaBoundsReport {
    pub epsilon: Rational,
    pub shift: ReducedWord,
    pub translate: ReducedWord,
    /// Number of sample points checked (four inequalities each).
    pub checked: usize,
    pub violations: Vec<GammaViolation>,
}

impl GammaBoundsReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check, at every sample point `x`, the four inequalities
/// `ε·G(xk) ≤ G(h⁻¹xk) ≤ (1/ε)·G(xk)` and
/// `ε·G(k⁻¹x) ≤ G(k⁻¹xh) ≤ (1/ε)·G(k⁻¹x)`,
/// where `h` is the witness point and `ε` its constant.
pub fn verify_gamma_bounds(
    eval: &GreenEvaluator,
    witness: &EpsilonWitness,
    translate: &ReducedWord,
    sample: &[ReducedWord],
) -> GammaBoundsReport {
    let eps = &witness.value;
    let h = &witness.point;
    let h_inv = h.inv();
    let k_inv = translate.inv();
    let mut violations = Vec::new();
    let mut record = |point: &ReducedWord, chain, base: Rational, shifted: Rational| {
        let lower = eps * &base;
        if !(lower <= shifted) {
            violations.push(GammaViolation {
                point: point.clone(),
                chain,
                side: BoundSide::Lower,
                lhs: lower,
                rhs: shifted.clone(),
            });
        }
        let scaled = &shifted * eps;
        if !(scaled <= base) {
            violations.push(GammaViolation {
                point: point.clone(),
                chain,
                side: BoundSide::Upper,
                lhs: shifted,
                rhs: base / eps,
            });
        }
    };
    for x in sample {
        let xk = x.mul(translate);
        record(
            x,
            GammaChain::LeftShift,
            eval.value(&xk),
            eval.value(&h_inv.mul(&xk)),
        );
        let kx = k_inv.mul(x);
        record(
            x,
            GammaChain::RightShift,
            eval.value(&kx),
            eval.value(&kx.mul(h)),
        );
    }
    GammaBoundsReport {
        epsilon: eps.clone(),
        shift: h.clone(),
        translate: translate.clone(),
        checked: sample.len(),
        violations,
    }
}

/// One sphere of the translate search: the minimizer of the translated set
/// weight over words of the given length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TranslateStep {
    pub radius: usize,
    pub translator: ReducedWord,
    pub value: Rational,
}

/// For each radius `0..=radius_max`, minimize `Σ_{x∈A} G(x·k)` over `k` in
/// that sphere (first minimizer in enumeration order on ties). Pushing the
/// translate outward drives the weighted mass of the set toward zero.
pub fn find_small_translate(
    eval: &GreenEvaluator,
    set: &BTreeSet<ReducedWord>,
    radius_max: usize,
) -> Result<Vec<TranslateStep>, GreenError> {
    if set.is_empty() {
        return Err(GreenError::EmptySet);
    }
    let mut steps = Vec::with_capacity(radius_max + 1);
    for radius in 0..=radius_max {
        let mut best: Option<(ReducedWord, Rational)> = None;
        for k in sphere(eval.rank(), radius)? {
            let v = eval.translated_set_sum(&k, set.iter());
            match &best {
                Some((_, current)) if *current <= v => {}
                _ => best = Some((k, v)),
            }
        }
        let (translator, value) = best.expect("spheres are nonempty");
        steps.push(TranslateStep {
            radius,
            translator,
            value,
        });
    }
    Ok(steps)
}

/// Both sides of the exact two-stage decomposition of a block of power sums:
/// splitting each of the `offset+n` steps (`n = 0..=span`) at time `offset`
/// gives
/// `Σ_{n=offset}^{offset+span} μ^{∗n}(A)
///  = Σ_k μ^{∗offset}(k⁻¹) · Σ_{n=0}^{span} μ^{∗n}(A·k)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TailDecomposition {
    pub offset: u32,
    pub span: u32,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl TailDecomposition {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Evaluate both sides of the decomposition above; they must agree exactly
/// for every finitely supported step.
pub fn tail_decomposition_check(
    mu: &FinMeasure,
    set: &BTreeSet<ReducedWord>,
    offset: u32,
    span: u32,
) -> Result<TailDecomposition, GreenError> {
    let mut table = PowerTable::new(mu.clone());
    let top = offset + span;
    let powers: Vec<FinMeasure> = (0..=top)
        .map(|n| table.power(n).cloned())
        .collect::<Result<_, _>>()?;

    let mut lhs = Rational::zero();
    for n in offset..=top {
        lhs += powers[n as usize].mass_of_set(set.iter());
    }

    let mut rhs = Rational::zero();
    for (g, weight) in powers[offset as usize].iter() {
        let k = g.inv();
        let translated: Vec<ReducedWord> = set.iter().map(|x| x.mul(&k)).collect();
        let mut inner = Rational::zero();
        for n in 0..=span {
            inner += powers[n as usize].mass_of_set(translated.iter());
        }
        rhs += weight * inner;
    }
    Ok(TailDecomposition {
        offset,
        span,
        lhs,
        rhs,
    })
}
