//! Two families of normalized finitely additive measures whose failure of
//! stationarity is an exact, fully explicit quantity:
//!
//! * [`MkAverage`] — the Cesàro-style average `Σ_{m ≤ n} μ^{∗m}` normalized
//!   on a reference set `A`. Its signed defect at a test set `E` is
//!   `(μ^{∗(n+1)}(E) − δ_e(E)) / D_n` with `D_n = Σ_{m ≤ n} μ^{∗m}(A)`, so
//!   its absolute value is at most `1 / D_n` and shrinks as `n` grows.
//! * [`GreenTranslateMeasure`] — the resolvent translate
//!   `E ↦ Σ_{x∈E} G(x·k)` normalized on `A`. Its defect at `E` is
//!   `δ_{k⁻¹}(E) / Σ_{x∈A} G(x·k)`: identically zero as soon as `k⁻¹`
//!   leaves `E`, which is the mechanism behind stationary limits along
//!   translates escaping to infinity.
//!
//! Both `defect` methods compute the convolved side by literal set
//! translation — never by the algebraic shortcut — so agreement of `lhs`
//! with the closed-form `rhs` is a genuine two-route consistency check.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use num_traits::Zero;

use crate::green::{GreenError, GreenEvaluator, find_small_translate};
use crate::measure::{FinMeasure, MeasureError, PowerTable};
use crate::rational::{Rational, rat};
use crate::word::{ReducedWord, WordError};

/// Errors from building the normalized families.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum StationaryError {
    /// The averaged powers put no mass on the reference set up to stage `n`;
    /// `first_positive` is the first stage that would work, if one was found
    /// within the scan horizon.
    ZeroDenominator {
        n: u32,
        first_positive: Option<u32>,
    },
    /// The translated resolvent weight of the reference set is zero (a
    /// truncated model cannot see the set from this translate).
    ZeroTranslateMass {
        translator: ReducedWord,
    },
    /// The reference or test set must be nonempty.
    EmptySet,
    Green(GreenError),
    Measure(MeasureError),
    Word(WordError),
}

impl fmt::Display for StationaryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StationaryError::ZeroDenominator { n, first_positive } => match first_positive {
                Some(m) => write!(
                    f,
                    "averaged powers up to stage {n} give the reference set zero mass; \
                     the first positive stage is {m}"
                ),
                None => write!(
                    f,
                    "averaged powers give the reference set zero mass up to stage {n} \
                     and within the scan horizon beyond it"
                ),
            },
            StationaryError::ZeroTranslateMass { translator } => {
                write!(
                    f,
                    "translated resolvent weight vanishes at translator {translator}"
                )
            }
            StationaryError::EmptySet => write!(f, "the set must be nonempty"),
            StationaryError::Green(e) => write!(f, "{e}"),
            StationaryError::Measure(e) => write!(f, "{e}"),
            StationaryError::Word(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for StationaryError {}

impl From<GreenError> for StationaryError {
    fn from(e: GreenError) -> Self {
        StationaryError::Green(e)
    }
}

impl From<MeasureError> for StationaryError {
    fn from(e: MeasureError) -> Self {
        StationaryError::Measure(e)
    }
}

impl From<WordError> for StationaryError {
    fn from(e: WordError) -> Self {
        StationaryError::Word(e)
    }
}

/// The two extra terms present when the resolvent is truncated: the observed
/// leftover `residual = lhs − rhs` and the predicted `correction` coming
/// from the first omitted power. Exactness demands `residual = −correction`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncationInfo {
    pub residual: Rational,
    pub correction: Rational,
}

/// Both sides of a stationarity-defect identity at one test set.
///
/// `lhs` is the defect computed by literal set translation; `rhs` is the
/// closed form it must equal. For [`MkAverage`] the defect is oriented as
/// `[μ∗M](E) − M(E)`; for [`GreenTranslateMeasure`] as `M(E) − [μ∗M](E)`.
/// When a truncation correction applies, `exact_match` asserts the refined
/// identity `lhs = rhs − correction`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DefectReport {
    pub test_set: Vec<ReducedWord>,
    pub lhs: Rational,
    pub rhs: Rational,
    pub exact_match: bool,
    /// An a-priori bound on `|lhs|`, where the family provides one.
    pub bound: Option<Rational>,
    pub truncation: Option<TruncationInfo>,
}

/// `M_n(E) = (Σ_{m ≤ n} μ^{∗m}(E)) / D_n`, normalized so that `M_n(A) = 1`.
pub struct MkAverage {
    mu: FinMeasure,
    reference: BTreeSet<ReducedWord>,
    stage: u32,
    powers: Vec<FinMeasure>,
    denom: Rational,
}

impl MkAverage {
    /// How far past `n` to look for a stage that charges the reference set
    /// when diagnosing a zero denominator: two more than twice the longest
    /// word, which covers any parity obstruction of a generator-supported
    /// step, plus slack for steps that need a detour.
    fn scan_horizon(n: u32, reference: &BTreeSet<ReducedWord>) -> u32 {
        let longest = reference.iter().map(ReducedWord::len).max().unwrap_or(0) as u32;
        n + 2 * longest + 4
    }

    pub fn new(
        mu: FinMeasure,
        reference: BTreeSet<ReducedWord>,
        stage: u32,
    ) -> Result<Self, StationaryError> {
        if reference.is_empty() {
            return Err(StationaryError::EmptySet);
        }
        let mut table = PowerTable::new(mu.clone());
        let powers: Vec<FinMeasure> = (0..=stage + 1)
            .map(|m| table.power(m).cloned())
            .collect::<Result<_, _>>()?;
        let mut denom = Rational::zero();
        for p in &powers[..=stage as usize] {
            denom += p.mass_of_set(reference.iter());
        }
        if denom.is_zero() {
            let mut first_positive = None;
            for m in 0..=Self::scan_horizon(stage, &reference) {
                if !table.power(m)?.mass_of_set(reference.iter()).is_zero() {
                    first_positive = Some(m);
                    break;
                }
            }
            return Err(StationaryError::ZeroDenominator {
                n: stage,
                first_positive,
            });
        }
        Ok(MkAverage {
            mu,
            reference,
            stage,
            powers,
            denom,
        })
    }

    /// The normalizer `D_n = Σ_{m ≤ n} μ^{∗m}(A)`.
    pub fn denominator(&self) -> &Rational {
        &self.denom
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn reference_set(&self) -> &BTreeSet<ReducedWord> {
        &self.reference
    }

    fn unnormalized<'a, I>(&self, set: I) -> Rational
    where
        I: IntoIterator<Item = &'a ReducedWord> + Clone,
    {
        let mut acc = Rational::zero();
        for p in &self.powers[..=self.stage as usize] {
            acc += p.mass_of_set(set.clone());
        }
        acc
    }

    /// `M_n(E)`.
    pub fn measure(&self, set: &BTreeSet<ReducedWord>) -> Rational {
        self.unnormalized(set.iter()) / &self.denom
    }

    /// Evaluate `[μ∗M_n](E) − M_n(E)` by direct translation and compare it
    /// with the closed form `(μ^{∗(n+1)}(E) − δ_e(E)) / D_n`.
    pub fn defect(&self, test_set: &BTreeSet<ReducedWord>) -> DefectReport {
        let here = self.measure(test_set);
        let mut through = Rational::zero();
        for (h, weight) in self.mu.iter() {
            let h_inv = h.inv();
            let translated: Vec<ReducedWord> = test_set.iter().map(|x| h_inv.mul(x)).collect();
            through += weight * (self.unnormalized(translated.iter()) / &self.denom);
        }
        let lhs = through - here;

        let identity = ReducedWord::identity(self.mu.rank());
        let delta = if test_set.contains(&identity) {
            rat(1, 1)
        } else {
            Rational::zero()
        };
        let rhs = (self.powers[self.stage as usize + 1].mass_of_set(test_set.iter()) - delta)
            / &self.denom;

        DefectReport {
            test_set: test_set.iter().cloned().collect(),
            exact_match: lhs == rhs,
            lhs,
            rhs,
            bound: Some(self.denom.recip()),
            truncation: None,
        }
    }
}

/// `M_k(E) = (Σ_{x∈E} G(x·k)) / (Σ_{x∈A} G(x·k))` — the `k`-translate of
/// the resolvent weight, normalized on the reference set.
pub struct GreenTranslateMeasure<'a> {
    eval: &'a GreenEvaluator,
    translator: ReducedWord,
    reference: BTreeSet<ReducedWord>,
    denom: Rational,
}

impl<'a> GreenTranslateMeasure<'a> {
    pub fn new(
        eval: &'a GreenEvaluator,
        translator: ReducedWord,
        reference: BTreeSet<ReducedWord>,
    ) -> Result<Self, StationaryError> {
        if reference.is_empty() {
            return Err(StationaryError::EmptySet);
        }
        let denom = eval.translated_set_sum(&translator, reference.iter());
        if denom.is_zero() {
            return Err(StationaryError::ZeroTranslateMass { translator });
        }
        Ok(GreenTranslateMeasure {
            eval,
            translator,
            reference,
            denom,
        })
    }

    /// The normalizer `Σ_{x∈A} G(x·k)`.
    pub fn denominator(&self) -> &Rational {
        &self.denom
    }

    pub fn translator(&self) -> &ReducedWord {
        &self.translator
    }

    pub fn reference_set(&self) -> &BTreeSet<ReducedWord> {
        &self.reference
    }

    /// `M_k(E)`.
    pub fn measure(&self, set: &BTreeSet<ReducedWord>) -> Rational {
        self.eval.translated_set_sum(&self.translator, set.iter()) / &self.denom
    }

    /// Evaluate `M_k(E) − [μ∗M_k](E)` by direct translation and compare it
    /// with the closed form `δ_{k⁻¹}(E) / denom`; under truncation the
    /// refined identity subtracts the first omitted power of the step,
    /// `correction = Σ_{x∈E} μ^{∗(N+1)}(x·k) / denom`.
    pub fn defect(&self, test_set: &BTreeSet<ReducedWord>) -> DefectReport {
        let here = self.measure(test_set);
        let mut through = Rational::zero();
        for (h, weight) in self.eval.step_measure().iter() {
            let h_inv = h.inv();
            let translated: Vec<ReducedWord> = test_set.iter().map(|x| h_inv.mul(x)).collect();
            through += weight
                * (self
                    .eval
                    .translated_set_sum(&self.translator, translated.iter())
                    / &self.denom);
        }
        let lhs = here - through;

        let k_inv = self.translator.inv();
        let delta = if test_set.contains(&k_inv) {
            rat(1, 1)
        } else {
            Rational::zero()
        };
        let rhs = delta / &self.denom;

        let (exact_match, truncation) = if self.eval.is_truncated() {
            let mut omitted = Rational::zero();
            for x in test_set {
                omitted += self
                    .eval
                    .residual_power(&x.mul(&self.translator))
                    .expect("truncated models expose their residual power");
            }
            let correction = omitted / &self.denom;
            let residual = &lhs - &rhs;
            (
                lhs == &rhs - &correction,
                Some(TruncationInfo {
                    residual,
                    correction,
                }),
            )
        } else {
            (lhs == rhs, None)
        };

        DefectReport {
            test_set: test_set.iter().cloned().collect(),
            lhs,
            rhs,
            exact_match,
            bound: None,
            truncation,
        }
    }
}

/// One radius of the escape-to-stationarity schedule.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScheduleRow {
    pub radius: usize,
    pub translator: ReducedWord,
    /// `Σ_{x∈A} G(x·k)` for the minimizing `k` of this radius.
    pub translate_mass: Rational,
    /// Signed defect of the normalized translate at the test set.
    pub defect: Rational,
    /// Whether `k⁻¹` lies in the test set — the only way the defect of an
    /// untruncated model can be nonzero.
    pub inverse_hits_test_set: bool,
}

/// Walk the minimizing translate outward and record how the stationarity
/// defect at a fixed test set dies: once the translator's inverse escapes
/// the test set, an untruncated defect is exactly zero.
pub fn vanishing_defect_schedule(
    eval: &GreenEvaluator,
    reference: &BTreeSet<ReducedWord>,
    test_set: &BTreeSet<ReducedWord>,
    radius_max: usize,
) -> Result<Vec<ScheduleRow>, StationaryError> {
    if test_set.is_empty() {
        return Err(StationaryError::EmptySet);
    }
    let steps = find_small_translate(eval, reference, radius_max)?;
    let mut rows = Vec::with_capacity(steps.len());
    for step in steps {
        let family = GreenTranslateMeasure::new(eval, step.translator.clone(), reference.clone())?;
        let report = family.defect(test_set);
        rows.push(ScheduleRow {
            radius: step.radius,
            inverse_hits_test_set: test_set.contains(&step.translator.inv()),
            translator: step.translator,
            translate_mass: step.value,
            defect: report.lhs,
        });
    }
    Ok(rows)
}
