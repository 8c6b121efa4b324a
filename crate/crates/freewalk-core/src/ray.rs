//! Eventually periodic boundary rays and geodesic comparisons against them.
//!
//! A ray is an infinite reduced word `prefix · period · period · …`, written
//! `"prefix|period"` (with `e` for an empty prefix). Construction validates
//! both junctions — prefix→period and period→period — so every finite prefix
//! of the infinite word is reduced; no silent normalization is performed, and
//! two different specs may denote the same boundary point.

use alloc::vec::Vec;
use core::fmt;

use crate::word::{Letter, ReducedWord, WordError};

/// Errors from ray construction and parsing.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum RayError {
    /// The period must contain at least one letter.
    EmptyPeriod,
    /// Prefix and period were built over different ranks.
    RankMismatch { prefix_rank: u8, period_rank: u8 },
    /// The last prefix letter cancels the first period letter.
    PrefixPeriodCancellation,
    /// The last period letter cancels the first period letter, so the loop
    /// would not stay reduced.
    PeriodLoopCancellation,
    /// Underlying word problem (bad character, rank, …).
    Word(WordError),
    /// Ray text is not of the form `prefix|period`.
    MissingSeparator,
}

impl fmt::Display for RayError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RayError::EmptyPeriod => write!(f, "ray period must be nonempty"),
            RayError::RankMismatch {
                prefix_rank,
                period_rank,
            } => {
                write!(
                    f,
                    "prefix rank {prefix_rank} differs from period rank {period_rank}"
                )
            }
            RayError::PrefixPeriodCancellation => {
                write!(
                    f,
                    "prefix ends with the inverse of the period's first letter"
                )
            }
            RayError::PeriodLoopCancellation => {
                write!(f, "period ends with the inverse of its own first letter")
            }
            RayError::Word(e) => write!(f, "{e}"),
            RayError::MissingSeparator => {
                write!(
                    f,
                    "ray text must be \"prefix|period\" (use \"e\" for an empty prefix)"
                )
            }
        }
    }
}

impl core::error::Error for RayError {}

impl From<WordError> for RayError {
    fn from(e: WordError) -> Self {
        RayError::Word(e)
    }
}

/// An eventually periodic infinite reduced word.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RaySpec {
    prefix: ReducedWord,
    period: ReducedWord,
}

impl RaySpec {
    /// Build a ray, validating that `prefix · period^∞` is reduced.
    pub fn new(prefix: ReducedWord, period: ReducedWord) -> Result<Self, RayError> {
        if prefix.rank() != period.rank() {
            return Err(RayError::RankMismatch {
                prefix_rank: prefix.rank(),
                period_rank: period.rank(),
            });
        }
        let first = period.first().ok_or(RayError::EmptyPeriod)?;
        if prefix.last() == Some(first.inverse()) {
            return Err(RayError::PrefixPeriodCancellation);
        }
        if period.last() == Some(first.inverse()) {
            return Err(RayError::PeriodLoopCancellation);
        }
        Ok(RaySpec { prefix, period })
    }

    /// Parse `"prefix|period"`; the prefix may be written `e`.
    pub fn parse(rank: u8, text: &str) -> Result<Self, RayError> {
        let (prefix_text, period_text) = text.split_once('|').ok_or(RayError::MissingSeparator)?;
        let prefix = ReducedWord::parse(rank, prefix_text)?;
        let period = ReducedWord::parse(rank, period_text)?;
        Self::new(prefix, period)
    }

    /// The rank `d` of the underlying free group.
    pub fn rank(&self) -> u8 {
        self.prefix.rank()
    }

    /// The (possibly empty) initial segment.
    pub fn prefix(&self) -> &ReducedWord {
        &self.prefix
    }

    /// The repeating segment.
    pub fn period(&self) -> &ReducedWord {
        &self.period
    }

    /// The `i`-th letter (0-based) of the infinite word.
    pub fn letter_at(&self, i: usize) -> Letter {
        let p = self.prefix.len();
        if i < p {
            self.prefix.letters()[i]
        } else {
            self.period.letters()[(i - p) % self.period.len()]
        }
    }

    /// The first `n` letters as a reduced word (reduced by the junction
    /// invariants).
    pub fn word_prefix(&self, n: usize) -> ReducedWord {
        let letters: Vec<Letter> = (0..n).map(|i| self.letter_at(i)).collect();
        ReducedWord::from_reduced(self.rank(), letters)
    }
}

impl fmt::Display for RaySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.prefix, self.period)
    }
}

impl ReducedWord {
    /// Length of the longest common prefix of this word and the ray's
    /// infinite word. At most `self.len()`.
    pub fn lcp_with_ray(&self, ray: &RaySpec) -> usize {
        assert_eq!(self.rank(), ray.rank(), "rank mismatch against ray");
        self.letters()
            .iter()
            .enumerate()
            .take_while(|(i, l)| **l == ray.letter_at(*i))
            .count()
    }

    /// Tree distance from this word to the geodesic ray:
    /// `|g| − lcp(g, ray)`, which equals min over ray points p of |g⁻¹p|.
    pub fn dist_to_ray(&self, ray: &RaySpec) -> usize {
        self.len() - self.lcp_with_ray(ray)
    }
}
