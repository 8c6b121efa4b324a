//! Families of structured subsets of a free group: suffix-stretched images,
//! even palindromes, geodesic prefixes, words pinned at both ends, and the
//! sparse union-of-spheres families whose pairwise products stay injective.
//!
//! Each family is described by a [`SubsetSpec`], which can be parsed from and
//! rendered to a compact text form, materialized inside a ball, or counted
//! per sphere without materializing (the counting shortcuts are pinned
//! against materialization in tests). On top sit growth-rate estimates and
//! the product-injectivity experiment.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::ray::{RayError, RaySpec};
use crate::word::{Letter, ReducedWord, WordError, ball, check_rank, sphere, sphere_size};

/// Default largest sphere the sparse-family materializer will enumerate.
pub const DEFAULT_SPHERE_CAP: usize = 12;

/// Errors from set construction and analysis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SetsError {
    /// The suffix-stretching map is undefined at the identity.
    SigmaOfIdentity,
    /// The computation would enumerate too many words.
    Budget {
        requested: u128,
    },
    /// Growth estimation needs a larger horizon.
    RadiusTooSmall {
        given: usize,
        minimum: usize,
    },
    /// No sphere in the upper half of the horizon carries any set points, so
    /// there is nothing to estimate a rate from.
    EmptyTail {
        from: usize,
        to: usize,
    },
    /// The product experiment supports tuples of length 2 or 3 only.
    UnsupportedTupleLen {
        given: usize,
    },
    /// Sparse families are indexed from 1.
    ZeroFamilyIndex,
    Word(WordError),
    Ray(RayError),
}

impl fmt::Display for SetsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetsError::SigmaOfIdentity => {
                write!(f, "the suffix-stretching map is undefined at the identity")
            }
            SetsError::Budget { requested } => {
                if *requested == u128::MAX {
                    write!(f, "set count overflows the supported integer range")
                } else {
                    write!(f, "set enumeration budget exceeded ({requested} words)")
                }
            }
            SetsError::RadiusTooSmall { given, minimum } => {
                write!(f, "radius {given} is too small (need at least {minimum})")
            }
            SetsError::EmptyTail { from, to } => {
                write!(
                    f,
                    "no set points on spheres {from}..={to}; no rate to estimate"
                )
            }
            SetsError::UnsupportedTupleLen { given } => {
                write!(
                    f,
                    "product tuples of length {given} are not supported (use 2 or 3)"
                )
            }
            SetsError::ZeroFamilyIndex => write!(f, "sparse families are indexed from 1"),
            SetsError::Word(e) => write!(f, "{e}"),
            SetsError::Ray(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SetsError {}

impl From<WordError> for SetsError {
    fn from(e: WordError) -> Self {
        SetsError::Word(e)
    }
}

impl From<RayError> for SetsError {
    fn from(e: RayError) -> Self {
        SetsError::Ray(e)
    }
}

/// Errors from parsing a [`SubsetSpec`] text form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SpecParseError {
    UnknownKind { kind: String },
    BadPayload { kind: &'static str, detail: String },
    Word(WordError),
    Ray(RayError),
}

impl fmt::Display for SpecParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpecParseError::UnknownKind { kind } => write!(f, "unknown set kind {kind:?}"),
            SpecParseError::BadPayload { kind, detail } => {
                write!(f, "bad payload for {kind:?}: {detail}")
            }
            SpecParseError::Word(e) => write!(f, "{e}"),
            SpecParseError::Ray(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SpecParseError {}

impl From<WordError> for SpecParseError {
    fn from(e: WordError) -> Self {
        SpecParseError::Word(e)
    }
}

impl From<RayError> for SpecParseError {
    fn from(e: RayError) -> Self {
        SpecParseError::Ray(e)
    }
}

/// Send `s₁…s_r` to `s₁…s_{r−1}·s_r^{r+1}` — stretch the last letter so the
/// image has length exactly `2r`. Undefined at the identity.
pub fn sigma_apply(g: &ReducedWord) -> Result<ReducedWord, SetsError> {
    let r = g.len();
    if r == 0 {
        return Err(SetsError::SigmaOfIdentity);
    }
    let letters = g.letters();
    let last = letters[r - 1];
    let mut out = Vec::with_capacity(2 * r);
    out.extend_from_slice(&letters[..r - 1]);
    out.extend(core::iter::repeat_n(last, r + 1));
    Ok(ReducedWord::from_reduced(g.rank(), out))
}

fn mirror_double(u: &ReducedWord) -> ReducedWord {
    let mut out = Vec::with_capacity(2 * u.len());
    out.extend_from_slice(u.letters());
    out.extend(u.letters().iter().rev().copied());
    ReducedWord::from_reduced(u.rank(), out)
}

/// Number of reduced words of the given length that both begin and end with
/// one designated letter. By symmetry the count is the same for every
/// designated letter: with `m = 2d−1`,
/// `(m^{r−1} + (2d−1 if r odd else 1)) / 2d` for `r ≥ 1`, and `0` at `r = 0`.
pub fn begins_ends_count(rank: u8, radius: usize) -> Result<u128, SetsError> {
    check_rank(rank)?;
    if radius == 0 {
        return Ok(0);
    }
    let d = u128::from(rank);
    let m = 2 * d - 1;
    let exponent = u32::try_from(radius - 1).map_err(|_| SetsError::Budget {
        requested: u128::MAX,
    })?;
    let base = m.checked_pow(exponent).ok_or(SetsError::Budget {
        requested: u128::MAX,
    })?;
    let adjust = if radius % 2 == 1 { 2 * d - 1 } else { 1 };
    let numerator = base.checked_add(adjust).ok_or(SetsError::Budget {
        requested: u128::MAX,
    })?;
    debug_assert_eq!(numerator % (2 * d), 0, "closed count must divide exactly");
    Ok(numerator / (2 * d))
}

/// |S_r| as an exact count: `2d·(2d−1)^{r−1}`. Unlike [`sphere_size`], which
/// may saturate because it only ever feeds enumeration-budget checks (where
/// saturation is conservative), this fails loudly when the count overflows.
fn checked_sphere_size(rank: u8, radius: usize) -> Result<u128, SetsError> {
    if radius == 0 {
        return Ok(1);
    }
    let two_d = 2 * u128::from(rank);
    let overflow = || SetsError::Budget {
        requested: u128::MAX,
    };
    let exponent = u32::try_from(radius - 1).map_err(|_| overflow())?;
    (two_d - 1)
        .checked_pow(exponent)
        .and_then(|p| p.checked_mul(two_d))
        .ok_or_else(overflow)
}

/// Sphere radii `2^{pair(index, m)}` of the sparse family that fit inside
/// `radius`, where `pair` walks the diagonals `(index+m)` of ℕ² so distinct
/// family indices never share a block radius.
fn injection_block_radii(index: u32, radius: usize) -> Vec<usize> {
    let n = u64::from(index);
    let mut out = Vec::new();
    for m in 1u64.. {
        let r = (n + m - 2) * (n + m - 1) / 2 + m;
        if r >= u64::from(usize::BITS) {
            break;
        }
        let block = 1usize << r;
        if block > radius {
            break;
        }
        out.push(block);
    }
    out
}

/// The identity plus, for each block radius `2^{pair(index, m)} ≤ radius`,
/// all sphere words beginning and ending with the first generator. Blocks
/// beyond `sphere_cap` cannot be enumerated and fail loudly.
pub fn sparse_block_family(
    rank: u8,
    index: u32,
    radius: usize,
    sphere_cap: usize,
) -> Result<BTreeSet<ReducedWord>, SetsError> {
    check_rank(rank)?;
    if index == 0 {
        return Err(SetsError::ZeroFamilyIndex);
    }
    let designated = Letter::generator(0);
    let mut out = BTreeSet::new();
    out.insert(ReducedWord::identity(rank));
    for block in injection_block_radii(index, radius) {
        if block > sphere_cap {
            return Err(SetsError::Budget {
                requested: sphere_size(rank, block),
            });
        }
        for g in sphere(rank, block)? {
            if g.first() == Some(designated) && g.last() == Some(designated) {
                out.insert(g);
            }
        }
    }
    Ok(out)
}

/// A describable family of group elements.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SubsetSpec {
    /// A finite list given outright.
    Explicit {
        rank: u8,
        words: BTreeSet<ReducedWord>,
    },
    /// Image of the suffix-stretching map (all lengths even; optionally with
    /// the identity adjoined).
    SigmaSuffix { rank: u8, include_identity: bool },
    /// Even-length palindromes `u · reverse(u)` (optionally with the
    /// identity adjoined).
    Palindromes { rank: u8, include_identity: bool },
    /// All finite prefixes of one infinite reduced word.
    RayPrefixes { ray: RaySpec },
    /// Words beginning and ending with a designated letter.
    BeginsEndsWith { rank: u8, letter: Letter },
    /// The sparse union-of-spheres family used in the product-injectivity
    /// experiment.
    InjectionFamily {
        rank: u8,
        index: u32,
        sphere_cap: usize,
    },
}

impl SubsetSpec {
    /// The rank `d` of the underlying free group.
    pub fn rank(&self) -> u8 {
        match self {
            SubsetSpec::Explicit { rank, .. }
            | SubsetSpec::SigmaSuffix { rank, .. }
            | SubsetSpec::Palindromes { rank, .. }
            | SubsetSpec::BeginsEndsWith { rank, .. }
            | SubsetSpec::InjectionFamily { rank, .. } => *rank,
            SubsetSpec::RayPrefixes { ray } => ray.rank(),
        }
    }

    /// Parse the compact text form:
    /// `explicit:a,ab` · `sigma` · `sigma:e` · `palindromes` ·
    /// `palindromes:e` · `rayprefix:PREFIX|PERIOD` · `aaa:LETTER` ·
    /// `an:INDEX` · `an:INDEX:CAP`.
    pub fn parse(rank: u8, text: &str) -> Result<Self, SpecParseError> {
        check_rank(rank)?;
        let text = text.trim();
        let (kind, payload) = match text.split_once(':') {
            Some((k, p)) => (k, Some(p)),
            None => (text, None),
        };
        match kind {
            "explicit" => {
                let payload = payload.ok_or(SpecParseError::BadPayload {
                    kind: "explicit",
                    detail: "expected a comma-separated word list".to_string(),
                })?;
                let mut words = BTreeSet::new();
                for part in payload.split(',') {
                    words.insert(ReducedWord::parse(rank, part)?);
                }
                Ok(SubsetSpec::Explicit { rank, words })
            }
            "sigma" | "palindromes" => {
                let include_identity = match payload {
                    None => false,
                    Some("e") => true,
                    Some(other) => {
                        return Err(SpecParseError::BadPayload {
                            kind: if kind == "sigma" {
                                "sigma"
                            } else {
                                "palindromes"
                            },
                            detail: alloc::format!("expected no payload or \"e\", got {other:?}"),
                        });
                    }
                };
                if kind == "sigma" {
                    Ok(SubsetSpec::SigmaSuffix {
                        rank,
                        include_identity,
                    })
                } else {
                    Ok(SubsetSpec::Palindromes {
                        rank,
                        include_identity,
                    })
                }
            }
            "rayprefix" => {
                let payload = payload.ok_or(SpecParseError::BadPayload {
                    kind: "rayprefix",
                    detail: "expected PREFIX|PERIOD".to_string(),
                })?;
                Ok(SubsetSpec::RayPrefixes {
                    ray: RaySpec::parse(rank, payload)?,
                })
            }
            "aaa" => {
                let payload = payload.ok_or(SpecParseError::BadPayload {
                    kind: "aaa",
                    detail: "expected a single letter".to_string(),
                })?;
                let word = ReducedWord::parse(rank, payload)?;
                if word.len() != 1 {
                    return Err(SpecParseError::BadPayload {
                        kind: "aaa",
                        detail: alloc::format!("expected a single letter, got {payload:?}"),
                    });
                }
                Ok(SubsetSpec::BeginsEndsWith {
                    rank,
                    letter: word.first().expect("length 1"),
                })
            }
            "an" => {
                let payload = payload.ok_or(SpecParseError::BadPayload {
                    kind: "an",
                    detail: "expected INDEX or INDEX:CAP".to_string(),
                })?;
                let (index_text, cap_text) = match payload.split_once(':') {
                    Some((i, c)) => (i, Some(c)),
                    None => (payload, None),
                };
                let index: u32 = index_text.parse().map_err(|_| SpecParseError::BadPayload {
                    kind: "an",
                    detail: alloc::format!("not a family index: {index_text:?}"),
                })?;
                if index == 0 {
                    return Err(SpecParseError::BadPayload {
                        kind: "an",
                        detail: "family indices start at 1".to_string(),
                    });
                }
                let sphere_cap = match cap_text {
                    None => DEFAULT_SPHERE_CAP,
                    Some(c) => c.parse().map_err(|_| SpecParseError::BadPayload {
                        kind: "an",
                        detail: alloc::format!("not a sphere cap: {c:?}"),
                    })?,
                };
                Ok(SubsetSpec::InjectionFamily {
                    rank,
                    index,
                    sphere_cap,
                })
            }
            other => Err(SpecParseError::UnknownKind {
                kind: other.to_string(),
            }),
        }
    }

    /// All family members of length at most `radius`.
    pub fn materialize(&self, radius: usize) -> Result<BTreeSet<ReducedWord>, SetsError> {
        match self {
            SubsetSpec::Explicit { words, .. } => Ok(words
                .iter()
                .filter(|w| w.len() <= radius)
                .cloned()
                .collect()),
            SubsetSpec::SigmaSuffix {
                rank,
                include_identity,
            } => {
                let mut out = BTreeSet::new();
                if *include_identity {
                    out.insert(ReducedWord::identity(*rank));
                }
                for u in ball(*rank, radius / 2)? {
                    if !u.is_identity() {
                        out.insert(sigma_apply(&u)?);
                    }
                }
                Ok(out)
            }
            SubsetSpec::Palindromes {
                rank,
                include_identity,
            } => {
                let mut out = BTreeSet::new();
                if *include_identity {
                    out.insert(ReducedWord::identity(*rank));
                }
                for u in ball(*rank, radius / 2)? {
                    if !u.is_identity() {
                        out.insert(mirror_double(&u));
                    }
                }
                Ok(out)
            }
            SubsetSpec::RayPrefixes { ray } => {
                Ok((0..=radius).map(|r| ray.word_prefix(r)).collect())
            }
            SubsetSpec::BeginsEndsWith { rank, letter } => {
                let mut out = BTreeSet::new();
                for g in ball(*rank, radius)? {
                    if g.first() == Some(*letter) && g.last() == Some(*letter) {
                        out.insert(g);
                    }
                }
                Ok(out)
            }
            SubsetSpec::InjectionFamily {
                rank,
                index,
                sphere_cap,
            } => sparse_block_family(*rank, *index, radius, *sphere_cap),
        }
    }

    /// How many family members have length exactly `radius`, without
    /// materializing (each branch is pinned against [`Self::materialize`] in
    /// tests).
    pub fn count_at(&self, radius: usize) -> Result<u128, SetsError> {
        match self {
            SubsetSpec::Explicit { words, .. } => {
                Ok(words.iter().filter(|w| w.len() == radius).count() as u128)
            }
            SubsetSpec::SigmaSuffix {
                rank,
                include_identity,
            }
            | SubsetSpec::Palindromes {
                rank,
                include_identity,
            } => {
                // Both families are injective images of the half-radius
                // sphere, so they share their counting profile.
                if radius == 0 {
                    Ok(u128::from(*include_identity))
                } else if radius % 2 == 1 {
                    Ok(0)
                } else {
                    checked_sphere_size(*rank, radius / 2)
                }
            }
            SubsetSpec::RayPrefixes { .. } => Ok(1),
            SubsetSpec::BeginsEndsWith { rank, .. } => begins_ends_count(*rank, radius),
            SubsetSpec::InjectionFamily { rank, index, .. } => {
                if radius == 0 {
                    Ok(1)
                } else if injection_block_radii(*index, radius).last() == Some(&radius) {
                    begins_ends_count(*rank, radius)
                } else {
                    Ok(0)
                }
            }
        }
    }
}

impl fmt::Display for SubsetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetSpec::Explicit { words, .. } => {
                write!(f, "explicit:")?;
                for (i, w) in words.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
            SubsetSpec::SigmaSuffix {
                include_identity, ..
            } => {
                if *include_identity {
                    write!(f, "sigma:e")
                } else {
                    write!(f, "sigma")
                }
            }
            SubsetSpec::Palindromes {
                include_identity, ..
            } => {
                if *include_identity {
                    write!(f, "palindromes:e")
                } else {
                    write!(f, "palindromes")
                }
            }
            SubsetSpec::RayPrefixes { ray } => write!(f, "rayprefix:{ray}"),
            SubsetSpec::BeginsEndsWith { letter, .. } => write!(f, "aaa:{letter}"),
            SubsetSpec::InjectionFamily {
                index, sphere_cap, ..
            } => {
                write!(f, "an:{index}:{sphere_cap}")
            }
        }
    }
}

/// Per-sphere counts of a family and crude growth-rate estimates read off
/// the upper half of the horizon.
#[derive(Clone, PartialEq, Debug)]
pub struct GrowthReport {
    pub radii: Vec<usize>,
    pub counts: Vec<u128>,
    /// Smallest `count^{1/r}` over nonempty spheres in the tail.
    pub lower_estimate: f64,
    /// Largest `count^{1/r}` over nonempty spheres in the tail.
    pub upper_estimate: f64,
}

/// Count the family sphere by sphere up to `r_max` (at least 4) and estimate
/// its exponential growth rate from the tail `r ∈ (r_max/2, r_max]`.
pub fn growth_rates(spec: &SubsetSpec, r_max: usize) -> Result<GrowthReport, SetsError> {
    const MINIMUM: usize = 4;
    if r_max < MINIMUM {
        return Err(SetsError::RadiusTooSmall {
            given: r_max,
            minimum: MINIMUM,
        });
    }
    let counts: Vec<u128> = (0..=r_max)
        .map(|r| spec.count_at(r))
        .collect::<Result<_, _>>()?;
    let from = r_max / 2 + 1;
    let mut lower = f64::INFINITY;
    let mut upper = 0.0f64;
    let mut seen = false;
    for (r, &count) in counts.iter().enumerate().take(r_max + 1).skip(from) {
        if count == 0 {
            continue;
        }
        seen = true;
        let est = libm::pow(count as f64, 1.0 / r as f64);
        if est < lower {
            lower = est;
        }
        if est > upper {
            upper = est;
        }
    }
    if !seen {
        return Err(SetsError::EmptyTail { from, to: r_max });
    }
    Ok(GrowthReport {
        radii: (0..=r_max).collect(),
        counts,
        lower_estimate: lower,
        upper_estimate: upper,
    })
}

/// Outcome of multiplying the sparse families elementwise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InjectivityReport {
    pub tuple_len: usize,
    pub radius: usize,
    /// Materialized sizes of the families in index order.
    pub family_sizes: Vec<usize>,
    /// Number of tuples multiplied out.
    pub products: usize,
    /// Tuples whose product collided with an earlier tuple's product.
    pub collisions: usize,
    /// Tuples where the product length fell short of the summed lengths
    /// (i.e. some cancellation occurred at a junction).
    pub additivity_failures: usize,
}

impl InjectivityReport {
    /// The experiment passes when the product map is injective on the
    /// sampled tuples.
    pub fn passed(&self) -> bool {
        self.collisions == 0
    }
}

/// Multiply out every tuple `(x₁, …, x_t)` with `x_i` from the `i`-th sparse
/// family inside the given ball, and report collisions and length
/// cancellations. The block radii of distinct families are distinct powers
/// of two, so products should recover their factors.
pub fn psi_injectivity_test(
    rank: u8,
    tuple_len: usize,
    radius: usize,
    sphere_cap: usize,
) -> Result<InjectivityReport, SetsError> {
    if !(2..=3).contains(&tuple_len) {
        return Err(SetsError::UnsupportedTupleLen { given: tuple_len });
    }
    let families: Vec<Vec<ReducedWord>> = (1..=tuple_len as u32)
        .map(|index| {
            sparse_block_family(rank, index, radius, sphere_cap).map(|s| s.into_iter().collect())
        })
        .collect::<Result<_, _>>()?;
    let family_sizes: Vec<usize> = families.iter().map(Vec::len).collect();

    let mut seen = BTreeSet::new();
    let mut products = 0usize;
    let mut collisions = 0usize;
    let mut additivity_failures = 0usize;
    let identity = ReducedWord::identity(rank);
    let mut tuple_product = |parts: &[&ReducedWord]| {
        let mut acc = identity.clone();
        let mut length_sum = 0usize;
        for part in parts {
            acc = acc.mul(part);
            length_sum += part.len();
        }
        products += 1;
        if acc.len() != length_sum {
            additivity_failures += 1;
        }
        if !seen.insert(acc) {
            collisions += 1;
        }
    };
    if tuple_len == 2 {
        for x in &families[0] {
            for y in &families[1] {
                tuple_product(&[x, y]);
            }
        }
    } else {
        for x in &families[0] {
            for y in &families[1] {
                for z in &families[2] {
                    tuple_product(&[x, y, z]);
                }
            }
        }
    }
    Ok(InjectivityReport {
        tuple_len,
        radius,
        family_sizes,
        products,
        collisions,
        additivity_failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn w(text: &str) -> ReducedWord {
        ReducedWord::parse(2, text).unwrap()
    }

    #[test]
    fn suffix_stretching_doubles_the_length() {
        assert_eq!(sigma_apply(&w("a")).unwrap(), w("aa"));
        assert_eq!(sigma_apply(&w("ab")).unwrap(), w("abbb"));
        assert_eq!(sigma_apply(&w("aB")).unwrap(), w("aBBB"));
        assert_eq!(sigma_apply(&w("abA")).unwrap(), w("abAAAA"));
        assert_eq!(sigma_apply(&w("AA")).unwrap(), w("AAAA"));
        assert_eq!(sigma_apply(&w("e")), Err(SetsError::SigmaOfIdentity));
        for g in ball(2, 4).unwrap() {
            if !g.is_identity() {
                assert_eq!(sigma_apply(&g).unwrap().len(), 2 * g.len(), "at {g}");
            }
        }
    }

    #[test]
    fn stretched_family_bijects_with_the_half_ball() {
        let without = SubsetSpec::parse(2, "sigma").unwrap();
        let with = SubsetSpec::parse(2, "sigma:e").unwrap();
        assert_eq!(without.materialize(4).unwrap().len(), 16);
        let set = with.materialize(4).unwrap();
        assert_eq!(
            set.len(),
            17,
            "identity plus images of the 16 nontrivial half-ball words"
        );
        assert!(set.contains(&w("abbb")));
        assert!(set.iter().all(|g| g.len() % 2 == 0));
        // Ball-for-ball: images of B_r fill the family inside B_{2r}.
        assert_eq!(
            with.materialize(12).unwrap().len() as u128,
            crate::word::ball_size(2, 6)
        );
    }

    #[test]
    fn palindrome_family_members_read_both_ways() {
        let spec = SubsetSpec::parse(2, "palindromes").unwrap();
        let set = spec.materialize(4).unwrap();
        assert_eq!(set.len(), 16);
        assert!(set.contains(&w("abba")));
        assert!(set.contains(&w("aa")));
        for g in &set {
            let letters = g.letters();
            assert!(
                letters.iter().eq(letters.iter().rev()),
                "{g} is not a palindrome"
            );
        }
    }

    #[test]
    fn ray_prefix_family_is_one_point_per_radius() {
        let spec = SubsetSpec::parse(2, "rayprefix:e|ab").unwrap();
        let set = spec.materialize(3).unwrap();
        let expect: BTreeSet<ReducedWord> = ["e", "a", "ab", "aba"].iter().map(|t| w(t)).collect();
        assert_eq!(set, expect);
    }

    #[test]
    fn pinned_end_words_and_their_closed_count() {
        let spec = SubsetSpec::parse(2, "aaa:a").unwrap();
        let set = spec.materialize(3).unwrap();
        let expect: BTreeSet<ReducedWord> = ["a", "aa", "aaa", "aba", "aBa"]
            .iter()
            .map(|t| w(t))
            .collect();
        assert_eq!(set, expect);
        // Frozen values for rank 2.
        let closed: Vec<u128> = (0..=8).map(|r| begins_ends_count(2, r).unwrap()).collect();
        assert_eq!(closed, [0, 1, 1, 3, 7, 21, 61, 183, 547]);
        // Closed form versus enumeration, both ranks, any designated letter.
        for rank in [2u8, 3] {
            for radius in 0..=7usize {
                let by_formula = begins_ends_count(rank, radius).unwrap();
                for letter in [Letter::generator(0), Letter::new(1, true)] {
                    let by_enum = sphere(rank, radius)
                        .unwrap()
                        .into_iter()
                        .filter(|g| g.first() == Some(letter) && g.last() == Some(letter))
                        .count() as u128;
                    assert_eq!(by_enum, by_formula, "rank {rank}, radius {radius}");
                }
            }
        }
    }

    #[test]
    fn sparse_families_assemble_their_blocks() {
        // Index 1 inside B_8: identity, the radius-2 block, the radius-8 block.
        let one = sparse_block_family(2, 1, 8, 12).unwrap();
        assert_eq!(one.len(), 549);
        assert!(one.contains(&w("e")));
        assert!(one.contains(&w("aa")));
        assert_eq!(one.iter().filter(|g| g.len() == 8).count(), 547);
        // Index 2 inside B_8: identity plus the radius-4 block.
        let two = sparse_block_family(2, 2, 8, 12).unwrap();
        assert_eq!(two.len(), 8);
        assert_eq!(two.iter().filter(|g| g.len() == 4).count(), 7);
        // Index 3's first block is radius 16: nothing inside B_8 but e.
        let three = sparse_block_family(2, 3, 8, 12).unwrap();
        assert_eq!(three.len(), 1);
        // A block inside the radius but beyond the cap fails loudly.
        assert!(matches!(
            sparse_block_family(2, 1, 64, 12),
            Err(SetsError::Budget { .. })
        ));
        assert_eq!(
            sparse_block_family(2, 0, 4, 12),
            Err(SetsError::ZeroFamilyIndex)
        );
    }

    #[test]
    fn per_sphere_counts_match_materialization() {
        let specs = [
            SubsetSpec::parse(2, "explicit:a,ab,BA,bab").unwrap(),
            SubsetSpec::parse(2, "sigma").unwrap(),
            SubsetSpec::parse(2, "sigma:e").unwrap(),
            SubsetSpec::parse(2, "palindromes:e").unwrap(),
            SubsetSpec::parse(2, "rayprefix:ba|aab").unwrap(),
            SubsetSpec::parse(2, "aaa:b").unwrap(),
            SubsetSpec::parse(2, "an:1").unwrap(),
            SubsetSpec::parse(2, "an:2").unwrap(),
            SubsetSpec::parse(3, "sigma:e").unwrap(),
            SubsetSpec::parse(3, "aaa:C").unwrap(),
        ];
        for spec in &specs {
            let set = spec.materialize(8).unwrap();
            for radius in 0..=8usize {
                let counted = spec.count_at(radius).unwrap();
                let materialized = set.iter().filter(|g| g.len() == radius).count() as u128;
                assert_eq!(counted, materialized, "spec {spec}, radius {radius}");
            }
        }
    }

    #[test]
    fn closed_counts_fail_loudly_instead_of_saturating() {
        // 4·3^79 is the last rank-2 sphere count that fits in u128; past it an
        // exact count must refuse, not clamp.
        let sigma = SubsetSpec::parse(2, "sigma").unwrap();
        assert_eq!(sigma.count_at(2 * 80).unwrap(), 4 * 3u128.pow(79));
        assert!(matches!(
            sigma.count_at(2 * 81),
            Err(SetsError::Budget { .. })
        ));
        assert!(matches!(
            begins_ends_count(2, 200),
            Err(SetsError::Budget { .. })
        ));
    }

    #[test]
    fn growth_estimates_bracket_the_expected_rates() {
        let sigma = SubsetSpec::parse(2, "sigma:e").unwrap();
        let report = growth_rates(&sigma, 8).unwrap();
        assert_eq!(report.counts[6], 36);
        assert_eq!(report.counts[7], 0);
        assert_eq!(report.counts[8], 108);
        assert!(report.lower_estimate <= report.upper_estimate);
        assert!(report.lower_estimate > 1.6 && report.upper_estimate < 1.9);
        // One point per sphere: rate 1.
        let thin = SubsetSpec::parse(2, "rayprefix:e|a").unwrap();
        let thin_report = growth_rates(&thin, 6).unwrap();
        assert_eq!(thin_report.lower_estimate, 1.0);
        assert_eq!(thin_report.upper_estimate, 1.0);
        assert!(matches!(
            growth_rates(&sigma, 3),
            Err(SetsError::RadiusTooSmall {
                given: 3,
                minimum: 4
            })
        ));
        // Sparse family with an empty tail half: nothing to estimate.
        let an2 = SubsetSpec::parse(2, "an:2").unwrap();
        assert!(matches!(
            growth_rates(&an2, 8),
            Err(SetsError::EmptyTail { from: 5, to: 8 })
        ));
    }

    #[test]
    fn product_map_on_sparse_families_is_injective_here() {
        let report = psi_injectivity_test(2, 2, 8, 12).unwrap();
        assert_eq!(report.family_sizes, [549, 8]);
        assert_eq!(report.products, 4392);
        assert_eq!(report.collisions, 0);
        assert_eq!(report.additivity_failures, 0);
        assert!(report.passed());
        let triple = psi_injectivity_test(2, 3, 8, 12).unwrap();
        assert_eq!(
            report.products, triple.products,
            "third family is just {{e}} here"
        );
        assert!(triple.passed());
        assert_eq!(
            psi_injectivity_test(2, 4, 8, 12),
            Err(SetsError::UnsupportedTupleLen { given: 4 })
        );
    }

    #[test]
    fn text_forms_round_trip() {
        for text in [
            "explicit:a,ab",
            "sigma",
            "sigma:e",
            "palindromes",
            "palindromes:e",
            "rayprefix:ba|aab",
            "aaa:b",
            "aaa:B",
            "an:2:12",
            "an:1:10",
        ] {
            let spec = SubsetSpec::parse(2, text).unwrap();
            assert_eq!(spec.to_string(), text, "canonical form must round-trip");
            assert_eq!(SubsetSpec::parse(2, &spec.to_string()).unwrap(), spec);
        }
        // Default cap is filled in and then rendered explicitly.
        assert_eq!(SubsetSpec::parse(2, "an:2").unwrap().to_string(), "an:2:12");
        assert!(matches!(
            SubsetSpec::parse(2, "sigma:x"),
            Err(SpecParseError::BadPayload { kind: "sigma", .. })
        ));
        assert!(matches!(
            SubsetSpec::parse(2, "frob"),
            Err(SpecParseError::UnknownKind { .. })
        ));
        assert!(matches!(
            SubsetSpec::parse(2, "aaa:ab"),
            Err(SpecParseError::BadPayload { kind: "aaa", .. })
        ));
        assert!(matches!(
            SubsetSpec::parse(2, "an:0"),
            Err(SpecParseError::BadPayload { .. })
        ));
        assert!(
            SubsetSpec::parse(2, "aaa:c").is_err(),
            "letter outside the rank"
        );
        assert!(
            SubsetSpec::parse(2, "rayprefix:abc").is_err(),
            "missing separator"
        );
    }
}
