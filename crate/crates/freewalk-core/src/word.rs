//! Reduced words in the free group F_d and exact sphere/ball enumeration.
//!
//! Letters carry a generator index and an inverse flag and are totally ordered
//! a < a⁻¹ < b < b⁻¹ < …; this single order fixes every enumeration in the
//! crate. Words serialize as `a`/`A` pairs (uppercase = inverse), with `e` for
//! the identity. A [`ReducedWord`] is freely reduced by construction.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Smallest supported free-group rank.
pub const MIN_RANK: u8 = 2;
/// Largest supported free-group rank (limited by the `a`..`z` alphabet).
pub const MAX_RANK: u8 = 26;

/// Hard cap on the number of words any single enumeration may materialize.
///
/// Exceeding it is reported as an error rather than attempted; the CLI maps
/// such errors to its budget exit code.
pub const ENUMERATION_BUDGET: u64 = 20_000_000;

/// One generator or inverse generator of F_d.
///
/// Internally a single code `2·index + inverse_bit`, so the derived order is
/// exactly a < a⁻¹ < b < b⁻¹ < ….
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Letter(u8);

impl Letter {
    /// Letter for generator `index` (0-based), inverse if `inverse` is set.
    ///
    /// Panics if `index` is not below [`MAX_RANK`]; rank-dependent validation
    /// happens when letters enter a word.
    pub fn new(index: u8, inverse: bool) -> Self {
        assert!(index < MAX_RANK, "generator index {index} out of alphabet");
        Letter(index * 2 + u8::from(inverse))
    }

    /// The positive generator with the given 0-based index.
    pub fn generator(index: u8) -> Self {
        Self::new(index, false)
    }

    /// 0-based generator index.
    pub fn index(self) -> u8 {
        self.0 / 2
    }

    /// Whether this is an inverse generator.
    pub fn is_inverse(self) -> bool {
        self.0 % 2 == 1
    }

    /// The inverse letter.
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// Position in the letter order (0 = `a`, 1 = `a⁻¹`, 2 = `b`, …).
    pub fn code(self) -> u8 {
        self.0
    }

    pub(crate) fn from_code(code: u8) -> Self {
        assert!(code < 2 * MAX_RANK);
        Letter(code)
    }

    /// Serialized character: lowercase generator, uppercase inverse.
    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        char::from(base + self.index())
    }

    /// Parse a single serialized letter character.
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'a'..='z' => Some(Self::new(c as u8 - b'a', false)),
            'A'..='Z' => Some(Self::new(c as u8 - b'A', true)),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// Errors from word construction, parsing and enumeration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WordError {
    /// Rank outside `2..=26`.
    InvalidRank { rank: u8 },
    /// A letter's generator index is not below the word's rank.
    LetterOutOfRange { letter: Letter, rank: u8 },
    /// A character outside `a..z`/`A..Z` (or a stray `e`) in serialized text.
    BadCharacter { ch: char },
    /// Empty text where a word was expected (write `e` for the identity).
    EmptyText,
    /// The enumeration would exceed [`ENUMERATION_BUDGET`] words.
    EnumerationBudget { requested: u128 },
}

impl fmt::Display for WordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordError::InvalidRank { rank } => {
                write!(
                    f,
                    "rank {rank} outside supported range {MIN_RANK}..={MAX_RANK}"
                )
            }
            WordError::LetterOutOfRange { letter, rank } => {
                write!(f, "letter {letter} needs generator index < {rank}")
            }
            WordError::BadCharacter { ch } => write!(f, "character {ch:?} is not a letter"),
            WordError::EmptyText => write!(f, "empty text; write \"e\" for the identity"),
            WordError::EnumerationBudget { requested } => {
                write!(
                    f,
                    "enumeration of {requested} words exceeds budget {ENUMERATION_BUDGET}"
                )
            }
        }
    }
}

impl core::error::Error for WordError {}

pub(crate) fn check_rank(rank: u8) -> Result<(), WordError> {
    if (MIN_RANK..=MAX_RANK).contains(&rank) {
        Ok(())
    } else {
        Err(WordError::InvalidRank { rank })
    }
}

/// A freely reduced word in F_d, tagged with its rank `d`.
///
/// Ordered shortlex (rank, then length, then letter order), which is the
/// enumeration order used by [`sphere`] and [`ball`].
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ReducedWord {
    rank: u8,
    letters: Vec<Letter>,
}

impl ReducedWord {
    /// The identity `e` of F_rank. Panics on an unsupported rank.
    pub fn identity(rank: u8) -> Self {
        check_rank(rank).expect("supported rank");
        ReducedWord {
            rank,
            letters: Vec::new(),
        }
    }

    /// Freely reduce a letter sequence.
    pub fn reduce(rank: u8, letters: &[Letter]) -> Result<Self, WordError> {
        check_rank(rank)?;
        let mut stack: Vec<Letter> = Vec::with_capacity(letters.len());
        for &l in letters {
            if l.index() >= rank {
                return Err(WordError::LetterOutOfRange { letter: l, rank });
            }
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Ok(ReducedWord {
            rank,
            letters: stack,
        })
    }

    /// Internal constructor for letter sequences already known to be reduced
    /// and within rank.
    pub(crate) fn from_reduced(rank: u8, letters: Vec<Letter>) -> Self {
        debug_assert!(
            letters.windows(2).all(|w| w[1] != w[0].inverse())
                && letters.iter().all(|l| l.index() < rank)
        );
        ReducedWord { rank, letters }
    }

    /// Parse serialized text (`"e"` or a string of letter characters) and
    /// freely reduce it.
    pub fn parse(rank: u8, text: &str) -> Result<Self, WordError> {
        check_rank(rank)?;
        let text = text.trim();
        if text.is_empty() {
            return Err(WordError::EmptyText);
        }
        if text == "e" {
            return Ok(Self::identity(rank));
        }
        let mut letters = Vec::with_capacity(text.len());
        for ch in text.chars() {
            let l = Letter::from_char(ch).ok_or(WordError::BadCharacter { ch })?;
            letters.push(l);
        }
        Self::reduce(rank, &letters)
    }

    /// The rank `d` this word lives in.
    pub fn rank(&self) -> u8 {
        self.rank
    }

    /// Word length |g|. The "empty" check is [`Self::is_identity`].
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    /// Whether this is the identity.
    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// The letters, in order.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// First letter, if any.
    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    /// Last letter, if any.
    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    /// The prefix consisting of the first `n` letters. Panics if `n > len`.
    pub fn prefix(&self, n: usize) -> Self {
        assert!(n <= self.len(), "prefix length out of range");
        ReducedWord {
            rank: self.rank,
            letters: self.letters[..n].to_vec(),
        }
    }

    /// Group product with free cancellation at the junction.
    ///
    /// Both operands must share a rank (mixing ranks is a programming error).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.rank, other.rank, "rank mismatch in word product");
        let mut i = self.letters.len();
        let mut j = 0usize;
        while i > 0 && j < other.letters.len() && self.letters[i - 1] == other.letters[j].inverse()
        {
            i -= 1;
            j += 1;
        }
        let mut letters = Vec::with_capacity(i + other.letters.len() - j);
        letters.extend_from_slice(&self.letters[..i]);
        letters.extend_from_slice(&other.letters[j..]);
        ReducedWord {
            rank: self.rank,
            letters,
        }
    }

    /// Group inverse (reverse the letters and invert each).
    pub fn inv(&self) -> Self {
        let letters = self.letters.iter().rev().map(|l| l.inverse()).collect();
        ReducedWord {
            rank: self.rank,
            letters,
        }
    }

    /// Append one letter with cancellation.
    pub fn push(&self, l: Letter) -> Result<Self, WordError> {
        if l.index() >= self.rank {
            return Err(WordError::LetterOutOfRange {
                letter: l,
                rank: self.rank,
            });
        }
        let mut letters = self.letters.clone();
        if letters.last() == Some(&l.inverse()) {
            letters.pop();
        } else {
            letters.push(l);
        }
        Ok(ReducedWord {
            rank: self.rank,
            letters,
        })
    }
}

impl PartialOrd for ReducedWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ReducedWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then_with(|| self.letters.len().cmp(&other.letters.len()))
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "e");
        }
        let mut s = String::with_capacity(self.letters.len());
        for l in &self.letters {
            s.push(l.to_char());
        }
        write!(f, "{s}")
    }
}

/// |S_r| = 2d(2d−1)^{r−1} for r ≥ 1, else 1.
pub fn sphere_size(rank: u8, radius: usize) -> u128 {
    if radius == 0 {
        return 1;
    }
    let two_d = 2 * u128::from(rank);
    let mut size = two_d;
    for _ in 1..radius {
        size = size.saturating_mul(two_d - 1);
    }
    size
}

/// |B_r| = 1 + Σ_{i≤r} |S_i|.
pub fn ball_size(rank: u8, radius: usize) -> u128 {
    (0..=radius).fold(0u128, |acc, r| acc.saturating_add(sphere_size(rank, r)))
}

fn budget_check(words: u128) -> Result<(), WordError> {
    if words > u128::from(ENUMERATION_BUDGET) {
        Err(WordError::EnumerationBudget { requested: words })
    } else {
        Ok(())
    }
}

/// All reduced words of length exactly `radius`, in lexicographic letter order.
pub fn sphere(rank: u8, radius: usize) -> Result<Vec<ReducedWord>, WordError> {
    check_rank(rank)?;
    budget_check(sphere_size(rank, radius))?;
    let mut out = Vec::with_capacity(sphere_size(rank, radius) as usize);
    let mut current: Vec<Letter> = Vec::with_capacity(radius);
    extend_sphere(rank, radius, &mut current, &mut out);
    Ok(out)
}

fn extend_sphere(rank: u8, target: usize, current: &mut Vec<Letter>, out: &mut Vec<ReducedWord>) {
    if current.len() == target {
        out.push(ReducedWord::from_reduced(rank, current.clone()));
        return;
    }
    let banned = current.last().map(|l| l.inverse());
    for code in 0..2 * rank {
        let l = Letter::from_code(code);
        if Some(l) == banned {
            continue;
        }
        current.push(l);
        extend_sphere(rank, target, current, out);
        current.pop();
    }
}

/// All reduced words of length at most `radius`, ordered by length then
/// lexicographically (the crate's shortlex enumeration order).
pub fn ball(rank: u8, radius: usize) -> Result<Vec<ReducedWord>, WordError> {
    check_rank(rank)?;
    budget_check(ball_size(rank, radius))?;
    let mut out = Vec::with_capacity(ball_size(rank, radius) as usize);
    for r in 0..=radius {
        out.extend(sphere(rank, r)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;

    fn w(text: &str) -> ReducedWord {
        ReducedWord::parse(2, text).unwrap()
    }

    #[test]
    fn letter_order_is_a_ainv_b_binv() {
        let a = Letter::new(0, false);
        let a_inv = Letter::new(0, true);
        let b = Letter::new(1, false);
        let b_inv = Letter::new(1, true);
        assert!(a < a_inv && a_inv < b && b < b_inv);
        assert_eq!(a.inverse(), a_inv);
        assert_eq!(a_inv.inverse(), a);
        assert_eq!(format!("{a}{a_inv}{b}{b_inv}"), "aAbB");
    }

    #[test]
    fn reduce_cancels_adjacent_inverses() {
        // a b b⁻¹ a → aa
        let letters = [
            Letter::new(0, false),
            Letter::new(1, false),
            Letter::new(1, true),
            Letter::new(0, false),
        ];
        let word = ReducedWord::reduce(2, &letters).unwrap();
        assert_eq!(word.to_string(), "aa");
        // Full collapse to the identity.
        let letters = [Letter::new(0, false), Letter::new(0, true)];
        assert!(ReducedWord::reduce(2, &letters).unwrap().is_identity());
        // Cascading cancellation: a b b⁻¹ a⁻¹ → e.
        let letters = [
            Letter::new(0, false),
            Letter::new(1, false),
            Letter::new(1, true),
            Letter::new(0, true),
        ];
        assert!(ReducedWord::reduce(2, &letters).unwrap().is_identity());
    }

    #[test]
    fn reduce_rejects_out_of_rank_letters() {
        let c = Letter::new(2, false);
        assert_eq!(
            ReducedWord::reduce(2, &[c]),
            Err(WordError::LetterOutOfRange { letter: c, rank: 2 })
        );
        assert!(ReducedWord::reduce(3, &[c]).is_ok());
    }

    #[test]
    fn parse_and_display_roundtrip() {
        assert_eq!(w("e").to_string(), "e");
        assert_eq!(w("abA").to_string(), "abA");
        // Parsing reduces silently.
        assert_eq!(w("aA").to_string(), "e");
        assert_eq!(w("abBA").to_string(), "e");
        // 'c' is a valid letter character but its generator is out of rank 2.
        assert_eq!(
            ReducedWord::parse(2, "ac"),
            Err(WordError::LetterOutOfRange {
                letter: Letter::new(2, false),
                rank: 2
            })
        );
        assert_eq!(ReducedWord::parse(2, ""), Err(WordError::EmptyText));
        assert_eq!(
            ReducedWord::parse(2, "a?"),
            Err(WordError::BadCharacter { ch: '?' })
        );
    }

    #[test]
    fn mul_cancels_at_the_junction() {
        assert_eq!(w("ab").mul(&w("Ba")).to_string(), "aa");
        assert_eq!(w("ab").mul(&w("BA")).to_string(), "e");
        assert_eq!(w("e").mul(&w("ab")).to_string(), "ab");
        assert_eq!(w("ab").mul(&w("e")).to_string(), "ab");
        // Length parity: |gh| ≡ |g| + |h| (mod 2).
        let g = w("abA");
        let h = w("aB");
        assert_eq!((g.mul(&h).len() + g.len() + h.len()) % 2, 0);
    }

    #[test]
    fn inv_reverses_and_flips() {
        assert_eq!(w("ab").inv().to_string(), "BA");
        assert_eq!(w("e").inv().to_string(), "e");
        let g = w("abAB");
        assert!(g.mul(&g.inv()).is_identity());
        assert!(g.inv().mul(&g).is_identity());
    }

    #[test]
    fn sphere_sizes_match_the_regular_tree() {
        assert_eq!(sphere(2, 0).unwrap().len(), 1);
        assert_eq!(sphere(2, 1).unwrap().len(), 4);
        assert_eq!(sphere(2, 2).unwrap().len(), 12);
        assert_eq!(sphere(3, 2).unwrap().len(), 30);
        assert_eq!(ball(2, 2).unwrap().len(), 17);
        assert_eq!(sphere_size(2, 2), 12);
        assert_eq!(ball_size(2, 6), 1457);
    }

    #[test]
    fn sphere_is_lexicographic_and_ball_shortlex() {
        let s1 = sphere(2, 1).unwrap();
        let rendered: Vec<_> = s1.iter().map(|g| g.to_string()).collect();
        assert_eq!(rendered, ["a", "A", "b", "B"]);
        let b2 = ball(2, 2).unwrap();
        assert!(
            b2.windows(2).all(|p| p[0] < p[1]),
            "ball enumerates in strictly increasing order"
        );
        assert_eq!(b2[0].to_string(), "e");
        assert_eq!(b2[5].to_string(), "aa");
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        assert!(matches!(
            sphere(2, 30),
            Err(WordError::EnumerationBudget { .. })
        ));
        assert!(matches!(
            ball(3, 20),
            Err(WordError::EnumerationBudget { .. })
        ));
    }

    #[test]
    fn shortlex_order_groups_by_length() {
        assert!(w("B") < w("aa"));
        assert!(w("a") < w("A"));
        assert!(w("ab") < w("ba"));
        assert!(w("e") < w("a"));
    }
}
