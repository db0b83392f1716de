//! Free-group words over an indexed generator alphabet.
//!
//! Words are always kept freely reduced. Generators are zero-based internally
//! and print one-based (`x1`, `x2`, ...), matching the textual syntax accepted
//! by [`crate::parse`].

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("generator x{} is outside the alphabet x1..x{rank}", index + 1)]
    OutOfRange { index: u32, rank: u32 },
}

/// A free generator, zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator(pub u32);

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0 + 1)
    }
}

/// A generator or its inverse. Letters order as `x1 < x1^-1 < x2 < ...`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: Generator,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: u32, inverse: bool) -> Self {
        Letter {
            generator: Generator(generator),
            inverse,
        }
    }

    pub fn pos(generator: u32) -> Self {
        Self::new(generator, false)
    }

    pub fn neg(generator: u32) -> Self {
        Self::new(generator, true)
    }

    pub fn inverted(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.generator == other.generator && self.inverse != other.inverse
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "{}^-1", self.generator)
        } else {
            write!(f, "{}", self.generator)
        }
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn generator(index: u32) -> Self {
        GroupWord {
            letters: vec![Letter::pos(index)],
        }
    }

    /// Freely reduces an arbitrary letter sequence. No alphabet check; see
    /// [`FreeGroup::reduce`] for the validating form.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        let mut letters: Vec<Letter> = Vec::new();
        for l in raw {
            match letters.last() {
                Some(&top) if top.cancels(l) => {
                    letters.pop();
                }
                _ => letters.push(l),
            }
        }
        GroupWord { letters }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        // Both inputs are reduced, so cancellation only happens at the seam.
        let mut k = 0;
        let n = self.letters.len();
        while k < n && k < other.letters.len() && self.letters[n - 1 - k].cancels(other.letters[k]) {
            k += 1;
        }
        let mut letters = Vec::with_capacity(n - k + other.letters.len() - k);
        letters.extend_from_slice(&self.letters[..n - k]);
        letters.extend_from_slice(&other.letters[k..]);
        GroupWord { letters }
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord {
            letters: self.letters.iter().rev().map(|l| l.inverted()).collect(),
        }
    }

    /// `a b a^-1 b^-1`.
    pub fn commutator(a: &GroupWord, b: &GroupWord) -> GroupWord {
        a.mul(b).mul(&a.inverse()).mul(&b.inverse())
    }

    /// Canonical representative of `{w, w^-1}`: the smaller of the two.
    pub fn unoriented(&self) -> GroupWord {
        let inv = self.inverse();
        if inv < *self {
            inv
        } else {
            self.clone()
        }
    }

    /// True when `self` and `other` are equal up to inversion.
    pub fn same_loop(&self, other: &GroupWord) -> bool {
        self == other || *self == other.inverse()
    }

    /// One more than the largest generator index used, or 0 for the identity.
    pub fn min_rank(&self) -> u32 {
        self.letters.iter().map(|l| l.generator.0 + 1).max().unwrap_or(0)
    }
}

/// Shortlex: shorter words first, ties broken letter by letter.
impl Ord for GroupWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters
            .len()
            .cmp(&other.letters.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for GroupWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for GroupWord {
    type Err = crate::parse::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::parse::parse_word(s)
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The free group on `rank` generators; validates words against its alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeGroup {
    pub rank: u32,
}

impl FreeGroup {
    pub fn new(rank: u32) -> Self {
        FreeGroup { rank }
    }

    pub fn check_letter(&self, l: Letter) -> Result<(), WordError> {
        if l.generator.0 < self.rank {
            Ok(())
        } else {
            Err(WordError::OutOfRange {
                index: l.generator.0,
                rank: self.rank,
            })
        }
    }

    pub fn check(&self, w: &GroupWord) -> Result<(), WordError> {
        w.letters.iter().try_for_each(|&l| self.check_letter(l))
    }

    pub fn reduce<I: IntoIterator<Item = Letter>>(&self, raw: I) -> Result<GroupWord, WordError> {
        let raw: Vec<Letter> = raw.into_iter().collect();
        raw.iter().try_for_each(|&l| self.check_letter(l))?;
        Ok(GroupWord::from_letters(raw))
    }

    pub fn multiply(&self, a: &GroupWord, b: &GroupWord) -> Result<GroupWord, WordError> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.mul(b))
    }

    pub fn invert(&self, a: &GroupWord) -> Result<GroupWord, WordError> {
        self.check(a)?;
        Ok(a.inverse())
    }
}
