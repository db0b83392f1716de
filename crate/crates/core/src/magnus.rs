//! Truncated Magnus expansion and lower-central-series depth for free groups.
//!
//! A generator `x` maps to `1 + X` and its inverse to `1 - X + X^2 - ...`,
//! cut off at the requested degree. For a free group a nontrivial word lies in
//! the k-th term of the lower central series exactly when every term of its
//! expansion below degree k vanishes, so the lowest surviving degree is the
//! word's depth.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::word::{Generator, GroupWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MagnusError {
    #[error("cutoff must be at least 1")]
    ZeroCutoff,
}

pub type Monomial = Vec<Generator>;

/// `1 + sum c_m m` over noncommuting monomials of degree `1..=cutoff`.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    cutoff: usize,
    terms: BTreeMap<Monomial, i128>,
}

impl TruncatedSeries {
    pub fn one(cutoff: usize) -> Result<Self, MagnusError> {
        if cutoff == 0 {
            return Err(MagnusError::ZeroCutoff);
        }
        Ok(TruncatedSeries {
            cutoff,
            terms: BTreeMap::new(),
        })
    }

    /// Builds a series from explicit terms, dropping zeros and anything above
    /// the cutoff.
    pub fn from_terms<I>(cutoff: usize, terms: I) -> Result<Self, MagnusError>
    where
        I: IntoIterator<Item = (Monomial, i128)>,
    {
        let mut s = Self::one(cutoff)?;
        for (m, c) in terms {
            if !m.is_empty() && m.len() <= cutoff {
                *s.terms.entry(m).or_insert(0) += c;
            }
        }
        s.terms.retain(|_, c| *c != 0);
        Ok(s)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, i128> {
        &self.terms
    }

    pub fn coefficient(&self, m: &[Generator]) -> i128 {
        if m.is_empty() {
            return 1;
        }
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lowest_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.len()).min()
    }

    /// Truncated product; both factors must share a cutoff.
    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        assert_eq!(self.cutoff, other.cutoff, "series cutoffs differ");
        let mut acc: HashMap<Monomial, i128> = HashMap::new();
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            *acc.entry(m.clone()).or_insert(0) += c;
        }
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if a.len() + b.len() <= self.cutoff {
                    let mut m = a.clone();
                    m.extend_from_slice(b);
                    *acc.entry(m).or_insert(0) += ca * cb;
                }
            }
        }
        TruncatedSeries {
            cutoff: self.cutoff,
            terms: acc.into_iter().filter(|(_, c)| *c != 0).collect(),
        }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "1")?;
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        for (m, c) in terms {
            let sign = if *c < 0 { '-' } else { '+' };
            write!(f, " {sign} ")?;
            if c.abs() != 1 {
                write!(f, "{}", c.abs())?;
            }
            for g in m {
                write!(f, "X{}", g.0 + 1)?;
            }
        }
        Ok(())
    }
}

/// Expansion of `w`, exact in every degree up to `cutoff`.
pub fn magnus(w: &GroupWord, cutoff: usize) -> Result<TruncatedSeries, MagnusError> {
    if cutoff == 0 {
        return Err(MagnusError::ZeroCutoff);
    }
    let mut acc: HashMap<Monomial, i128> = HashMap::new();
    acc.insert(Vec::new(), 1);
    for l in w.letters() {
        let g = l.generator;
        let mut next = acc.clone();
        for (m, c) in &acc {
            let room = cutoff - m.len();
            let mut ext = m.clone();
            for t in 1..=room {
                ext.push(g);
                let coef = if l.inverse && t % 2 == 1 { -*c } else { *c };
                *next.entry(ext.clone()).or_insert(0) += coef;
                if !l.inverse {
                    break;
                }
            }
        }
        next.retain(|_, c| *c != 0);
        acc = next;
    }
    acc.remove(&Vec::new());
    Ok(TruncatedSeries {
        cutoff,
        terms: acc.into_iter().collect(),
    })
}

/// Position of a word in the lower central series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Depth {
    /// The word lies in term k but not in term k+1.
    Exact(u32),
    /// Every degree up to the cutoff vanished; the depth is at least this.
    AtLeast(u32),
    /// The identity, which lies in every term.
    Infinite,
}

impl Depth {
    /// Largest k this result certifies the word to lie in term k of.
    pub fn lower_bound(self) -> u32 {
        match self {
            Depth::Exact(k) | Depth::AtLeast(k) => k,
            Depth::Infinite => u32::MAX,
        }
    }

    /// True when the word provably lies in term `k`.
    pub fn at_least(self, k: u32) -> bool {
        self.lower_bound() >= k
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Exact(k) => write!(f, "{k}"),
            Depth::AtLeast(k) => write!(f, ">={k}"),
            Depth::Infinite => write!(f, "inf"),
        }
    }
}

const DENSE_LIMIT: usize = 1 << 21;

/// Lower-central-series depth of `w`, read off its expansion up to `cutoff`.
pub fn lcs_depth(w: &GroupWord, cutoff: usize) -> Result<Depth, MagnusError> {
    if cutoff == 0 {
        return Err(MagnusError::ZeroCutoff);
    }
    if w.is_identity() {
        return Ok(Depth::Infinite);
    }
    // Compact the alphabet to the generators that occur.
    let mut gens: Vec<Generator> = w.letters().iter().map(|l| l.generator).collect();
    gens.sort_unstable();
    gens.dedup();
    let n = gens.len();
    let letters: Vec<(usize, bool)> = w
        .letters()
        .iter()
        .map(|l| (gens.binary_search(&l.generator).unwrap(), l.inverse))
        .collect();

    // Degrees are tried in increasing order; expansion below the cutoff is
    // exact, so the first degree with a surviving term is the depth.
    for d in 1..=cutoff {
        let found = match dense_size(n, d) {
            Some(size) if size <= DENSE_LIMIT => dense_degree_nonzero(&letters, n, d),
            _ => magnus(w, d)?.terms().keys().any(|m| m.len() == d),
        };
        if found {
            return Ok(Depth::Exact(d as u32));
        }
    }
    Ok(Depth::AtLeast(cutoff as u32 + 1))
}

fn dense_size(n: usize, d: usize) -> Option<usize> {
    let mut total: usize = 0;
    let mut block: usize = 1;
    for _ in 0..=d {
        total = total.checked_add(block)?;
        block = block.checked_mul(n)?;
    }
    Some(total)
}

/// Expands letter by letter into per-degree dense blocks (monomials indexed in
/// base `n`) and reports whether any degree-`d` coefficient survives.
fn dense_degree_nonzero(letters: &[(usize, bool)], n: usize, d: usize) -> bool {
    let mut blocks: Vec<Vec<i128>> = (0..=d).map(|j| vec![0; n.pow(j as u32)]).collect();
    blocks[0][0] = 1;
    for &(g, inverse) in letters {
        if !inverse {
            // S (1 + X): read each lower block before it is written.
            for j in (0..d).rev() {
                let (lo, hi) = blocks.split_at_mut(j + 1);
                let (src, dst) = (&lo[j], &mut hi[0]);
                for (idx, &c) in src.iter().enumerate() {
                    if c != 0 {
                        dst[idx * n + g] += c;
                    }
                }
            }
        } else {
            // S (1 + X)^-1 = T with T[u g] = S[u g] - T[u].
            for j in 0..d {
                let (lo, hi) = blocks.split_at_mut(j + 1);
                let (src, dst) = (&lo[j], &mut hi[0]);
                for (idx, &c) in src.iter().enumerate() {
                    if c != 0 {
                        dst[idx * n + g] -= c;
                    }
                }
            }
        }
    }
    blocks[d].iter().any(|&c| c != 0)
}
