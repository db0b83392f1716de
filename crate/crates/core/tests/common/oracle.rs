//! Brute-force truncated Magnus coefficients, independent of the library's
//! series arithmetic.
//!
//! The coefficient of the monomial `X_{i1} ... X_{ik}` in the expansion of a
//! word is a sum over ways of cutting the monomial into consecutive blocks,
//! one block per letter position (possibly empty). A positive letter `x_g`
//! absorbs the empty block or the single block `g`; a negative letter absorbs
//! the empty block or `g^t` for any `t >= 1` with sign `(-1)^t`.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// `(generator, inverse)` pairs.
pub type RawWord = Vec<(u32, bool)>;

pub fn coefficient(word: &[(u32, bool)], mono: &[u32]) -> i128 {
    let (n, k) = (word.len(), mono.len());
    // ways[i][j]: contribution of letters i.. covering mono[j..]
    let mut ways = vec![vec![0i128; k + 1]; n + 1];
    ways[n][k] = 1;
    for i in (0..n).rev() {
        let (g, inv) = word[i];
        for j in 0..=k {
            let mut total = ways[i + 1][j];
            if !inv {
                if j < k && mono[j] == g {
                    total += ways[i + 1][j + 1];
                }
            } else {
                let mut t = 1;
                while j + t <= k && mono[j + t - 1] == g {
                    let sign = if t % 2 == 0 { 1 } else { -1 };
                    total += sign * ways[i + 1][j + t];
                    t += 1;
                }
            }
            ways[i][j] = total;
        }
    }
    ways[0][0]
}

fn generators(word: &[(u32, bool)]) -> Vec<u32> {
    let mut gs: Vec<u32> = word.iter().map(|&(g, _)| g).collect();
    gs.sort_unstable();
    gs.dedup();
    gs
}

fn monomials(gens: &[u32], degree: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..degree {
        out = out
            .into_iter()
            .flat_map(|m| {
                gens.iter().map(move |&g| {
                    let mut m2 = m.clone();
                    m2.push(g);
                    m2
                })
            })
            .collect();
    }
    out
}

/// All nonzero coefficients of degree `1..=cutoff`.
pub fn expansion(word: &[(u32, bool)], cutoff: usize) -> BTreeMap<Vec<u32>, i128> {
    let gens = generators(word);
    let mut out = BTreeMap::new();
    for d in 1..=cutoff {
        for m in monomials(&gens, d) {
            let c = coefficient(word, &m);
            if c != 0 {
                out.insert(m, c);
            }
        }
    }
    out
}

/// Lowest degree `<= cutoff` carrying a nonzero coefficient.
pub fn lowest_degree(word: &[(u32, bool)], cutoff: usize) -> Option<usize> {
    let gens = generators(word);
    (1..=cutoff).find(|&d| monomials(&gens, d).iter().any(|m| coefficient(word, m) != 0))
}

/// Free reduction by a stack, for building oracle inputs.
pub fn reduce(word: &[(u32, bool)]) -> RawWord {
    let mut out: RawWord = Vec::new();
    for &(g, inv) in word {
        if let Some(&(h, hinv)) = out.last() {
            if h == g && hinv != inv {
                out.pop();
                continue;
            }
        }
        out.push((g, inv));
    }
    out
}

pub fn invert(word: &[(u32, bool)]) -> RawWord {
    word.iter().rev().map(|&(g, inv)| (g, !inv)).collect()
}

pub fn commutator(a: &[(u32, bool)], b: &[(u32, bool)]) -> RawWord {
    let mut w = a.to_vec();
    w.extend_from_slice(b);
    w.extend(invert(a));
    w.extend(invert(b));
    reduce(&w)
}

/// `[[...[x_{g0}, x_{g1}], ...], x_{gk}]` built directly on raw letters.
pub fn left_normed(gens: &[u32]) -> RawWord {
    let mut w: RawWord = vec![(gens[0], false)];
    for &g in &gens[1..] {
        w = commutator(&w, &[(g, false)]);
    }
    w
}
