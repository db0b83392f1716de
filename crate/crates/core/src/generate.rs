//! Seeded instance generators.
//!
//! All randomness comes from a caller-supplied seed through ChaCha8, so the
//! same parameters always produce the same bytes.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::capped::{CapId, CappedGrope, Intersection, SheetRef};
use crate::grope::{Grope, Pair, Slot, Stage, StagePath};
use crate::pipeline::SurgeryKernel;
use crate::word::{GroupWord, Letter};

/// Rank of the label alphabet used by the kernel generators.
pub const ALPHABET: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("class must be at least 2, got {0}")]
    ClassTooSmall(u32),
    #[error("strict kernels need class > m, got m = {m}, class = {class}")]
    Contradictory { m: usize, class: u32 },
    #[error("at least one hyperbolic pair is required")]
    NoPairs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub m: usize,
    pub class: u32,
    pub pair_count: usize,
    /// Probability of each extra intersection on a cap, in `[0, 1]`.
    pub intersection_density: f64,
    pub strict: bool,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            m: 2,
            class: 3,
            pair_count: 1,
            intersection_density: 0.3,
            strict: false,
        }
    }
}

struct Tips(usize);

impl Tips {
    fn next(&mut self) -> Slot {
        self.0 += 1;
        Slot::tip(format!("t{}", self.0))
    }
}

/// A slot of class exactly `class`; stages above the first have genus 2
/// with probability `p2`.
fn slot_of_class<R: Rng>(rng: &mut R, class: u32, p2: f64, tips: &mut Tips) -> Slot {
    if class == 1 {
        return tips.next();
    }
    let genus = if rng.gen_bool(p2) { 2 } else { 1 };
    Slot::child(stage_of_class(rng, class, genus, p2, tips))
}

fn stage_of_class<R: Rng>(rng: &mut R, class: u32, genus: usize, p2: f64, tips: &mut Tips) -> Stage {
    let pairs = (0..genus)
        .map(|_| {
            let a = rng.gen_range(1..class);
            let alpha = slot_of_class(rng, a, p2, tips);
            let beta = slot_of_class(rng, class - a, p2, tips);
            Pair::new(alpha, beta)
        })
        .collect();
    Stage::new(pairs)
}

/// A random dyadic stage of class `k`, tips named `t1, t2, ...`.
pub fn random_dyadic_stage<R: Rng>(rng: &mut R, k: u32) -> Stage {
    stage_of_class(rng, k.max(2), 1, 0.0, &mut Tips(0))
}

/// Every dyadic stage of class `k`, tips named `t1, t2, ...` in traversal
/// order.
pub fn all_dyadic_stages(k: u32) -> Vec<Stage> {
    fn slots(c: u32) -> Vec<Slot> {
        if c == 1 {
            return vec![Slot::tip("")];
        }
        all_dyadic_stages(c).into_iter().map(Slot::child).collect()
    }
    fn rename(slot: &mut Slot, n: &mut usize) {
        match slot {
            Slot::Tip(t) => {
                *n += 1;
                t.0 = format!("t{n}");
            }
            Slot::Child(s) => {
                for p in &mut s.pairs {
                    rename(&mut p.alpha, n);
                    rename(&mut p.beta, n);
                }
            }
        }
    }
    let mut out = Vec::new();
    for a in 1..k {
        for alpha in slots(a) {
            for beta in slots(k - a) {
                let mut s = Slot::child(Stage::new(vec![Pair::new(alpha.clone(), beta)]));
                rename(&mut s, &mut 0);
                let Slot::Child(stage) = s else { unreachable!() };
                out.push(*stage);
            }
        }
    }
    out
}

/// A random grope of class in `2..=max_class` with at most `max_tips` tips
/// (retrying shapes until one fits). Stages have genus 1 or 2.
pub fn random_grope<R: Rng>(rng: &mut R, max_class: u32, max_tips: usize) -> Grope {
    loop {
        let class = rng.gen_range(2..=max_class.max(2));
        let genus = rng.gen_range(1..=2);
        let g = Grope::new(stage_of_class(rng, class, genus, 0.2, &mut Tips(0)));
        if g.count_tips() <= max_tips {
            return g;
        }
    }
}

fn random_word<R: Rng>(rng: &mut R, rank: u32, max_len: usize) -> GroupWord {
    let len = rng.gen_range(1..=max_len);
    GroupWord::from_letters((0..len).map(|_| Letter::new(rng.gen_range(0..rank), rng.gen_bool(0.5))))
}

/// `m` distinct nonidentity words, pairwise different as unoriented loops.
pub fn random_labels<R: Rng>(rng: &mut R, m: usize, rank: u32) -> Vec<GroupWord> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(m);
    let mut max_len = 2;
    let mut misses = 0;
    while out.len() < m {
        let w = random_word(rng, rank, max_len);
        if !w.is_identity() && seen.insert(w.unoriented()) {
            out.push(w);
        } else {
            misses += 1;
            if misses % 16 == 0 {
                max_len += 1;
            }
        }
    }
    out
}

fn oriented<R: Rng>(rng: &mut R, w: &GroupWord) -> GroupWord {
    if rng.gen_bool(0.5) {
        w.inverse()
    } else {
        w.clone()
    }
}

/// A random capped grope: class in `2..=max_class`, labels drawn from at
/// most `max_labels` group elements, intersections among caps and between
/// caps and arbitrary stages.
pub fn random_capped<R: Rng>(rng: &mut R, max_class: u32, max_labels: usize) -> CappedGrope {
    let body = random_grope(rng, max_class, 10);
    let stages: Vec<StagePath> = body.stages().into_iter().map(|(p, _)| p).collect();
    let mut cg = CappedGrope::with_default_caps(body);
    let count = rng.gen_range(1..=max_labels.max(1));
    let pool = random_labels(rng, count, ALPHABET);
    let caps = cg.caps_in_order();
    for c in &caps {
        for _ in 0..rng.gen_range(0..=2) {
            let label = if rng.gen_bool(0.1) {
                GroupWord::identity()
            } else {
                let w = pool.choose(rng).expect("nonempty pool");
                oriented(rng, w)
            };
            let other = if rng.gen_bool(0.5) {
                SheetRef::Cap(caps.choose(rng).expect("caps").clone())
            } else {
                SheetRef::Body(stages.choose(rng).expect("stages").clone())
            };
            let id = format!("i{}", cg.intersections.len() + 1);
            cg.intersections
                .push(Intersection::new(id, SheetRef::Cap(c.clone()), other, label));
        }
    }
    cg
}

/// Caps of each base piece, in traversal order.
fn caps_by_piece(cg: &CappedGrope) -> Vec<Vec<CapId>> {
    (0..cg.body.root.genus())
        .map(|i| crate::moves::piece_caps(cg, i).unwrap_or_default())
        .collect()
}

fn dual(cg: &CappedGrope) -> CappedGrope {
    let mut d = cg.clone();
    for i in &mut d.intersections {
        i.label = i.label.inverse();
    }
    d
}

fn kernel_of(gropes: Vec<CappedGrope>) -> SurgeryKernel {
    let mut all = Vec::with_capacity(2 * gropes.len());
    let mut pairs = Vec::with_capacity(gropes.len());
    for g in gropes {
        let d = dual(&g);
        pairs.push((all.len(), all.len() + 1));
        all.push(g);
        all.push(d);
    }
    SurgeryKernel {
        alphabet: ALPHABET,
        gropes: all,
        hyperbolic_pairs: pairs,
    }
}

/// A kernel of `pair_count` hyperbolic pairs of capped gropes of the given
/// class whose caps carry exactly `m` distinct group elements. Each pair
/// consists of a grope and a copy with inverted labels.
pub fn generate_kernel(seed: u64, p: &KernelParams) -> Result<SurgeryKernel, GenerateError> {
    if p.class < 2 {
        return Err(GenerateError::ClassTooSmall(p.class));
    }
    if p.strict && p.m as u64 >= p.class as u64 {
        return Err(GenerateError::Contradictory { m: p.m, class: p.class });
    }
    if p.pair_count == 0 {
        return Err(GenerateError::NoPairs);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = p.intersection_density.clamp(0.0, 1.0);
    let labels = random_labels(&mut rng, p.m, ALPHABET);
    let gropes = (0..p.pair_count)
        .map(|_| {
            let genus = rng.gen_range(1..=2);
            let body = Grope::new(stage_of_class(&mut rng, p.class, genus, 0.25, &mut Tips(0)));
            let mut cg = CappedGrope::with_default_caps(body);
            cg.strict = p.strict;
            let pieces = caps_by_piece(&cg);
            let mut next_id = 0;
            let mut push = |cg: &mut CappedGrope, rng: &mut ChaCha8Rng, piece: &[CapId], c: &CapId, label| {
                let other = if !p.strict && rng.gen_bool(0.5) {
                    SheetRef::Body(StagePath::root())
                } else {
                    SheetRef::Cap(piece.choose(rng).expect("piece caps").clone())
                };
                next_id += 1;
                cg.intersections.push(Intersection::new(
                    format!("i{next_id}"),
                    SheetRef::Cap(c.clone()),
                    other,
                    label,
                ));
            };
            for piece in &pieces {
                for c in piece {
                    let base = usize::from(!labels.is_empty());
                    let extra = (0..2).filter(|_| rng.gen_bool(density)).count();
                    for _ in 0..base + extra {
                        let label = match labels.choose(&mut rng) {
                            Some(l) => oriented(&mut rng, l),
                            None => GroupWord::identity(),
                        };
                        push(&mut cg, &mut rng, piece, c, label);
                    }
                }
            }
            let present = cg.distinct_labels();
            for l in &labels {
                if !present.contains(&l.unoriented()) {
                    let piece = pieces.choose(&mut rng).expect("pieces");
                    let c = piece.choose(&mut rng).expect("piece caps").clone();
                    push(&mut cg, &mut rng, piece, &c, l.clone());
                }
            }
            cg
        })
        .collect();
    Ok(kernel_of(gropes))
}

/// A kernel violating the class hypothesis: dyadic class-`m` pieces whose
/// `m` caps each carry a different one of `m` group elements. The pipeline
/// must report a pigeonhole failure on it.
pub fn generate_adversarial(seed: u64, m: usize, pair_count: usize) -> Result<SurgeryKernel, GenerateError> {
    let class = u32::try_from(m).unwrap_or(u32::MAX);
    if class < 2 {
        return Err(GenerateError::ClassTooSmall(class));
    }
    if pair_count == 0 {
        return Err(GenerateError::NoPairs);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = random_labels(&mut rng, m, ALPHABET);
    let gropes = (0..pair_count)
        .map(|_| {
            let genus = rng.gen_range(1..=2);
            let body = Grope::new(stage_of_class(&mut rng, class, genus, 0.0, &mut Tips(0)));
            let mut cg = CappedGrope::with_default_caps(body);
            let mut n = 0;
            for piece in caps_by_piece(&cg) {
                let mut order = labels.clone();
                order.shuffle(&mut rng);
                for (c, l) in piece.iter().zip(order) {
                    n += 1;
                    cg.intersections.push(Intersection::new(
                        format!("i{n}"),
                        SheetRef::Cap(c.clone()),
                        SheetRef::Body(StagePath::root()),
                        l,
                    ));
                }
            }
            cg
        })
        .collect();
    Ok(kernel_of(gropes))
}

/// Caps every tip of `stage` and gives each cap `n` intersections with the
/// first stage, labeled by the generators `x1..xn`.
pub fn uniform_capped(stage: Stage, n: u32) -> CappedGrope {
    let mut cg = CappedGrope::with_default_caps(Grope::new(stage));
    for c in cg.caps_in_order() {
        for g in 0..n {
            cg.intersections.push(Intersection::new(
                format!("{}#{}", c.0, g + 1),
                SheetRef::Cap(c.clone()),
                SheetRef::Body(StagePath::root()),
                GroupWord::generator(g),
            ));
        }
    }
    cg
}
