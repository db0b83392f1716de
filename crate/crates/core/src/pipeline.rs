//! The surgery pipeline on a kernel of paired capped gropes.
//!
//! Each grope is fully split; then every genus-1 base piece, in pair order,
//! is contracted along two caps carrying the same group element and the
//! sheets that met it are pushed off. Pigeonhole guarantees the cap pair
//! when the class exceeds the number of group elements.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capped::{CapId, CappedGrope, Sphere};
use crate::moves::{self, cap_class, piece_caps, MoveError};
use crate::splitting::{full_split, Limits, SplitError};
use crate::trace::{self, ApplyError, Rewrite};
use crate::word::{FreeGroup, GroupWord};

/// Gropes over a shared alphabet, partitioned into dual pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurgeryKernel {
    /// Number of free generators labels are drawn from.
    pub alphabet: u32,
    pub gropes: Vec<CappedGrope>,
    pub hyperbolic_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KernelViolation {
    Grope {
        index: usize,
        violation: crate::capped::CappedViolation,
    },
    PairOutOfRange {
        pair: usize,
        index: usize,
    },
    Unpaired(usize),
    PairedTwice(usize),
}

impl std::fmt::Display for KernelViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelViolation::Grope { index, violation } => write!(f, "grope {index}: {violation}"),
            KernelViolation::PairOutOfRange { pair, index } => {
                write!(f, "hyperbolic pair {pair} names missing grope {index}")
            }
            KernelViolation::Unpaired(i) => write!(f, "grope {i} is in no hyperbolic pair"),
            KernelViolation::PairedTwice(i) => write!(f, "grope {i} is in more than one hyperbolic pair"),
        }
    }
}

impl SurgeryKernel {
    pub fn validate(&self) -> Vec<KernelViolation> {
        let group = FreeGroup::new(self.alphabet);
        let mut out = Vec::new();
        for (index, g) in self.gropes.iter().enumerate() {
            out.extend(
                g.validate_in(Some(group))
                    .into_iter()
                    .map(|violation| KernelViolation::Grope { index, violation }),
            );
        }
        let mut seen = vec![0usize; self.gropes.len()];
        for (pair, &(a, b)) in self.hyperbolic_pairs.iter().enumerate() {
            for index in [a, b] {
                match seen.get_mut(index) {
                    Some(n) => *n += 1,
                    None => out.push(KernelViolation::PairOutOfRange { pair, index }),
                }
            }
        }
        for (i, n) in seen.into_iter().enumerate() {
            match n {
                0 => out.push(KernelViolation::Unpaired(i)),
                1 => {}
                _ => out.push(KernelViolation::PairedTwice(i)),
            }
        }
        out
    }

    /// Distinct nonidentity labels over every grope, unoriented.
    pub fn distinct_labels(&self) -> BTreeSet<GroupWord> {
        self.gropes.iter().flat_map(|g| g.distinct_labels()).collect()
    }

    pub fn distinct_label_count(&self) -> usize {
        self.distinct_labels().len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HypothesisReport {
    /// Number of distinct group elements on the caps.
    pub m: usize,
    /// Least class over the kernel gropes (0 for an empty kernel).
    pub min_class: u32,
    pub required_class: u32,
    /// `min_class >= m + 1`.
    pub ok: bool,
    /// Whether the weaker threshold `min_class >= m` holds.
    pub ok_at_m: bool,
}

pub fn check_hypotheses(k: &SurgeryKernel) -> HypothesisReport {
    let m = k.distinct_label_count();
    let min_class = k.gropes.iter().map(|g| g.body.root.class()).min().unwrap_or(0);
    let required_class = m as u32 + 1;
    HypothesisReport {
        m,
        min_class,
        required_class,
        ok: min_class >= required_class,
        ok_at_m: min_class as usize >= m,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("invalid kernel: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("hypotheses not met: class {} < {} for m = {}", .0.min_class, .0.required_class, .0.m)]
    HypothesesNotMet(HypothesisReport),
    #[error("pigeonhole failure in grope {grope}, piece {piece}: all caps carry distinct group elements")]
    PigeonholeFailure { grope: usize, piece: usize },
    #[error("grope {grope}: {source}")]
    Split { grope: usize, source: SplitError },
    #[error("grope {grope}: {source}")]
    Move { grope: usize, source: MoveError },
}

/// No two caps of the piece carry the same group element.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairError {
    #[error("no base piece {0}")]
    UnknownPiece(usize),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("all caps carry distinct group elements")]
    NoDuplicate,
}

/// The cap pair of piece `i` to contract along: two caps without group
/// elements if any, else the least pair (in cap order) with equal elements.
/// As a last resort a cap without group elements is paired with the first
/// other cap.
pub fn find_duplicate_pair(cg: &CappedGrope, i: usize) -> Result<(CapId, CapId), PairError> {
    let caps = piece_caps(cg, i).ok_or(PairError::UnknownPiece(i))?;
    let labels = caps.iter().map(|c| cap_class(cg, c)).collect::<Result<Vec<_>, _>>()?;
    let pick = |pred: &dyn Fn(&Option<GroupWord>, &Option<GroupWord>) -> bool| {
        (0..caps.len()).find_map(|a| {
            (a + 1..caps.len())
                .find(|&b| pred(&labels[a], &labels[b]))
                .map(|b| (caps[a].clone(), caps[b].clone()))
        })
    };
    pick(&|x, y| x.is_none() && y.is_none())
        .or_else(|| pick(&|x, y| x.is_some() && x == y))
        .or_else(|| pick(&|x, y| x.is_none() || y.is_none()))
        .ok_or(PairError::NoDuplicate)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SurgeryOptions {
    pub force: bool,
    pub limits: Limits,
}

/// A rewrite applied to one grope of the kernel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelStep {
    pub grope: usize,
    #[serde(flatten)]
    pub rewrite: Rewrite,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedSphere {
    pub grope: usize,
    #[serde(flatten)]
    pub sphere: Sphere,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpherePair {
    pub a: PlacedSphere,
    pub b: PlacedSphere,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurgeryStats {
    pub m: usize,
    pub input_class: u32,
    pub first_stage_genus_after_split: Vec<usize>,
    pub piece_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SurgeryResult {
    pub sphere_pairs: Vec<SpherePair>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unpaired: Vec<PlacedSphere>,
    pub stats: SurgeryStats,
    pub trace: Vec<KernelStep>,
    pub kernel: SurgeryKernel,
}

struct GropeRun {
    grope: CappedGrope,
    trace: Vec<Rewrite>,
    genus_after_split: usize,
}

fn run_grope(index: usize, cg: &CappedGrope, limits: &Limits) -> Result<GropeRun, SurgeryError> {
    let (mut g, mut trace) = full_split(cg, limits).map_err(|source| SurgeryError::Split { grope: index, source })?;
    let genus_after_split = g.body.root.genus();
    let move_err = |source| SurgeryError::Move { grope: index, source };
    for piece in 0..genus_after_split {
        let (a, b) = match find_duplicate_pair(&g, 0) {
            Ok(p) => p,
            Err(PairError::NoDuplicate) => return Err(SurgeryError::PigeonholeFailure { grope: index, piece }),
            Err(PairError::Move(e)) => return Err(move_err(e)),
            Err(PairError::UnknownPiece(_)) => unreachable!("piece count fixed by the split"),
        };
        let (sphere, r) = moves::contract_mut(&mut g, 0, &a, &b).map_err(move_err)?;
        trace.push(r);
        trace.push(moves::pushoff_mut(&mut g, &sphere.id).map_err(move_err)?);
    }
    Ok(GropeRun {
        grope: g,
        trace,
        genus_after_split,
    })
}

/// Splits, contracts, and pushes off every grope of the kernel.
pub fn run_surgery(k: &SurgeryKernel, opts: &SurgeryOptions) -> Result<SurgeryResult, SurgeryError> {
    let violations = k.validate();
    if !violations.is_empty() {
        return Err(SurgeryError::Invalid(
            violations.iter().map(ToString::to_string).collect(),
        ));
    }
    let report = check_hypotheses(k);
    if !report.ok && !opts.force {
        return Err(SurgeryError::HypothesesNotMet(report));
    }
    let runs: Vec<GropeRun> = k
        .gropes
        .par_iter()
        .enumerate()
        .map(|(i, g)| run_grope(i, g, &opts.limits))
        .collect::<Result<_, _>>()?;

    let placed = |grope: usize| -> Vec<PlacedSphere> {
        runs[grope]
            .grope
            .spheres
            .iter()
            .map(|s| PlacedSphere {
                grope,
                sphere: s.clone(),
            })
            .collect()
    };
    let mut sphere_pairs = Vec::new();
    let mut unpaired = Vec::new();
    for &(a, b) in &k.hyperbolic_pairs {
        let (sa, sb) = (placed(a), placed(b));
        let n = sa.len().min(sb.len());
        unpaired.extend(sa[n..].iter().chain(&sb[n..]).cloned());
        sphere_pairs.extend(sa.into_iter().zip(sb).map(|(a, b)| SpherePair { a, b }));
    }

    let stats = SurgeryStats {
        m: report.m,
        input_class: report.min_class,
        first_stage_genus_after_split: runs.iter().map(|r| r.genus_after_split).collect(),
        piece_count: runs.iter().map(|r| r.genus_after_split).sum(),
    };
    let mut trace = Vec::new();
    let mut gropes = Vec::with_capacity(runs.len());
    for (grope, run) in runs.into_iter().enumerate() {
        trace.extend(run.trace.into_iter().map(|rewrite| KernelStep { grope, rewrite }));
        gropes.push(run.grope);
    }
    Ok(SurgeryResult {
        sphere_pairs,
        unpaired,
        stats,
        trace,
        kernel: SurgeryKernel {
            alphabet: k.alphabet,
            gropes,
            hyperbolic_pairs: k.hyperbolic_pairs.clone(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {step} names missing grope {grope}")]
    UnknownGrope { step: usize, grope: usize },
    #[error("step {step}: {source}")]
    Apply { step: usize, source: ApplyError },
}

/// Re-applies a trace to a kernel, one step at a time.
pub fn replay(k: &SurgeryKernel, steps: &[KernelStep]) -> Result<SurgeryKernel, ReplayError> {
    let mut out = k.clone();
    for (step, s) in steps.iter().enumerate() {
        let g = out
            .gropes
            .get_mut(s.grope)
            .ok_or(ReplayError::UnknownGrope { step, grope: s.grope })?;
        *g = trace::apply(g, &s.rewrite.mv).map_err(|source| ReplayError::Apply { step, source })?;
    }
    Ok(out)
}

/// True when every intersection touching an output sphere is π₁-null.
pub fn spheres_are_pi1_null(k: &SurgeryKernel) -> bool {
    k.gropes.iter().all(|g| {
        g.spheres
            .iter()
            .all(|s| g.sphere_star(&s.id).all(|i| i.label.is_identity()))
    })
}
