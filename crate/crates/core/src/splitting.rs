//! Grope splitting.
//!
//! Cutting a cap along an arc that separates its double points surgers the
//! stage carrying it: the cap becomes two caps on two new tips, the stage
//! gains a handle, and whatever sat on the dual slot is duplicated, each copy
//! inheriting every intersection of the original. Stage splitting is the same
//! surgery one level down: a stage of genus g above the first becomes g
//! genus-1 stages and its dual subtree is copied g times.
//!
//! [`full_split`] runs cap splitting to a fixpoint and then splits stages from
//! the top down. Afterwards every cap carries at most one group element and
//! every stage above the first has genus 1. Labels are never changed, only
//! duplicated, and class is preserved.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::capped::{CapId, CappedGrope, Intersection, PendingPushoff, SheetRef};
use crate::grope::{Slot, Stage, StagePath, Step, TipId};
use crate::trace::{Move, Rewrite};
use crate::word::GroupWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("unknown cap {0}")]
    UnknownCap(CapId),
    #[error("no stage at {0}")]
    UnknownStage(StagePath),
    #[error("first stage is not split")]
    FirstStage,
    #[error("first-stage genus {genus} exceeds the limit {limit}")]
    GenusLimit { genus: usize, limit: usize },
    #[error("{count} intersections exceed the limit {limit}")]
    IntersectionLimit { count: usize, limit: usize },
    #[error("rewrite changed the class from {before} to {after}")]
    ClassChanged { before: u32, after: u32 },
}

/// Growth guard for [`full_split`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_genus: usize,
    pub max_intersections: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_genus: 1_000_000,
            max_intersections: 10_000_000,
        }
    }
}

impl Limits {
    fn check(&self, cg: &CappedGrope) -> Result<(), SplitError> {
        let genus = cg.body.root.genus();
        if genus > self.max_genus {
            return Err(SplitError::GenusLimit {
                genus,
                limit: self.max_genus,
            });
        }
        let count = cg.intersections.len();
        if count > self.max_intersections {
            return Err(SplitError::IntersectionLimit {
                count,
                limit: self.max_intersections,
            });
        }
        Ok(())
    }
}

/// Fresh identifiers: `base` if unused, else `base'`, `base''`, ...
#[derive(Default)]
pub(crate) struct Names {
    used: HashSet<String>,
}

impl Names {
    pub(crate) fn new<I: IntoIterator<Item = String>>(used: I) -> Self {
        Names {
            used: used.into_iter().collect(),
        }
    }

    pub(crate) fn fresh(&mut self, base: String) -> String {
        let mut s = base;
        while !self.used.insert(s.clone()) {
            s.push('\'');
        }
        s
    }
}

struct Namespaces {
    tips: Names,
    caps: Names,
    intersections: Names,
}

impl Namespaces {
    fn of(cg: &CappedGrope) -> Self {
        Namespaces {
            tips: Names::new(cg.body.tips().into_iter().map(|t| t.0)),
            caps: Names::new(cg.caps.values().map(|c| c.0.clone())),
            intersections: Names::new(
                cg.intersections
                    .iter()
                    .map(|i| i.id.clone())
                    .chain(cg.spheres.iter().flat_map(|s| s.pending.iter().map(|p| p.id.clone()))),
            ),
        }
    }
}

/// A renamed copy of a slot subtree.
struct SlotCopy {
    slot: Slot,
    caps: Vec<(TipId, CapId)>,
    cap_map: HashMap<CapId, CapId>,
}

fn copy_slot(slot: &Slot, suffix: &str, names: &mut Namespaces, caps: &BTreeMap<TipId, CapId>) -> SlotCopy {
    fn go(
        slot: &Slot,
        suffix: &str,
        names: &mut Namespaces,
        caps: &BTreeMap<TipId, CapId>,
        out: &mut SlotCopy,
    ) -> Slot {
        match slot {
            Slot::Tip(t) => {
                let nt = TipId(names.tips.fresh(format!("{}{suffix}", t.0)));
                if let Some(c) = caps.get(t) {
                    let nc = CapId(names.caps.fresh(format!("{}{suffix}", c.0)));
                    out.caps.push((nt.clone(), nc.clone()));
                    out.cap_map.insert(c.clone(), nc);
                }
                Slot::Tip(nt)
            }
            Slot::Child(stage) => {
                let pairs = stage
                    .pairs
                    .iter()
                    .map(|p| {
                        let alpha = go(&p.alpha, suffix, names, caps, out);
                        let beta = go(&p.beta, suffix, names, caps, out);
                        crate::grope::Pair::new(alpha, beta)
                    })
                    .collect();
                Slot::child(Stage::new(pairs))
            }
        }
    }
    let mut out = SlotCopy {
        slot: Slot::tip(""),
        caps: Vec::new(),
        cap_map: HashMap::new(),
    };
    out.slot = go(slot, suffix, names, caps, &mut out);
    out
}

/// Replaces pair `index` of the stage at `parent` by one pair per entry of
/// `parts`: pair j carries `parts[j]` on `side` and a fresh copy of the old
/// dual slot on the other side.
///
/// `map_main` relocates references into the part being rearranged (it sees
/// the intersection label to decide where a point lands) and returns `None`
/// for everything else. References into the dual slot are duplicated onto
/// every copy; references to later pairs of `parent` are shifted.
fn expand_pair(
    cg: &mut CappedGrope,
    names: &mut Namespaces,
    parent: &StagePath,
    index: usize,
    side: crate::grope::Side,
    parts: Vec<Slot>,
    map_main: impl Fn(&SheetRef, &GroupWord) -> Option<SheetRef>,
) {
    let n = parts.len();
    let dual_side = side.other();
    let dual_prefix = parent.child(index, dual_side);
    let dual_slot = cg.body.stage_at(parent).expect("parent stage").pairs[index]
        .slot(dual_side)
        .clone();
    let dual_tips = dual_slot.tips();
    let dual_caps: HashSet<CapId> = dual_tips.iter().filter_map(|t| cg.caps.get(t).cloned()).collect();

    let copies: Vec<SlotCopy> = (0..n)
        .map(|j| copy_slot(&dual_slot, &format!(".{}", j + 1), names, &cg.caps))
        .collect();

    let in_dual = |s: &SheetRef| match s {
        SheetRef::Cap(c) => dual_caps.contains(c),
        SheetRef::Body(p) => p.starts_with(&dual_prefix),
        SheetRef::Sphere(_) => false,
    };
    let to_copy = |s: &SheetRef, j: usize| match s {
        SheetRef::Cap(c) => SheetRef::Cap(copies[j].cap_map[c].clone()),
        SheetRef::Body(p) => {
            let mut steps = parent.child(index + j, dual_side).0;
            steps.extend_from_slice(&p.0[dual_prefix.depth()..]);
            SheetRef::Body(StagePath(steps))
        }
        SheetRef::Sphere(_) => s.clone(),
    };
    let shift = |s: &SheetRef| match s {
        SheetRef::Body(p) if p.depth() > parent.depth() && p.starts_with(parent) => {
            let k = p.0[parent.depth()].pair;
            if k > index {
                let mut steps = p.0.clone();
                steps[parent.depth()].pair = k + n - 1;
                SheetRef::Body(StagePath(steps))
            } else {
                s.clone()
            }
        }
        _ => s.clone(),
    };
    let map_fixed = |s: &SheetRef, label: &GroupWord| map_main(s, label).unwrap_or_else(|| shift(s));

    let old = std::mem::take(&mut cg.intersections);
    let mut next = Vec::with_capacity(old.len());
    for i in old {
        let (da, db) = (in_dual(&i.end_a), in_dual(&i.end_b));
        if !da && !db {
            next.push(Intersection {
                end_a: map_fixed(&i.end_a, &i.label),
                end_b: map_fixed(&i.end_b, &i.label),
                ..i
            });
            continue;
        }
        for j in 0..n {
            let end_a = if da {
                to_copy(&i.end_a, j)
            } else {
                map_fixed(&i.end_a, &i.label)
            };
            let end_b = if db {
                to_copy(&i.end_b, j)
            } else {
                map_fixed(&i.end_b, &i.label)
            };
            next.push(Intersection {
                id: names.intersections.fresh(format!("{}.{}", i.id, j + 1)),
                end_a,
                end_b,
                label: i.label.clone(),
            });
        }
    }
    cg.intersections = next;

    for sphere in &mut cg.spheres {
        let old = std::mem::take(&mut sphere.pending);
        for p in old {
            match &p.other {
                Some(o) if in_dual(o) => {
                    for j in 0..n {
                        sphere.pending.push(PendingPushoff {
                            id: names.intersections.fresh(format!("{}.{}", p.id, j + 1)),
                            label: p.label.clone(),
                            other: Some(to_copy(o, j)),
                        });
                    }
                }
                Some(o) => sphere.pending.push(PendingPushoff {
                    other: Some(map_fixed(o, &p.label)),
                    ..p
                }),
                None => sphere.pending.push(p),
            }
        }
    }

    for t in &dual_tips {
        cg.caps.remove(t);
    }
    let mut new_pairs = Vec::with_capacity(n);
    for (part, copy) in parts.into_iter().zip(copies) {
        cg.caps.extend(copy.caps);
        new_pairs.push(crate::grope::Pair::oriented(side, part, copy.slot));
    }
    let stage = cg.body.stage_at_mut(parent).expect("parent stage");
    stage.pairs.splice(index..=index, new_pairs);
}

/// Splits cap `c` into the part carrying its least label class and the
/// rest. A cap with fewer than two classes is returned unchanged.
pub fn split_cap(cg: &CappedGrope, c: &CapId) -> Result<CappedGrope, SplitError> {
    let mut out = cg.clone();
    split_cap_in_place(&mut out, c)?;
    Ok(out)
}

/// [`split_cap`] with the rewrite record, `None` when nothing was split.
pub fn split_cap_logged(cg: &CappedGrope, c: &CapId) -> Result<(CappedGrope, Option<Rewrite>), SplitError> {
    let mut out = cg.clone();
    let r = split_cap_in_place(&mut out, c)?;
    Ok((out, r))
}

fn split_cap_in_place(cg: &mut CappedGrope, c: &CapId) -> Result<Option<Rewrite>, SplitError> {
    let tip = cg
        .tip_of_cap(c)
        .cloned()
        .ok_or_else(|| SplitError::UnknownCap(c.clone()))?;
    let classes = cg.cap_label_classes(c).map_err(|_| SplitError::UnknownCap(c.clone()))?;
    if classes.len() < 2 {
        return Ok(None);
    }
    let least = classes.into_iter().next().expect("two classes");
    let loc = cg
        .body
        .tip_locations()
        .into_iter()
        .find(|l| l.tip == tip)
        .ok_or_else(|| SplitError::UnknownCap(c.clone()))?;
    let genus_before = cg.body.stage_at(&loc.stage).map_or(0, Stage::genus);

    let mut names = Namespaces::of(cg);
    let t1 = TipId(names.tips.fresh(format!("{}.1", tip.0)));
    let t2 = TipId(names.tips.fresh(format!("{}.2", tip.0)));
    let c1 = CapId(names.caps.fresh(format!("{}.1", c.0)));
    let c2 = CapId(names.caps.fresh(format!("{}.2", c.0)));
    let target = SheetRef::Cap(c.clone());
    let (first, rest) = (SheetRef::Cap(c1.clone()), SheetRef::Cap(c2.clone()));
    expand_pair(
        cg,
        &mut names,
        &loc.stage,
        loc.pair,
        loc.side,
        vec![Slot::Tip(t1.clone()), Slot::Tip(t2.clone())],
        |s, label| {
            (*s == target).then(|| {
                if !label.is_identity() && label.unoriented() == least {
                    first.clone()
                } else {
                    rest.clone()
                }
            })
        },
    );
    cg.caps.remove(&tip);
    cg.caps.insert(t1, c1);
    cg.caps.insert(t2, c2);
    Ok(Some(Rewrite {
        mv: Move::SplitCap { cap: c.clone() },
        stage: loc.stage.clone(),
        genus_before,
        genus_after: genus_before + 1,
        labels: Vec::new(),
    }))
}

/// Splits the stage at `path` (above the first stage) into genus-1 stages,
/// copying its dual subtree once per new stage. Genus-1 stages are returned
/// unchanged.
pub fn split_stage(cg: &CappedGrope, path: &StagePath) -> Result<CappedGrope, SplitError> {
    let mut out = cg.clone();
    split_stage_in_place(&mut out, path)?;
    Ok(out)
}

/// [`split_stage`] with the rewrite record, `None` when nothing was split.
pub fn split_stage_logged(cg: &CappedGrope, path: &StagePath) -> Result<(CappedGrope, Option<Rewrite>), SplitError> {
    let mut out = cg.clone();
    let r = split_stage_in_place(&mut out, path)?;
    Ok((out, r))
}

fn split_stage_in_place(cg: &mut CappedGrope, path: &StagePath) -> Result<Option<Rewrite>, SplitError> {
    let (parent, step) = path.parent().ok_or(SplitError::FirstStage)?;
    let stage = cg
        .body
        .stage_at(path)
        .ok_or_else(|| SplitError::UnknownStage(path.clone()))?;
    let g = stage.genus();
    if g < 2 {
        return Ok(None);
    }
    let parts: Vec<Slot> = stage
        .pairs
        .iter()
        .map(|p| Slot::child(Stage::new(vec![p.clone()])))
        .collect();
    let genus_before = cg.body.stage_at(&parent).map_or(0, Stage::genus);
    let mut names = Namespaces::of(cg);
    let depth = path.depth();
    expand_pair(cg, &mut names, &parent, step.pair, step.side, parts, |s, _| match s {
        SheetRef::Body(p) if p.starts_with(path) => {
            if p.depth() == depth {
                return Some(s.clone());
            }
            let up = p.0[depth];
            let mut steps = parent.child(step.pair + up.pair, step.side).0;
            steps.push(Step { pair: 0, side: up.side });
            steps.extend_from_slice(&p.0[depth + 1..]);
            Some(SheetRef::Body(StagePath(steps)))
        }
        _ => None,
    });
    Ok(Some(Rewrite {
        mv: Move::SplitStage { path: path.clone() },
        stage: parent,
        genus_before,
        genus_after: genus_before + g - 1,
        labels: Vec::new(),
    }))
}

/// Full splitting: caps to a fixpoint, then stages from the top down.
pub fn full_split(cg: &CappedGrope, limits: &Limits) -> Result<(CappedGrope, Vec<Rewrite>), SplitError> {
    let before = cg.body.root.class();
    let mut out = cg.clone();
    let mut trace = Vec::new();
    limits.check(&out)?;

    loop {
        let classes = out.label_classes_by_cap();
        let Some(c) = out
            .caps_in_order()
            .into_iter()
            .find(|c| classes.get(c).is_some_and(|s| s.len() >= 2))
        else {
            break;
        };
        if let Some(r) = split_cap_in_place(&mut out, &c)? {
            trace.push(r);
        }
        limits.check(&out)?;
    }

    loop {
        // Deepest stage first; ties by traversal order.
        let target = out
            .body
            .stages()
            .into_iter()
            .filter(|(p, s)| !p.is_root() && s.genus() >= 2)
            .max_by(|(a, _), (b, _)| a.depth().cmp(&b.depth()).then_with(|| b.cmp(a)))
            .map(|(p, _)| p);
        let Some(path) = target else { break };
        if let Some(r) = split_stage_in_place(&mut out, &path)? {
            trace.push(r);
        }
        limits.check(&out)?;
    }

    let after = out.body.root.class();
    if after != before {
        return Err(SplitError::ClassChanged { before, after });
    }
    Ok((out, trace))
}

/// True when every cap carries at most one class and every stage above the
/// first has genus 1.
pub fn is_fully_split(cg: &CappedGrope) -> bool {
    cg.label_classes_by_cap().values().all(|s| s.len() <= 1)
        && cg.body.stages().iter().all(|(p, s)| p.is_root() || s.genus() == 1)
}
