//! Contraction and pushoff.
//!
//! Contracting a dyadic base piece along two caps with the same group element
//! replaces the piece by a sphere. Double points between the two caps become
//! sphere self-intersections labeled `g g^-1`; everything else that met the
//! piece is queued and later pushed off onto two parallel copies of the dual
//! cap, producing canceling pairs of intersections.

use std::collections::HashSet;

use thiserror::Error;

use crate::capped::{CapId, CappedGrope, Intersection, PendingPushoff, SheetRef, Sphere, SphereId};
use crate::grope::{StagePath, TipId};
use crate::splitting::Names;
use crate::trace::{Move, Rewrite};
use crate::word::GroupWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("no base piece {0}")]
    UnknownPiece(usize),
    #[error("piece {0} is not a dyadic piece")]
    NotDyadic(usize),
    #[error("cap {cap} is not in piece {piece}")]
    CapNotInPiece { cap: CapId, piece: usize },
    #[error("contraction needs two distinct caps, got {0} twice")]
    SameCap(CapId),
    #[error("cap {0} carries several group elements, split first")]
    SplitFirst(CapId),
    #[error("pigeonhole precondition failed: {cap_a} and {cap_b} carry different group elements")]
    LabelsDiffer { cap_a: CapId, cap_b: CapId },
    #[error("unknown sphere {0}")]
    UnknownSphere(SphereId),
}

/// Caps of base piece `i` in traversal order.
pub fn piece_caps(cg: &CappedGrope, i: usize) -> Option<Vec<CapId>> {
    let pair = cg.body.root.pairs.get(i)?;
    let tips: Vec<TipId> = pair.alpha.tips().into_iter().chain(pair.beta.tips()).collect();
    Some(tips.iter().filter_map(|t| cg.caps.get(t).cloned()).collect())
}

/// The single label class on `c`, `None` for a cap without nonidentity
/// labels, or an error when several classes are present.
pub fn cap_class(cg: &CappedGrope, c: &CapId) -> Result<Option<GroupWord>, MoveError> {
    let classes = cg.cap_label_classes(c).map_err(|_| MoveError::SplitFirst(c.clone()))?;
    match classes.len() {
        0 => Ok(None),
        1 => Ok(classes.into_iter().next()),
        _ => Err(MoveError::SplitFirst(c.clone())),
    }
}

fn in_piece(cg: &CappedGrope, i: usize, caps: &HashSet<CapId>) -> impl Fn(&SheetRef) -> bool {
    let owns_root = cg.body.root.genus() == 1;
    let caps = caps.clone();
    move |s| match s {
        SheetRef::Cap(c) => caps.contains(c),
        SheetRef::Body(p) => match p.0.first() {
            Some(step) => step.pair == i,
            None => owns_root,
        },
        SheetRef::Sphere(_) => false,
    }
}

/// Contracts base piece `i` along caps `cap_a` and `cap_b`.
///
/// Both caps must carry the same group element, or one of them none at all:
/// a cap whose double points are all trivial cannot create a nontrivial loop.
pub fn contract(cg: &CappedGrope, i: usize, cap_a: &CapId, cap_b: &CapId) -> Result<(CappedGrope, Sphere), MoveError> {
    let (out, sphere, _) = contract_logged(cg, i, cap_a, cap_b)?;
    Ok((out, sphere))
}

/// [`contract`] together with the rewrite record and its label computations.
pub fn contract_logged(
    cg: &CappedGrope,
    i: usize,
    cap_a: &CapId,
    cap_b: &CapId,
) -> Result<(CappedGrope, Sphere, Rewrite), MoveError> {
    let mut out = cg.clone();
    let (sphere, rewrite) = contract_mut(&mut out, i, cap_a, cap_b)?;
    Ok((out, sphere, rewrite))
}

/// [`contract`] in place. On error `cg` is left untouched.
pub fn contract_mut(
    cg: &mut CappedGrope,
    i: usize,
    cap_a: &CapId,
    cap_b: &CapId,
) -> Result<(Sphere, Rewrite), MoveError> {
    let pair = cg.body.root.pairs.get(i).ok_or(MoveError::UnknownPiece(i))?;
    if !(pair.alpha.is_dyadic() && pair.beta.is_dyadic()) {
        return Err(MoveError::NotDyadic(i));
    }
    let caps: HashSet<CapId> = piece_caps(cg, i).unwrap_or_default().into_iter().collect();
    for c in [cap_a, cap_b] {
        if !caps.contains(c) {
            return Err(MoveError::CapNotInPiece {
                cap: c.clone(),
                piece: i,
            });
        }
    }
    if cap_a == cap_b {
        return Err(MoveError::SameCap(cap_a.clone()));
    }
    for c in piece_caps(cg, i).unwrap_or_default() {
        cap_class(cg, &c)?;
    }
    let la = cap_class(cg, cap_a)?;
    let lb = cap_class(cg, cap_b)?;
    if la.is_some() && lb.is_some() && la != lb {
        return Err(MoveError::LabelsDiffer {
            cap_a: cap_a.clone(),
            cap_b: cap_b.clone(),
        });
    }
    let g = la.or(lb).unwrap_or_else(GroupWord::identity);

    let mut names = Names::new(cg.spheres.iter().map(|s| s.id.0.clone()));
    let id = SphereId(names.fresh(format!("s{}", cg.spheres.len())));
    let here = SheetRef::Sphere(id.clone());
    let owned = in_piece(cg, i, &caps);
    let pair_ends = [SheetRef::Cap(cap_a.clone()), SheetRef::Cap(cap_b.clone())];

    let old = std::mem::take(&mut cg.intersections);
    let mut kept = Vec::with_capacity(old.len());
    let mut pending = Vec::new();
    let mut labels = Vec::new();
    for x in old {
        let (oa, ob) = (owned(&x.end_a), owned(&x.end_b));
        if !oa && !ob {
            kept.push(x);
        } else if pair_ends.contains(&x.end_a) && pair_ends.contains(&x.end_b) {
            let l = x.label.mul(&x.label.inverse());
            labels.push(format!("{}: ({}) ({})^-1 = {}", x.id, x.label, x.label, l));
            kept.push(Intersection::new(x.id, here.clone(), here.clone(), l));
        } else {
            // Label read from the surviving sheet toward the piece.
            let (other, label) = match (oa, ob) {
                (true, true) => (None, x.label),
                (false, true) => (Some(x.end_a), x.label),
                _ => (Some(x.end_b), x.label.inverse()),
            };
            pending.push(PendingPushoff { id: x.id, label, other });
        }
    }
    cg.intersections = kept;
    for s in &mut cg.spheres {
        for p in &mut s.pending {
            if p.other.as_ref().is_some_and(&owned) {
                p.other = Some(here.clone());
            }
        }
    }

    let genus_before = cg.body.root.genus();
    let removed = cg.body.root.pairs.remove(i);
    for t in removed.alpha.tips().into_iter().chain(removed.beta.tips()) {
        cg.caps.remove(&t);
    }
    let shift = |s: &mut SheetRef| {
        if let SheetRef::Body(p) = s {
            if let Some(first) = p.0.first_mut() {
                if first.pair > i {
                    first.pair -= 1;
                }
            }
        }
    };
    for x in &mut cg.intersections {
        shift(&mut x.end_a);
        shift(&mut x.end_b);
    }
    for s in &mut cg.spheres {
        for o in s.pending.iter_mut().filter_map(|p| p.other.as_mut()) {
            shift(o);
        }
    }
    for o in pending.iter_mut().filter_map(|p| p.other.as_mut()) {
        shift(o);
    }

    let sphere = Sphere {
        cap_a: cap_a.clone(),
        cap_b: cap_b.clone(),
        id,
        label: g,
        pending,
        piece: i,
    };
    cg.spheres.push(sphere.clone());
    let rewrite = Rewrite {
        mv: Move::Contract {
            piece: i,
            cap_a: cap_a.clone(),
            cap_b: cap_b.clone(),
        },
        stage: StagePath::root(),
        genus_before,
        genus_after: genus_before - 1,
        labels,
    };
    Ok((sphere, rewrite))
}

/// Pushes every queued sheet off sphere `s`.
pub fn pushoff(cg: &CappedGrope, s: &SphereId) -> Result<CappedGrope, MoveError> {
    pushoff_logged(cg, s).map(|(out, _)| out)
}

/// [`pushoff`] together with the rewrite record.
pub fn pushoff_logged(cg: &CappedGrope, s: &SphereId) -> Result<(CappedGrope, Rewrite), MoveError> {
    let mut out = cg.clone();
    let rewrite = pushoff_mut(&mut out, s)?;
    Ok((out, rewrite))
}

/// [`pushoff`] in place.
pub fn pushoff_mut(cg: &mut CappedGrope, s: &SphereId) -> Result<Rewrite, MoveError> {
    let idx = cg
        .spheres
        .iter()
        .position(|x| x.id == *s)
        .ok_or_else(|| MoveError::UnknownSphere(s.clone()))?;
    let queue = std::mem::take(&mut cg.spheres[idx].pending);
    let g = cg.spheres[idx].label.clone();
    let here = SheetRef::Sphere(s.clone());
    let mut labels = Vec::new();
    let mut created = Vec::with_capacity(2 * queue.len());
    if !queue.is_empty() {
        let existing: HashSet<&str> = cg.intersections.iter().map(|i| i.id.as_str()).collect();
        let mut fresh = HashSet::new();
        for p in queue {
            let g = if p.label == g.inverse() {
                p.label.clone()
            } else {
                g.clone()
            };
            let x = p.label.mul(&g.inverse());
            let l = x.mul(&x.inverse());
            labels.push(format!("{}: ({}) ({})^-1 = {}", p.id, x, x, l));
            let other = p.other.unwrap_or_else(|| here.clone());
            for copy in ["p1", "p2"] {
                let mut id = format!("{}.{copy}", p.id);
                while existing.contains(id.as_str()) || !fresh.insert(id.clone()) {
                    id.push('\'');
                }
                created.push(Intersection::new(id, other.clone(), here.clone(), l.clone()));
            }
        }
    }
    cg.intersections.extend(created);
    let genus = cg.body.root.genus();
    let rewrite = Rewrite {
        mv: Move::Pushoff { sphere: s.clone() },
        stage: StagePath::root(),
        genus_before: genus,
        genus_after: genus,
        labels,
    };
    Ok(rewrite)
}
