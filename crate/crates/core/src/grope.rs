//! Gropes as trees of surface stages.
//!
//! A stage of genus g is an ordered list of g symplectic pairs; each slot of a
//! pair is either a tip (nothing attached) or a higher stage. Class follows
//! the inductive rule: a tip counts 1, a stage is the minimum over its pairs
//! of the two slot classes added.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::commutator::CommutatorExpr;
use crate::word::GroupWord;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GropeError {
    #[error("malformed grope: {0}")]
    Invalid(Violation),
    #[error("tip {0} has no assigned word")]
    MissingTip(TipId),
    #[error("expression {0} is not a product of commutators")]
    NotCommutatorProduct(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TipId(pub String);

impl TipId {
    pub fn new(s: impl Into<String>) -> Self {
        TipId(s.into())
    }
}

impl fmt::Display for TipId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Alpha,
    Beta,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Alpha => Side::Beta,
            Side::Beta => Side::Alpha,
        }
    }
}

/// One step up the tree: the slot `side` of pair `pair`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, Side)", into = "(usize, Side)")]
pub struct Step {
    pub pair: usize,
    pub side: Side,
}

impl From<(usize, Side)> for Step {
    fn from((pair, side): (usize, Side)) -> Self {
        Step { pair, side }
    }
}

impl From<Step> for (usize, Side) {
    fn from(s: Step) -> Self {
        (s.pair, s.side)
    }
}

/// Address of a stage; the empty path is the first stage.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct StagePath(pub Vec<Step>);

impl StagePath {
    pub fn root() -> Self {
        StagePath(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, pair: usize, side: Side) -> StagePath {
        let mut steps = self.0.clone();
        steps.push(Step { pair, side });
        StagePath(steps)
    }

    pub fn parent(&self) -> Option<(StagePath, Step)> {
        let (last, init) = self.0.split_last()?;
        Some((StagePath(init.to_vec()), *last))
    }

    pub fn starts_with(&self, prefix: &StagePath) -> bool {
        self.0.starts_with(&prefix.0)
    }
}

impl fmt::Display for StagePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    #[serde(rename = "tip")]
    Tip(TipId),
    #[serde(rename = "stage")]
    Child(Box<Stage>),
}

impl Slot {
    pub fn tip(id: impl Into<String>) -> Self {
        Slot::Tip(TipId::new(id))
    }

    pub fn child(stage: Stage) -> Self {
        Slot::Child(Box::new(stage))
    }

    pub fn class(&self) -> u32 {
        match self {
            Slot::Tip(_) => 1,
            Slot::Child(s) => s.class(),
        }
    }

    pub fn as_tip(&self) -> Option<&TipId> {
        match self {
            Slot::Tip(t) => Some(t),
            Slot::Child(_) => None,
        }
    }

    fn collect_tips(&self, out: &mut Vec<TipId>) {
        match self {
            Slot::Tip(t) => out.push(t.clone()),
            Slot::Child(s) => s.collect_tips(out),
        }
    }

    pub fn tips(&self) -> Vec<TipId> {
        let mut out = Vec::new();
        self.collect_tips(&mut out);
        out
    }

    fn word(&self, a: &TipAssignment) -> Result<GroupWord, GropeError> {
        match self {
            Slot::Tip(t) => a.get(t).cloned().ok_or_else(|| GropeError::MissingTip(t.clone())),
            Slot::Child(s) => s.word(a),
        }
    }

    /// True when every stage in this slot's subtree has genus 1.
    pub fn is_dyadic(&self) -> bool {
        match self {
            Slot::Tip(_) => true,
            Slot::Child(s) => s.is_dyadic(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(Slot, Slot)", into = "(Slot, Slot)")]
pub struct Pair {
    pub alpha: Slot,
    pub beta: Slot,
}

impl Pair {
    pub fn new(alpha: Slot, beta: Slot) -> Self {
        Pair { alpha, beta }
    }

    pub fn slot(&self, side: Side) -> &Slot {
        match side {
            Side::Alpha => &self.alpha,
            Side::Beta => &self.beta,
        }
    }

    pub fn slot_mut(&mut self, side: Side) -> &mut Slot {
        match side {
            Side::Alpha => &mut self.alpha,
            Side::Beta => &mut self.beta,
        }
    }

    /// Builds a pair with `main` on `side` and `dual` on the other side.
    pub fn oriented(side: Side, main: Slot, dual: Slot) -> Self {
        match side {
            Side::Alpha => Pair::new(main, dual),
            Side::Beta => Pair::new(dual, main),
        }
    }

    pub fn class(&self) -> u32 {
        self.alpha.class() + self.beta.class()
    }
}

impl From<(Slot, Slot)> for Pair {
    fn from((alpha, beta): (Slot, Slot)) -> Self {
        Pair { alpha, beta }
    }
}

impl From<Pair> for (Slot, Slot) {
    fn from(p: Pair) -> Self {
        (p.alpha, p.beta)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stage {
    pub pairs: Vec<Pair>,
}

impl Stage {
    pub fn new(pairs: Vec<Pair>) -> Self {
        Stage { pairs }
    }

    /// Genus-g surface whose tips are named `prefix1, prefix2, ...`.
    pub fn surface(genus: usize, prefix: &str) -> Self {
        Stage::new(
            (0..genus)
                .map(|i| {
                    Pair::new(
                        Slot::tip(format!("{prefix}{}", 2 * i + 1)),
                        Slot::tip(format!("{prefix}{}", 2 * i + 2)),
                    )
                })
                .collect(),
        )
    }

    pub fn genus(&self) -> usize {
        self.pairs.len()
    }

    /// Minimum pair class; 0 for a degenerate genus-zero stage.
    pub fn class(&self) -> u32 {
        self.pairs.iter().map(Pair::class).min().unwrap_or(0)
    }

    pub fn is_dyadic(&self) -> bool {
        self.pairs.len() == 1 && self.pairs[0].alpha.is_dyadic() && self.pairs[0].beta.is_dyadic()
    }

    fn collect_tips(&self, out: &mut Vec<TipId>) {
        for p in &self.pairs {
            p.alpha.collect_tips(out);
            p.beta.collect_tips(out);
        }
    }

    fn word(&self, a: &TipAssignment) -> Result<GroupWord, GropeError> {
        let mut w = GroupWord::identity();
        for p in &self.pairs {
            w = w.mul(&GroupWord::commutator(&p.alpha.word(a)?, &p.beta.word(a)?));
        }
        Ok(w)
    }
}

/// Words assigned to tips.
pub type TipAssignment = BTreeMap<TipId, GroupWord>;

/// Where a tip sits: the slot `side` of pair `pair` in the stage at `stage`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TipLocation {
    pub tip: TipId,
    pub stage: StagePath,
    pub pair: usize,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grope {
    /// Set for closed gropes, where the boundary circle is capped off by the
    /// rest of a sphere; the tree itself is unchanged.
    #[serde(default)]
    pub closed: bool,
    pub root: Stage,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    GenusZero(StagePath),
    DuplicateTip(TipId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::GenusZero(p) => write!(f, "genus zero stage at {p}"),
            Violation::DuplicateTip(t) => write!(f, "duplicate tip {t}"),
        }
    }
}

impl Grope {
    pub fn new(root: Stage) -> Self {
        Grope { closed: false, root }
    }

    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (path, stage) in self.stages() {
            if stage.pairs.is_empty() {
                out.push(Violation::GenusZero(path));
            }
        }
        let mut seen = HashSet::new();
        for t in self.tips() {
            if !seen.insert(t.clone()) {
                out.push(Violation::DuplicateTip(t));
            }
        }
        out
    }

    fn check(&self) -> Result<(), GropeError> {
        match self.validate().into_iter().next() {
            Some(v) => Err(GropeError::Invalid(v)),
            None => Ok(()),
        }
    }

    pub fn class(&self) -> Result<u32, GropeError> {
        self.check()?;
        Ok(self.root.class())
    }

    pub fn tips(&self) -> Vec<TipId> {
        let mut out = Vec::new();
        self.root.collect_tips(&mut out);
        out
    }

    pub fn count_tips(&self) -> usize {
        self.tips().len()
    }

    pub fn is_dyadic(&self) -> bool {
        self.root.is_dyadic()
    }

    pub fn first_stage_genus(&self) -> usize {
        self.root.genus()
    }

    pub fn boundary_word(&self, a: &TipAssignment) -> Result<GroupWord, GropeError> {
        self.root.word(a)
    }

    /// Assigns the i-th tip (traversal order) the generator `x_{i+1}`.
    pub fn injective_assignment(&self) -> TipAssignment {
        self.tips()
            .into_iter()
            .enumerate()
            .map(|(i, t)| (t, GroupWord::generator(i as u32)))
            .collect()
    }

    /// Every stage with its path, depth-first in pair order.
    pub fn stages(&self) -> Vec<(StagePath, &Stage)> {
        fn walk<'a>(path: StagePath, stage: &'a Stage, out: &mut Vec<(StagePath, &'a Stage)>) {
            out.push((path.clone(), stage));
            for (i, p) in stage.pairs.iter().enumerate() {
                for side in [Side::Alpha, Side::Beta] {
                    if let Slot::Child(s) = p.slot(side) {
                        walk(path.child(i, side), s, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(StagePath::root(), &self.root, &mut out);
        out
    }

    pub fn tip_locations(&self) -> Vec<TipLocation> {
        let mut out = Vec::new();
        for (path, stage) in self.stages() {
            for (i, p) in stage.pairs.iter().enumerate() {
                for side in [Side::Alpha, Side::Beta] {
                    if let Slot::Tip(t) = p.slot(side) {
                        out.push(TipLocation {
                            tip: t.clone(),
                            stage: path.clone(),
                            pair: i,
                            side,
                        });
                    }
                }
            }
        }
        // Stage order visits a stage's tips before its children's; re-sort into
        // the slot-by-slot traversal order used by `tips()`.
        let order: BTreeMap<TipId, usize> = self.tips().into_iter().enumerate().map(|(i, t)| (t, i)).collect();
        out.sort_by_key(|l| order[&l.tip]);
        out
    }

    pub fn stage_at(&self, path: &StagePath) -> Option<&Stage> {
        let mut stage = &self.root;
        for step in &path.0 {
            match stage.pairs.get(step.pair)?.slot(step.side) {
                Slot::Child(s) => stage = s,
                Slot::Tip(_) => return None,
            }
        }
        Some(stage)
    }

    pub fn stage_at_mut(&mut self, path: &StagePath) -> Option<&mut Stage> {
        let mut stage = &mut self.root;
        for step in &path.0 {
            match stage.pairs.get_mut(step.pair)?.slot_mut(step.side) {
                Slot::Child(s) => stage = s,
                Slot::Tip(_) => return None,
            }
        }
        Some(stage)
    }

    /// Builds a grope whose boundary word is `eval(e)`.
    ///
    /// A commutator becomes a genus-1 stage and a product of commutators a
    /// stage with one pair per factor. Any other subexpression sitting in a
    /// commutator slot becomes a tip assigned its evaluated word.
    pub fn from_expression(e: &CommutatorExpr) -> Result<(Grope, TipAssignment), GropeError> {
        let mut assignment = TipAssignment::new();
        let mut counter = 0;
        let root = stage_from(e, &mut assignment, &mut counter)
            .ok_or_else(|| GropeError::NotCommutatorProduct(e.to_string()))?;
        Ok((Grope::new(root), assignment))
    }
}

fn commutator_factors<'a>(e: &'a CommutatorExpr, out: &mut Vec<(&'a CommutatorExpr, &'a CommutatorExpr)>) -> bool {
    match e {
        CommutatorExpr::Leaf(_) => false,
        CommutatorExpr::Comm(u, v) => {
            out.push((u, v));
            true
        }
        CommutatorExpr::Prod(fs) => fs.iter().all(|f| commutator_factors(f, out)),
    }
}

fn stage_from(e: &CommutatorExpr, a: &mut TipAssignment, counter: &mut usize) -> Option<Stage> {
    let mut factors = Vec::new();
    if !commutator_factors(e, &mut factors) {
        return None;
    }
    let pairs = factors
        .into_iter()
        .map(|(u, v)| {
            let alpha = slot_from(u, a, counter);
            let beta = slot_from(v, a, counter);
            Pair::new(alpha, beta)
        })
        .collect();
    Some(Stage::new(pairs))
}

fn slot_from(e: &CommutatorExpr, a: &mut TipAssignment, counter: &mut usize) -> Slot {
    // Probe first so tip numbering follows traversal order.
    let mut probe = Vec::new();
    if commutator_factors(e, &mut probe) {
        Slot::child(stage_from(e, a, counter).expect("probed"))
    } else {
        *counter += 1;
        let t = TipId(format!("t{counter}"));
        a.insert(t.clone(), e.eval());
        Slot::Tip(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tip(s: &str) -> Slot {
        Slot::tip(s)
    }

    /// Genus-1 stage over (alpha, beta).
    fn g1(alpha: Slot, beta: Slot) -> Slot {
        Slot::child(Stage::new(vec![Pair::new(alpha, beta)]))
    }

    fn assignment(pairs: &[(&str, &str)]) -> TipAssignment {
        pairs
            .iter()
            .map(|(t, w)| (TipId::new(*t), w.parse().unwrap()))
            .collect()
    }

    #[test]
    fn class_examples() {
        assert_eq!(Grope::new(Stage::surface(3, "t")).class().unwrap(), 2);
        let g = Grope::new(Stage::new(vec![Pair::new(g1(tip("a"), tip("b")), tip("c"))]));
        assert_eq!(g.class().unwrap(), 3);
        // (1, k-1) iterated: each stage pairs a tip with the rest of the tower.
        let mut slot = g1(tip("a1"), tip("a2"));
        for i in 3..=5 {
            slot = g1(tip(&format!("a{i}")), slot);
        }
        let Slot::Child(stage) = slot else { unreachable!() };
        let g = Grope::new(*stage);
        assert_eq!(g.class().unwrap(), 5);
        assert_eq!(g.count_tips(), 5);
    }

    #[test]
    fn class_is_minimum_over_pairs() {
        let g = Grope::new(Stage::new(vec![
            Pair::new(g1(tip("a"), tip("b")), tip("c")),
            Pair::new(tip("d"), tip("e")),
        ]));
        assert_eq!(g.class().unwrap(), 2);
    }

    #[test]
    fn tips_examples() {
        assert_eq!(Grope::new(Stage::surface(4, "t")).count_tips(), 8);
        let g = Grope::new(Stage::new(vec![
            Pair::new(g1(tip("a"), tip("b")), tip("c")),
            Pair::new(tip("d"), tip("e")),
        ]));
        assert_eq!(g.count_tips(), 5);
        let names: Vec<String> = g.tips().into_iter().map(|t| t.0).collect();
        assert_eq!(names, ["a", "b", "c", "d", "e"]);
        let locs = g.tip_locations();
        assert_eq!(locs[0].stage, StagePath::root().child(0, Side::Alpha));
        assert_eq!(locs[2].side, Side::Beta);
    }

    #[test]
    fn dyadic_examples() {
        assert!(Grope::new(Stage::surface(1, "t")).is_dyadic());
        assert!(!Grope::new(Stage::surface(2, "t")).is_dyadic());
        let g = Grope::new(Stage::new(vec![Pair::new(
            Slot::child(Stage::surface(2, "u")),
            tip("c"),
        )]));
        assert!(!g.is_dyadic());
    }

    #[test]
    fn boundary_examples() {
        let g = Grope::new(Stage::surface(1, "t"));
        let a = assignment(&[("t1", "x1"), ("t2", "x2")]);
        assert_eq!(g.boundary_word(&a).unwrap(), "[x1, x2]".parse().unwrap());
        let g = Grope::new(Stage::surface(2, "t"));
        let a = assignment(&[("t1", "x1"), ("t2", "x2"), ("t3", "x3"), ("t4", "x4")]);
        assert_eq!(g.boundary_word(&a).unwrap(), "[x1, x2] [x3, x4]".parse().unwrap());
        let g = Grope::new(Stage::new(vec![Pair::new(g1(tip("a"), tip("b")), tip("c"))]));
        let a = assignment(&[("a", "x1"), ("b", "x2"), ("c", "x3")]);
        assert_eq!(g.boundary_word(&a).unwrap(), "[[x1, x2], x3]".parse().unwrap());
        let missing = assignment(&[("a", "x1")]);
        assert_eq!(g.boundary_word(&missing), Err(GropeError::MissingTip(TipId::new("b"))));
    }

    #[test]
    fn from_expression_examples() {
        let e: CommutatorExpr = "[x1, x2]".parse().unwrap();
        let (g, a) = Grope::from_expression(&e).unwrap();
        assert_eq!(g.class().unwrap(), 2);
        assert_eq!(g.root.genus(), 1);
        assert_eq!(a[&TipId::new("t1")], GroupWord::generator(0));

        let e: CommutatorExpr = "[[x1, x2], x3]".parse().unwrap();
        let (g, a) = Grope::from_expression(&e).unwrap();
        assert_eq!(g.class().unwrap(), 3);
        assert!(matches!(g.root.pairs[0].alpha, Slot::Child(_)));
        assert!(matches!(g.root.pairs[0].beta, Slot::Tip(_)));
        assert_eq!(g.boundary_word(&a).unwrap(), e.eval());

        let e: CommutatorExpr = "[x1, x2] [x3, x4]".parse().unwrap();
        let (g, a) = Grope::from_expression(&e).unwrap();
        assert_eq!(g.root.genus(), 2);
        assert!(g
            .root
            .pairs
            .iter()
            .all(|p| p.alpha.as_tip().is_some() && p.beta.as_tip().is_some()));
        assert_eq!(g.boundary_word(&a).unwrap(), e.eval());

        let e: CommutatorExpr = "[x1 x2, [x3, x1]]".parse().unwrap();
        let (g, a) = Grope::from_expression(&e).unwrap();
        assert_eq!(a[&TipId::new("t1")], "x1 x2".parse().unwrap());
        assert_eq!(g.boundary_word(&a).unwrap(), e.eval());

        assert!(Grope::from_expression(&"x1".parse().unwrap()).is_err());
        assert!(Grope::from_expression(&"[x1, x2] x3".parse().unwrap()).is_err());
    }

    #[test]
    fn validate_examples() {
        let g = Grope::new(Stage::new(vec![Pair::new(
            g1(tip("a"), tip("b")),
            g1(tip("c"), tip("d")),
        )]));
        assert!(g.validate().is_empty());
        let dup = Grope::new(Stage::new(vec![Pair::new(tip("a"), tip("a"))]));
        assert_eq!(dup.validate(), vec![Violation::DuplicateTip(TipId::new("a"))]);
        assert_eq!(dup.validate()[0].to_string(), "duplicate tip a");
        let empty = Grope::new(Stage::new(vec![]));
        assert_eq!(empty.validate()[0].to_string(), "genus zero stage at []");
        assert!(empty.class().is_err());
    }

    #[test]
    fn json_shape() {
        let g = Grope::new(Stage::new(vec![Pair::new(g1(tip("a"), tip("b")), tip("c"))]));
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(
            s,
            r#"{"closed":false,"root":{"pairs":[[{"stage":{"pairs":[[{"tip":"a"},{"tip":"b"}]]}},{"tip":"c"}]]}}"#
        );
        let back: Grope = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);
        let path = StagePath::root().child(0, Side::Alpha).child(1, Side::Beta);
        assert_eq!(path.to_string(), r#"[[0,"alpha"],[1,"beta"]]"#);
    }
}
