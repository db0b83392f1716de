//! Capped gropes: caps on every tip plus labeled intersections among sheets.
//!
//! Every intersection stores its label once, read from `endA` to `endB`;
//! reading it from the other end gives the inverse. Labels are compared as
//! unoriented loops, so `g` and `g^-1` count as the same group element.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grope::{Grope, Stage, StagePath, TipId, Violation};
use crate::word::{FreeGroup, GroupWord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CappedError {
    #[error("unknown cap {0}")]
    UnknownCap(CapId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CapId(pub String);

impl CapId {
    pub fn new(s: impl Into<String>) -> Self {
        CapId(s.into())
    }
}

impl fmt::Display for CapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SphereId(pub String);

impl fmt::Display for SphereId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A sheet an intersection point can lie on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SheetRef {
    Cap(CapId),
    /// A body surface stage.
    Body(StagePath),
    Sphere(SphereId),
}

impl SheetRef {
    pub fn cap(id: impl Into<String>) -> Self {
        SheetRef::Cap(CapId::new(id))
    }

    pub fn as_cap(&self) -> Option<&CapId> {
        match self {
            SheetRef::Cap(c) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for SheetRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SheetRef::Cap(c) => write!(f, "cap {c}"),
            SheetRef::Body(p) => write!(f, "body {p}"),
            SheetRef::Sphere(s) => write!(f, "sphere {s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Intersection {
    #[serde(rename = "endA")]
    pub end_a: SheetRef,
    #[serde(rename = "endB")]
    pub end_b: SheetRef,
    pub id: String,
    /// Double-point loop read from `endA` to `endB`.
    pub label: GroupWord,
}

impl Intersection {
    pub fn new(id: impl Into<String>, end_a: SheetRef, end_b: SheetRef, label: GroupWord) -> Self {
        Intersection {
            id: id.into(),
            end_a,
            end_b,
            label,
        }
    }

    pub fn touches(&self, s: &SheetRef) -> bool {
        self.end_a == *s || self.end_b == *s
    }

    /// Label read from `from` toward the other end; `None` if `from` is not
    /// an endpoint. A self-intersection reads the stored label.
    pub fn label_from(&self, from: &SheetRef) -> Option<GroupWord> {
        if self.end_a == *from {
            Some(self.label.clone())
        } else if self.end_b == *from {
            Some(self.label.inverse())
        } else {
            None
        }
    }

    /// The opposite end to `s`, if `s` is one end.
    pub fn other_end(&self, s: &SheetRef) -> Option<&SheetRef> {
        if self.end_a == *s {
            Some(&self.end_b)
        } else if self.end_b == *s {
            Some(&self.end_a)
        } else {
            None
        }
    }
}

/// An intersection waiting to be pushed off a contracted piece.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PendingPushoff {
    pub id: String,
    /// Label read from `other` toward the removed sheet.
    pub label: GroupWord,
    /// The sheet that met the piece; `None` when both ends were in the piece.
    pub other: Option<SheetRef>,
}

/// A sphere left behind by contracting a dyadic piece along two caps.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sphere {
    #[serde(rename = "capA")]
    pub cap_a: CapId,
    #[serde(rename = "capB")]
    pub cap_b: CapId,
    pub id: SphereId,
    /// The group element shared by the two caps (identity if none).
    pub label: GroupWord,
    pub pending: Vec<PendingPushoff>,
    /// First-stage pair index of the piece at the time it was contracted.
    pub piece: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CappedGrope {
    pub body: Grope,
    pub caps: BTreeMap<TipId, CapId>,
    pub intersections: Vec<Intersection>,
    pub spheres: Vec<Sphere>,
    /// Only caps and spheres may meet; the body stays disjoint from everything.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CappedViolation {
    Body(Violation),
    UncappedTip(TipId),
    CapOnUnknownTip(TipId),
    DuplicateCap(CapId),
    DuplicateIntersection(String),
    DuplicateSphere(SphereId),
    UnknownSheet { intersection: String, sheet: SheetRef },
    BodyBody(String),
    StrictBodyEndpoint(String),
    LabelOutsideAlphabet { intersection: String, rank: u32 },
}

impl fmt::Display for CappedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CappedViolation::Body(v) => write!(f, "{v}"),
            CappedViolation::UncappedTip(t) => write!(f, "tip {t} has no cap"),
            CappedViolation::CapOnUnknownTip(t) => write!(f, "cap attached to unknown tip {t}"),
            CappedViolation::DuplicateCap(c) => write!(f, "cap {c} sits on more than one tip"),
            CappedViolation::DuplicateIntersection(i) => write!(f, "duplicate intersection id {i}"),
            CappedViolation::DuplicateSphere(s) => write!(f, "duplicate sphere id {s}"),
            CappedViolation::UnknownSheet { intersection, sheet } => {
                write!(f, "intersection {intersection} references unknown {sheet}")
            }
            CappedViolation::BodyBody(i) => write!(f, "intersection {i} joins two body stages"),
            CappedViolation::StrictBodyEndpoint(i) => {
                write!(f, "intersection {i} touches the body of a strict capped grope")
            }
            CappedViolation::LabelOutsideAlphabet { intersection, rank } => {
                write!(f, "intersection {intersection} has a label outside x1..x{rank}")
            }
        }
    }
}

impl CappedGrope {
    /// Caps every tip of `body` with a cap named after it (`t` gets `c:t`).
    pub fn with_default_caps(body: Grope) -> Self {
        let caps = body
            .tips()
            .into_iter()
            .map(|t| {
                let c = CapId(format!("c:{}", t.0));
                (t, c)
            })
            .collect();
        CappedGrope {
            body,
            caps,
            intersections: Vec::new(),
            spheres: Vec::new(),
            strict: false,
        }
    }

    pub fn tip_of_cap(&self, c: &CapId) -> Option<&TipId> {
        self.caps.iter().find(|(_, v)| *v == c).map(|(t, _)| t)
    }

    pub fn has_cap(&self, c: &CapId) -> bool {
        self.caps.values().any(|v| v == c)
    }

    /// Caps in tip traversal order.
    pub fn caps_in_order(&self) -> Vec<CapId> {
        self.body
            .tips()
            .iter()
            .filter_map(|t| self.caps.get(t).cloned())
            .collect()
    }

    /// Labels of every intersection on `c`, read from `c`, reduced.
    pub fn cap_labels(&self, c: &CapId) -> Result<Vec<GroupWord>, CappedError> {
        if !self.has_cap(c) {
            return Err(CappedError::UnknownCap(c.clone()));
        }
        let sheet = SheetRef::Cap(c.clone());
        Ok(self.intersections.iter().filter_map(|i| i.label_from(&sheet)).collect())
    }

    /// Distinct nonidentity labels on `c`, as unoriented representatives.
    pub fn cap_label_classes(&self, c: &CapId) -> Result<BTreeSet<GroupWord>, CappedError> {
        Ok(self
            .cap_labels(c)?
            .into_iter()
            .filter(|w| !w.is_identity())
            .map(|w| w.unoriented())
            .collect())
    }

    /// `cap_label_classes` for every cap at once.
    pub fn label_classes_by_cap(&self) -> HashMap<CapId, BTreeSet<GroupWord>> {
        let mut out: HashMap<CapId, BTreeSet<GroupWord>> =
            self.caps.values().map(|c| (c.clone(), BTreeSet::new())).collect();
        for i in &self.intersections {
            if i.label.is_identity() {
                continue;
            }
            let class = i.label.unoriented();
            for end in [&i.end_a, &i.end_b] {
                if let SheetRef::Cap(c) = end {
                    if let Some(set) = out.get_mut(c) {
                        set.insert(class.clone());
                    }
                }
            }
        }
        out
    }

    /// Distinct nonidentity labels over all intersections, unoriented.
    pub fn distinct_labels(&self) -> BTreeSet<GroupWord> {
        self.intersections
            .iter()
            .filter(|i| !i.label.is_identity())
            .map(|i| i.label.unoriented())
            .collect()
    }

    pub fn distinct_label_count(&self) -> usize {
        self.distinct_labels().len()
    }

    pub fn is_pi1_null(&self) -> bool {
        self.intersections.iter().all(|i| i.label.is_identity())
    }

    /// Intersections with at least one end on sphere `s`.
    pub fn sphere_star<'a>(&'a self, s: &'a SphereId) -> impl Iterator<Item = &'a Intersection> + 'a {
        let sheet = SheetRef::Sphere(s.clone());
        self.intersections.iter().filter(move |i| i.touches(&sheet))
    }

    pub fn sphere(&self, s: &SphereId) -> Option<&Sphere> {
        self.spheres.iter().find(|x| x.id == *s)
    }

    pub fn max_label_rank(&self) -> u32 {
        self.intersections.iter().map(|i| i.label.min_rank()).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Vec<CappedViolation> {
        self.validate_in(None)
    }

    /// Structural checks, plus an alphabet check when `group` is given.
    pub fn validate_in(&self, group: Option<FreeGroup>) -> Vec<CappedViolation> {
        let mut out = Vec::new();
        let contracted = !self.spheres.is_empty();
        for v in self.body.validate() {
            // A first stage emptied by contraction is expected.
            if contracted && v == Violation::GenusZero(StagePath::root()) {
                continue;
            }
            out.push(CappedViolation::Body(v));
        }
        let tips: Vec<TipId> = self.body.tips();
        let tip_set: HashSet<&TipId> = tips.iter().collect();
        for t in &tips {
            if !self.caps.contains_key(t) {
                out.push(CappedViolation::UncappedTip(t.clone()));
            }
        }
        let mut cap_ids = HashSet::new();
        for (t, c) in &self.caps {
            if !tip_set.contains(t) {
                out.push(CappedViolation::CapOnUnknownTip(t.clone()));
            }
            if !cap_ids.insert(c) {
                out.push(CappedViolation::DuplicateCap(c.clone()));
            }
        }
        let mut sphere_ids = HashSet::new();
        for s in &self.spheres {
            if !sphere_ids.insert(&s.id) {
                out.push(CappedViolation::DuplicateSphere(s.id.clone()));
            }
        }
        let mut seen = HashSet::new();
        for i in &self.intersections {
            if !seen.insert(&i.id) {
                out.push(CappedViolation::DuplicateIntersection(i.id.clone()));
            }
            for end in [&i.end_a, &i.end_b] {
                let known = match end {
                    SheetRef::Cap(c) => cap_ids.contains(c),
                    SheetRef::Body(p) => self.body.stage_at(p).is_some_and(|s| !s.pairs.is_empty()),
                    SheetRef::Sphere(s) => sphere_ids.contains(s),
                };
                if !known {
                    out.push(CappedViolation::UnknownSheet {
                        intersection: i.id.clone(),
                        sheet: end.clone(),
                    });
                }
            }
            let body_ends = [&i.end_a, &i.end_b]
                .iter()
                .filter(|e| matches!(e, SheetRef::Body(_)))
                .count();
            if body_ends == 2 {
                out.push(CappedViolation::BodyBody(i.id.clone()));
            } else if body_ends == 1 && self.strict {
                out.push(CappedViolation::StrictBodyEndpoint(i.id.clone()));
            }
            if let Some(g) = group {
                if g.check(&i.label).is_err() {
                    out.push(CappedViolation::LabelOutsideAlphabet {
                        intersection: i.id.clone(),
                        rank: g.rank,
                    });
                }
            }
        }
        out
    }
}

/// Interchange form: the grope document plus cap and intersection data, with
/// keys in sorted order.
#[derive(Serialize, Deserialize)]
struct CappedDoc {
    caps: BTreeMap<TipId, CapId>,
    #[serde(default)]
    closed: bool,
    #[serde(default)]
    intersections: Vec<Intersection>,
    root: Stage,
    #[serde(default)]
    spheres: Vec<Sphere>,
    #[serde(default)]
    strict: bool,
}

impl Serialize for CappedGrope {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CappedDoc {
            caps: self.caps.clone(),
            closed: self.body.closed,
            intersections: self.intersections.clone(),
            root: self.body.root.clone(),
            spheres: self.spheres.clone(),
            strict: self.strict,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CappedGrope {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = CappedDoc::deserialize(deserializer)?;
        Ok(CappedGrope {
            body: Grope {
                closed: doc.closed,
                root: doc.root,
            },
            caps: doc.caps,
            intersections: doc.intersections,
            spheres: doc.spheres,
            strict: doc.strict,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grope::{Pair, Slot};

    fn w(s: &str) -> GroupWord {
        s.parse().unwrap()
    }

    /// Genus-2 surface, caps c1..c4 on tips t1..t4.
    fn surface2() -> CappedGrope {
        let body = Grope::new(Stage::surface(2, "t"));
        let caps = (1..=4)
            .map(|i| (TipId(format!("t{i}")), CapId(format!("c{i}"))))
            .collect();
        CappedGrope {
            body,
            caps,
            intersections: Vec::new(),
            spheres: Vec::new(),
            strict: false,
        }
    }

    fn inter(id: &str, a: &str, b: &str, label: &str) -> Intersection {
        Intersection::new(id, SheetRef::cap(a), SheetRef::cap(b), w(label))
    }

    #[test]
    fn cap_labels_examples() {
        let mut cg = surface2();
        assert!(cg.cap_labels(&CapId::new("c1")).unwrap().is_empty());
        cg.intersections.push(inter("i1", "c1", "c3", "x1"));
        cg.intersections.push(inter("i2", "c1", "c4", "x1^-1 x1 x1"));
        assert_eq!(cg.cap_labels(&CapId::new("c1")).unwrap(), vec![w("x1"), w("x1")]);
        // read from the far end the label inverts
        assert_eq!(cg.cap_labels(&CapId::new("c3")).unwrap(), vec![w("x1^-1")]);
        assert_eq!(
            cg.cap_labels(&CapId::new("nope")),
            Err(CappedError::UnknownCap(CapId::new("nope")))
        );
    }

    #[test]
    fn cap_meeting_another_at_two_elements() {
        let mut cg = surface2();
        cg.intersections.push(inter("i1", "c1", "c2", "x1"));
        cg.intersections.push(inter("i2", "c1", "c2", "x2"));
        assert_eq!(cg.cap_labels(&CapId::new("c1")).unwrap(), vec![w("x1"), w("x2")]);
        assert_eq!(cg.cap_label_classes(&CapId::new("c2")).unwrap().len(), 2);
    }

    #[test]
    fn distinct_count_examples() {
        let mut cg = surface2();
        assert_eq!(cg.distinct_label_count(), 0);
        cg.intersections.push(inter("i1", "c1", "c2", "x1"));
        cg.intersections.push(inter("i2", "c3", "c2", "x1^-1"));
        cg.intersections.push(inter("i3", "c3", "c4", "x2"));
        assert_eq!(cg.distinct_label_count(), 2);
        let mut flipped = cg.clone();
        for i in &mut flipped.intersections {
            i.label = i.label.inverse();
        }
        assert_eq!(flipped.distinct_label_count(), 2);
        let mut null = surface2();
        null.intersections.push(inter("i1", "c1", "c2", "1"));
        assert_eq!(null.distinct_label_count(), 0);
    }

    #[test]
    fn pi1_null_examples() {
        let mut cg = surface2();
        assert!(cg.is_pi1_null());
        cg.intersections.push(inter("i1", "c1", "c2", "x1 x1^-1"));
        assert!(cg.is_pi1_null());
        cg.intersections.push(inter("i2", "c1", "c2", "x1"));
        assert!(!cg.is_pi1_null());
    }

    #[test]
    fn validation() {
        let mut cg = surface2();
        assert!(cg.validate().is_empty());
        cg.intersections.push(Intersection::new(
            "i1",
            SheetRef::Body(StagePath::root()),
            SheetRef::Body(StagePath::root()),
            w("x1"),
        ));
        cg.intersections.push(Intersection::new(
            "i1",
            SheetRef::cap("c1"),
            SheetRef::Body(StagePath::root().child(0, crate::grope::Side::Alpha)),
            w("x1"),
        ));
        let v = cg.validate();
        assert!(v.contains(&CappedViolation::BodyBody("i1".into())));
        assert!(v.contains(&CappedViolation::DuplicateIntersection("i1".into())));
        assert!(v.iter().any(|x| matches!(x, CappedViolation::UnknownSheet { .. })));

        let mut strict = surface2();
        strict.strict = true;
        strict.intersections.push(Intersection::new(
            "i1",
            SheetRef::cap("c1"),
            SheetRef::Body(StagePath::root()),
            w("x1"),
        ));
        assert_eq!(
            strict.validate(),
            vec![CappedViolation::StrictBodyEndpoint("i1".into())]
        );
        assert!(!strict.validate_in(Some(FreeGroup::new(0))).is_empty());

        let mut uncapped = surface2();
        uncapped.caps.remove(&TipId::new("t2"));
        assert_eq!(
            uncapped.validate(),
            vec![CappedViolation::UncappedTip(TipId::new("t2"))]
        );
    }

    #[test]
    fn json_round_trip_keeps_multiplicity() {
        let mut cg = surface2();
        cg.body.root.pairs[0] = Pair::new(
            Slot::child(Stage::new(vec![Pair::new(Slot::tip("t1"), Slot::tip("t5"))])),
            Slot::tip("t2"),
        );
        cg.caps.insert(TipId::new("t5"), CapId::new("c5"));
        cg.intersections.push(inter("i1", "c1", "c2", "x1"));
        cg.intersections.push(inter("i2", "c1", "c2", "x1"));
        cg.intersections.push(Intersection::new(
            "i3",
            SheetRef::cap("c5"),
            SheetRef::Body(StagePath::root()),
            w("x2^-1"),
        ));
        let s = serde_json::to_string(&cg).unwrap();
        assert!(s.starts_with(r#"{"caps":{"#));
        assert!(s.contains(r#""endB":{"body":[]}"#));
        let back: CappedGrope = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cg);
    }
}
