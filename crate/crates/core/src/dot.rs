//! Graphviz rendering.
//!
//! Stages are boxes labeled with their genus, tips and caps are ellipses
//! listing the caps' group elements, spheres are double circles, and each
//! intersection is a dashed undirected edge labeled with its group element.

use std::collections::HashMap;
use std::fmt::Write;

use crate::capped::{CappedGrope, SheetRef};
use crate::grope::{Side, Slot, Stage, StagePath, TipId};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' | '\\' => {
                out.push('\\');
                out.push(ch);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out.push('"');
    out
}

struct Renderer<'a> {
    cg: &'a CappedGrope,
    out: String,
    stage_ids: HashMap<StagePath, String>,
    tip_ids: HashMap<TipId, String>,
}

impl Renderer<'_> {
    fn stage(&mut self, path: StagePath, stage: &Stage) -> String {
        let id = format!("s{}", self.stage_ids.len());
        let _ = writeln!(
            self.out,
            "  {id} [shape=box, label={}];",
            quote(&format!("genus {}", stage.genus()))
        );
        self.stage_ids.insert(path.clone(), id.clone());
        for (i, p) in stage.pairs.iter().enumerate() {
            for (side, slot) in [(Side::Alpha, &p.alpha), (Side::Beta, &p.beta)] {
                let child = match slot {
                    Slot::Tip(t) => self.tip(t),
                    Slot::Child(s) => self.stage(path.child(i, side), s),
                };
                let tag = match side {
                    Side::Alpha => "a",
                    Side::Beta => "b",
                };
                let _ = writeln!(self.out, "  {id} -> {child} [label={}];", quote(&format!("{tag}{i}")));
            }
        }
        id
    }

    fn tip(&mut self, t: &TipId) -> String {
        let id = format!("t{}", self.tip_ids.len());
        let label = match self.cg.caps.get(t) {
            Some(c) => {
                let classes = self.cg.cap_label_classes(c).unwrap_or_default();
                let set: Vec<String> = classes.iter().map(ToString::to_string).collect();
                format!("{t}\n{c} {{{}}}", set.join(", "))
            }
            None => t.to_string(),
        };
        let _ = writeln!(self.out, "  {id} [shape=ellipse, label={}];", quote(&label));
        self.tip_ids.insert(t.clone(), id.clone());
        id
    }

    fn sheet(&self, s: &SheetRef) -> Option<String> {
        match s {
            SheetRef::Cap(c) => self.cg.tip_of_cap(c).and_then(|t| self.tip_ids.get(t).cloned()),
            SheetRef::Body(p) => self.stage_ids.get(p).cloned(),
            SheetRef::Sphere(id) => self
                .cg
                .spheres
                .iter()
                .position(|x| x.id == *id)
                .map(|i| format!("o{i}")),
        }
    }
}

/// Renders a capped grope as a DOT digraph. Output depends only on the
/// input value.
pub fn render_dot(cg: &CappedGrope) -> String {
    let mut r = Renderer {
        cg,
        out: String::from("digraph grope {\n"),
        stage_ids: HashMap::new(),
        tip_ids: HashMap::new(),
    };
    if !cg.body.root.pairs.is_empty() || cg.spheres.is_empty() {
        r.stage(StagePath::root(), &cg.body.root);
    }
    for (i, s) in cg.spheres.iter().enumerate() {
        let label = format!("{}\n{}", s.id, s.label);
        let _ = writeln!(r.out, "  o{i} [shape=doublecircle, label={}];", quote(&label));
    }
    for x in &cg.intersections {
        let (Some(a), Some(b)) = (r.sheet(&x.end_a), r.sheet(&x.end_b)) else {
            continue;
        };
        let _ = writeln!(
            r.out,
            "  {a} -> {b} [style=dashed, dir=none, label={}];",
            quote(&format!("{}: {}", x.id, x.label))
        );
    }
    r.out.push_str("}\n");
    r.out
}
