//! Symbolic engine for capped gropes.
//!
//! Gropes are trees of surface stages; capping their tips and recording the
//! group elements carried by double points gives a combinatorial model on
//! which splitting, contraction, and pushoff act. The [`magnus`] module
//! supplies the lower-central-series side: a word's depth is the class of the
//! gropes its loop can bound.

pub mod capped;
pub mod commutator;
pub mod dot;
pub mod generate;
pub mod grope;
pub mod json;
pub mod magnus;
pub mod moves;
pub mod parse;
pub mod pipeline;
pub mod splitting;
pub mod trace;
pub mod word;

pub use capped::{CapId, CappedGrope, Intersection, SheetRef, Sphere, SphereId};
pub use commutator::CommutatorExpr;
pub use grope::{Grope, Pair, Side, Slot, Stage, StagePath, TipId};
pub use magnus::{lcs_depth, magnus, Depth, TruncatedSeries};
pub use parse::{parse_expr, parse_word, ParseError};
pub use pipeline::{check_hypotheses, run_surgery, SurgeryKernel, SurgeryOptions, SurgeryResult};
pub use word::{FreeGroup, Generator, GroupWord, Letter, WordError};
