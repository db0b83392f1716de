//! Rewrite records. Every move applied to a capped grope is logged with
//! enough data to replay it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::capped::{CapId, CappedGrope, SphereId};
use crate::grope::StagePath;
use crate::moves::{self, MoveError};
use crate::splitting::{self, SplitError};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Move {
    SplitCap {
        cap: CapId,
    },
    SplitStage {
        path: StagePath,
    },
    Contract {
        piece: usize,
        #[serde(rename = "capA")]
        cap_a: CapId,
        #[serde(rename = "capB")]
        cap_b: CapId,
    },
    Pushoff {
        sphere: SphereId,
    },
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::SplitCap { cap } => write!(f, "split_cap {cap}"),
            Move::SplitStage { path } => write!(f, "split_stage {path}"),
            Move::Contract { piece, cap_a, cap_b } => write!(f, "contract piece {piece} along {cap_a},{cap_b}"),
            Move::Pushoff { sphere } => write!(f, "pushoff {sphere}"),
        }
    }
}

/// One applied move: the stage whose genus it changed, and any label
/// computations it performed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Rewrite {
    #[serde(flatten)]
    pub mv: Move,
    pub stage: StagePath,
    pub genus_before: usize,
    pub genus_after: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

impl fmt::Display for Rewrite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} stage={} genus {}->{}",
            self.mv, self.stage, self.genus_before, self.genus_after
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApplyError {
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error(transparent)]
    Move(#[from] MoveError),
}

/// Re-applies a recorded move.
pub fn apply(cg: &CappedGrope, mv: &Move) -> Result<CappedGrope, ApplyError> {
    Ok(match mv {
        Move::SplitCap { cap } => splitting::split_cap(cg, cap)?,
        Move::SplitStage { path } => splitting::split_stage(cg, path)?,
        Move::Contract { piece, cap_a, cap_b } => moves::contract(cg, *piece, cap_a, cap_b)?.0,
        Move::Pushoff { sphere } => moves::pushoff(cg, sphere)?,
    })
}
