//! Iterated commutator expressions and their weights.

use std::fmt;

use crate::word::{GroupWord, Letter};

/// A bracket expression over signed generators.
///
/// `Comm(u, v)` evaluates to `u v u^-1 v^-1`; `Prod` is an ordered product
/// with at least one factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CommutatorExpr {
    Leaf(Letter),
    Comm(Box<CommutatorExpr>, Box<CommutatorExpr>),
    Prod(Vec<CommutatorExpr>),
}

impl CommutatorExpr {
    pub fn leaf(generator: u32) -> Self {
        CommutatorExpr::Leaf(Letter::pos(generator))
    }

    pub fn comm(u: CommutatorExpr, v: CommutatorExpr) -> Self {
        CommutatorExpr::Comm(Box::new(u), Box::new(v))
    }

    /// `[[...[x_{g0}, x_{g1}], ...], x_{gk}]`. Panics on an empty slice.
    pub fn left_normed(generators: &[u32]) -> Self {
        let mut it = generators.iter();
        let first = CommutatorExpr::leaf(*it.next().expect("left_normed needs a generator"));
        it.fold(first, |acc, &g| CommutatorExpr::comm(acc, CommutatorExpr::leaf(g)))
    }

    pub fn weight(&self) -> u32 {
        match self {
            CommutatorExpr::Leaf(_) => 1,
            CommutatorExpr::Comm(u, v) => u.weight() + v.weight(),
            CommutatorExpr::Prod(fs) => fs.iter().map(|f| f.weight()).min().unwrap_or(1),
        }
    }

    pub fn eval(&self) -> GroupWord {
        match self {
            CommutatorExpr::Leaf(l) => GroupWord::from_letters([*l]),
            CommutatorExpr::Comm(u, v) => GroupWord::commutator(&u.eval(), &v.eval()),
            CommutatorExpr::Prod(fs) => fs.iter().fold(GroupWord::identity(), |acc, f| acc.mul(&f.eval())),
        }
    }

    /// True when the expression contains no `Prod` node.
    pub fn is_pure(&self) -> bool {
        match self {
            CommutatorExpr::Leaf(_) => true,
            CommutatorExpr::Comm(u, v) => u.is_pure() && v.is_pure(),
            CommutatorExpr::Prod(_) => false,
        }
    }
}

impl fmt::Display for CommutatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommutatorExpr::Leaf(l) => write!(f, "{l}"),
            CommutatorExpr::Comm(u, v) => write!(f, "[{u}, {v}]"),
            CommutatorExpr::Prod(fs) => {
                for (i, x) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    match x {
                        CommutatorExpr::Prod(_) => write!(f, "({x})")?,
                        _ => write!(f, "{x}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

impl std::str::FromStr for CommutatorExpr {
    type Err = crate::parse::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        crate::parse::parse_expr(s)
    }
}
