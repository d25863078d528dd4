//! Lower bounds for the Gordian distance `d(J, K)`.
//!
//! Two obstructions are evaluated on the linking form `L` of `-J # K`,
//! whose order is `det(J)·det(K)`; both need coprime determinants.
//!
//! - d1: if `d(J, K) = 1`, some single generator `g` of `L` has
//!   `lk(g, g) = 2ε / (det(J)·det(K))` for a sign `ε`.
//! - d2: if `d(J, K) ≤ 2`, then `2·L` is isometric to `λ(C)` for some
//!   `C ∈ C_d ∪ C_{-d}` with `d = det(J)·det(K)`.
//!
//! These are reported next to the signature, `s`, `τ` and `F_p`-rank bounds
//! and the upper bound `u(J) + u(K)`.

mod candidates;
mod invariants;
mod report;
mod search;

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactmat::QmodZ;
use crate::knots::{ExprError, KnotError};
use crate::linkform::{GroupElement, LinkError, DEFAULT_GROUP_CAP};

pub use candidates::{candidate_matrices, candidate_set, CandidateMatrix};
pub use invariants::{Invariants, KnotInvariants};
pub use report::{classical_bounds, report, report_for, BoundReport, ClassicalBounds, ReportOptions};
pub use search::{d1_obstruction, d2_obstruction, lambda_isometric, IsometrySearch};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ObstructError {
    #[error("determinant {0} must be odd and nonzero")]
    EvenDeterminant(i64),
    #[error("determinant {0} is too large for candidate enumeration")]
    DeterminantTooLarge(String),
    #[error("linking form has order {found}, expected {expected}")]
    OrderMismatch { expected: String, found: String },
    #[error("search cancelled")]
    Cancelled,
    #[error("inconsistent bounds for ({j}, {k}): lower {lower} exceeds upper {upper}")]
    Inconsistent {
        j: String,
        k: String,
        lower: u32,
        upper: u32,
    },
    #[error(transparent)]
    Link(#[from] LinkError),
    #[error(transparent)]
    Knot(#[from] KnotError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

impl ObstructError {
    pub fn is_cap(&self) -> bool {
        matches!(
            self,
            ObstructError::Link(LinkError::CapExceeded { .. } | LinkError::OrderOverflow(_))
                | ObstructError::DeterminantTooLarge(_)
        )
    }
}

/// Group-order cap and cooperative cancellation for exhaustive searches.
#[derive(Debug, Clone)]
pub struct SearchLimits {
    pub cap: u64,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            cap: DEFAULT_GROUP_CAP,
            cancel: None,
        }
    }
}

impl SearchLimits {
    pub fn with_cap(cap: u64) -> Self {
        SearchLimits { cap, cancel: None }
    }

    pub(crate) fn check(&self) -> Result<(), ObstructError> {
        match &self.cancel {
            Some(flag) if flag.load(Ordering::Relaxed) => Err(ObstructError::Cancelled),
            _ => Ok(()),
        }
    }
}

/// Which crossing-change signs the d1 test allows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum EpsChoice {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
    #[default]
    #[serde(rename = "both")]
    Both,
}

impl EpsChoice {
    pub fn signs(self) -> &'static [i8] {
        match self {
            EpsChoice::Plus => &[1],
            EpsChoice::Minus => &[-1],
            EpsChoice::Both => &[1, -1],
        }
    }
}

impl fmt::Display for EpsChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EpsChoice::Plus => "+1",
            EpsChoice::Minus => "-1",
            EpsChoice::Both => "both",
        })
    }
}

impl FromStr for EpsChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "+1" | "1" | "+" => Ok(EpsChoice::Plus),
            "-1" | "-" => Ok(EpsChoice::Minus),
            "both" => Ok(EpsChoice::Both),
            other => Err(format!("invalid eps {other:?}: expected +1, -1 or both")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObstructionKind {
    D1,
    D2,
}

/// Outcome of one obstruction. `Cap` means the group was too large to search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Inapplicable,
    Holds,
    Violated,
    Cap,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Inapplicable => "inapplicable",
            Status::Holds => "holds",
            Status::Violated => "violated",
            Status::Cap => "cap",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Witness {
    /// A generator with the required self-link.
    Generator {
        element: GroupElement,
        eps: i8,
        self_link: QmodZ,
    },
    /// `v1, v2` generate the group and realize `C⁻¹` under the doubled form.
    Isometry {
        matrix: CandidateMatrix,
        v1: GroupElement,
        v2: GroupElement,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionVerdict {
    pub kind: ObstructionKind,
    pub status: Status,
    pub witness: Option<Witness>,
    pub notes: String,
}

impl ObstructionVerdict {
    pub(crate) fn new(kind: ObstructionKind, status: Status, notes: impl Into<String>) -> Self {
        ObstructionVerdict {
            kind,
            status,
            witness: None,
            notes: notes.into(),
        }
    }

    pub fn violated(&self) -> bool {
        self.status == Status::Violated
    }

    /// The lower bound on `d` this verdict proves, if any.
    pub fn bound(&self) -> Option<u32> {
        self.violated().then_some(match self.kind {
            ObstructionKind::D1 => 2,
            ObstructionKind::D2 => 3,
        })
    }
}
