//! Reflecting domains and the penalty field.
//!
//! Normal-cone vectors follow the exterior-ball convention: `n ∈ N_{x,r}` iff
//! the open ball `B(x − r n, r)` misses the domain. For every kind this makes
//! `n` an *inward* unit normal: on the half-line `(0, ∞)` at `x = 0` it is `+1`;
//! on the unit ball at `(1, 0)` it is `(−1, 0)`; on the inner sphere of a shell
//! it points away from the centre, on the outer sphere towards it.

mod conditions;
mod domain;
mod penalty;
mod psi;

pub use conditions::{
    check_condition_c, verify_condition_a, verify_condition_b, ConditionAReport, ConditionBReport,
    ConditionCReport,
};
pub use domain::{Domain, DomainKind, Face, Location};
pub use penalty::PenaltyField;
pub use psi::{PsiField, PsiSpec};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point at distance {distance} from the closure is outside the projection reach r0 = {r0}")]
    OutOfReach { distance: f64, r0: f64 },
    #[error("point is not on the boundary (distance to boundary {distance})")]
    NotOnBoundary { distance: f64 },
    #[error("domain carries no Condition (C) function")]
    PsiMissing,
    #[error("invalid domain: {0}")]
    Invalid(&'static str),
    #[error("domain is not admissible for the penalty construction: {0}")]
    NotAdmissible(&'static str),
}
