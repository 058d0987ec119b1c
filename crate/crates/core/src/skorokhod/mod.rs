//! The deterministic Skorokhod problem `ξ = x0 + w + φ` on a uniform grid.
//!
//! Three solvers share one solution type: penalization, recursive projection,
//! and the closed-form map on the half-line. The diagnostics measure how well a
//! solution honours containment, complementarity and normal pushes.

mod diagnostics;
mod holder;
mod path;
mod solve;

pub use diagnostics::{
    complementarity_defect, containment_margin, excursion_report, excursion_scan, normal_alignment_defect,
    reflection_schedule, Complementarity, ExcursionReport, ReflectionSchedule,
};
pub use holder::{
    epsilon_alpha, holder_norm, holder_norm_with, holder_stats, oscillation, reflection_constants, tv_bound_rhs,
    HolderMethod, HolderNorm, HolderStats, ReflectionConstants, EXACT_HOLDER_MAX_N,
};
pub use path::{total_variation, Grid, Path};
pub(crate) use solve::{check_start, penalized_core, projected_core, substeps_for, CoreOut};
pub use solve::{solve_halfline_explicit, solve_penalized, solve_projected, SubstepPolicy};

use alloc::vec::Vec;
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::linalg::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SkorokhodError {
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("path length {got} does not match grid length {expected}")]
    GridMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("driver must start at the origin (|w_0| = {norm})")]
    DriverNotAnchored { norm: f64 },
    #[error("initial point lies at distance {distance} outside the closure")]
    NotInClosure { distance: f64 },
    #[error("increment {increment} in cell {index} exceeds r0/2 = {limit}; refine the grid")]
    StepTooLarge { index: usize, increment: f64, limit: f64 },
    #[error("substep stability factor {theta} exceeds 1")]
    UnstableStep { theta: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How a solution was produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Penalized { m: f64, substeps: usize },
    Projected,
    ExplicitHalfline,
}

/// `(ξ, φ, |φ|)` on a common grid, with `ξ_k = x0 + w_k + φ_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SkorokhodSolution<const D: usize> {
    pub x0: Point<D>,
    pub xi: Path<D>,
    pub phi: Path<D>,
    /// Running total variation of `φ`; for the penalized method accumulated
    /// over substeps.
    pub tv: Vec<f64>,
    pub method: Method,
}

impl<const D: usize> SkorokhodSolution<D> {
    pub fn grid(&self) -> Grid {
        self.xi.grid
    }

    pub fn tv_final(&self) -> f64 {
        self.tv.last().copied().unwrap_or(0.0)
    }

    /// `max_k |ξ_k − x0 − w_k − φ_k|`.
    pub fn identity_defect(&self, w: &Path<D>) -> f64 {
        self.xi
            .values
            .iter()
            .zip(&w.values)
            .zip(&self.phi.values)
            .map(|((xi, w), phi)| (*xi - self.x0 - *w - *phi).norm())
            .fold(0.0, f64::max)
    }
}
