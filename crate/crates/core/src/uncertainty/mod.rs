//! Volatility uncertainty: the G-function of a volatility set, explicit
//! scenarios of the measure family, G-Brownian paths and their quadratic
//! variation, Monte Carlo upper expectations, and a one-dimensional G-heat
//! equation solver used as an oracle.
//!
//! The upper-expectation estimators take the maximum over a finite scenario
//! family, so they bound the true supremum from below.

mod estimate;
mod gheat;
mod scenario;
mod volset;

pub use estimate::{
    bdg_moment_report, build_family, capacity_estimate, evaluate_family, path_holder_report, report_from_values,
    threshold_capacity, upper_expectation, upper_expectation_over, BdgReport, CapacityReport, EstimatorReport,
    HolderReport, HolderRow, SamplerConfig,
};
pub use gheat::{gheat_solve_1d, FeedbackTable, GHeatConfig, GHeatSolution};
pub use scenario::{
    qv_bound_defect, sample_scenario, simulate, simulate_b, GPathBundle, Policy, QvDefect, Scenario, ScenarioLaw,
};
pub use volset::{g_function, g_function_rows, sigma_aa, VolSet};

use thiserror::Error;

use crate::skorokhod::SkorokhodError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UncertaintyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid volatility set: {0}")]
    InvalidVolSet(&'static str),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("volatility of cell {cell} lies outside the set")]
    OutOfSet { cell: usize },
    #[error("policy not supported: {0}")]
    PolicyUnsupported(&'static str),
    #[error("probe vector must be nonzero")]
    ZeroProbe,
    #[error("time step {dt} violates the CFL limit {limit}")]
    CflViolation { dt: f64, limit: f64 },
    #[error("truncation half-width {half_width} below the required {required}")]
    TruncationTooTight { half_width: f64, required: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Grid(#[from] SkorokhodError),
}
