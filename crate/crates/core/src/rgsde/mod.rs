//! Reflected G-Brownian motion and reflected G-SDEs, path by path.
//!
//! Under each volatility scenario a G-Brownian path is an ordinary martingale
//! path, so reflection is the deterministic Skorokhod map applied to the
//! driver `Y` built from the coefficients. Three schemes are provided: Picard
//! iteration (`Y` from the previous iterate, then reflect), the penalized SDE,
//! and a one-pass Euler scheme with projection.

mod coefficients;
mod ito;
mod solve;
mod study;

pub use coefficients::{check_coefficients, clamp_events, clamp_to_bound, Builtin, CoefficientCheck, Coefficients};
pub use ito::{build_ito_process, build_y, ItoIntegrands};
pub use solve::{
    direct_euler_batch, direct_euler_reflect, penalized_batch, penalized_sde_solve, picard_solve, reflect_batch,
    reflect_path, PicardConfig, PicardInit, PicardOutcome, PicardTrace, Reflector,
};
pub use study::{
    batch_mean, convergence_study, loglog_slope, simulate_batch, stability_gap, CoeffDeltas, ConvergenceConfig,
    ConvergenceRow, StabilityReport,
};

use alloc::boxed::Box;
use alloc::vec::Vec;
use thiserror::Error;

use crate::linalg::Point;
use crate::skorokhod::{Grid, Method, Path, SkorokhodError, SkorokhodSolution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RgsdeError {
    #[error("path length {got} does not match the bundle grid length {expected}")]
    GridMismatch { expected: usize, got: usize },
    #[error("integrand of norm {value} in cell {cell} exceeds its declared bound {bound}")]
    IntegrandOutOfBound { cell: usize, value: f64, bound: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("Picard iteration did not reach the tolerance in {max_iter} iterations")]
    NoConvergence { max_iter: usize, trace: PicardTrace },
    #[error("path {path}: {source}")]
    AtPath {
        path: u64,
        #[source]
        source: Box<RgsdeError>,
    },
    #[error(transparent)]
    Skorokhod(#[from] SkorokhodError),
}

impl RgsdeError {
    /// The path id carried by [`RgsdeError::AtPath`].
    pub fn path(&self) -> Option<u64> {
        match self {
            RgsdeError::AtPath { path, .. } => Some(*path),
            _ => None,
        }
    }

    pub(crate) fn at(self, path: u64) -> Self {
        match self {
            e @ RgsdeError::AtPath { .. } => e,
            e => RgsdeError::AtPath { path, source: Box::new(e) },
        }
    }
}

/// Which scheme produced a solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RgsdeMethod {
    /// One Skorokhod map applied to a given driver.
    Reflected(Method),
    Picard { iterations: usize, inner: Method },
    Penalized { m: f64, substeps: usize },
    DirectEulerReflect,
}

/// `X = x0 + Y + K` on the bundle grid. `path.xi` is `X`, `path.phi` is `K`
/// and `path.tv` the running `|K|`, so every Skorokhod diagnostic applies.
#[derive(Clone, Debug, PartialEq)]
pub struct RgsdeSolution<const D: usize> {
    pub path: SkorokhodSolution<D>,
    pub y: Path<D>,
    pub seed: u64,
    pub path_index: u64,
    pub method: RgsdeMethod,
}

impl<const D: usize> RgsdeSolution<D> {
    pub fn x(&self) -> &Path<D> {
        &self.path.xi
    }

    pub fn k(&self) -> &Path<D> {
        &self.path.phi
    }

    pub fn ktv(&self) -> &[f64] {
        &self.path.tv
    }

    pub fn x0(&self) -> Point<D> {
        self.path.x0
    }

    pub fn grid(&self) -> Grid {
        self.path.grid()
    }

    /// `max_k |X_k − x0 − Y_k − K_k|`.
    pub fn identity_defect(&self) -> f64 {
        self.path.identity_defect(&self.y)
    }

    /// `(t, X, K, ktv)` rows for tabular output.
    pub fn rows(&self) -> Vec<(f64, Point<D>, Point<D>, f64)> {
        let grid = self.grid();
        (0..grid.len()).map(|k| (grid.time(k), self.x().values[k], self.k().values[k], self.path.tv[k])).collect()
    }
}
