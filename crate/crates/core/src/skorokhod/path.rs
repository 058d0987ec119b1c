use alloc::vec::Vec;

use super::SkorokhodError;
use crate::linalg::Point;

/// A uniform time grid `t_k = t0 + k dt`, `k = 0..=n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub t0: f64,
    pub dt: f64,
    /// Number of cells.
    pub n: usize,
}

impl Grid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self, SkorokhodError> {
        if !(dt > 0.0 && dt.is_finite()) || !t0.is_finite() {
            return Err(SkorokhodError::InvalidGrid("dt must be positive and finite"));
        }
        if n == 0 {
            return Err(SkorokhodError::InvalidGrid("need at least one cell"));
        }
        Ok(Self { t0, dt, n })
    }

    /// `n` cells covering `[0, horizon]`.
    pub fn uniform(horizon: f64, n: usize) -> Result<Self, SkorokhodError> {
        if n == 0 {
            return Err(SkorokhodError::InvalidGrid("need at least one cell"));
        }
        Self::new(0.0, horizon / n as f64, n)
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn horizon(&self) -> f64 {
        self.n as f64 * self.dt
    }

    /// Number of grid points, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A trajectory sampled on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct Path<const D: usize> {
    pub grid: Grid,
    pub values: Vec<Point<D>>,
}

impl<const D: usize> Path<D> {
    pub fn new(grid: Grid, values: Vec<Point<D>>) -> Result<Self, SkorokhodError> {
        if values.len() != grid.len() {
            return Err(SkorokhodError::GridMismatch { expected: grid.len(), got: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(SkorokhodError::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Point<D>) -> Result<Self, SkorokhodError> {
        Self::new(grid, (0..grid.len()).map(|k| f(grid.time(k))).collect())
    }

    pub fn constant(grid: Grid, x: Point<D>) -> Self {
        Self { grid, values: alloc::vec![x; grid.len()] }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, Point::zero())
    }

    #[inline]
    pub fn increment(&self, k: usize) -> Point<D> {
        self.values[k + 1] - self.values[k]
    }

    pub fn last(&self) -> Point<D> {
        *self.values.last().expect("paths are nonempty")
    }

    /// `‖w‖_T = max_k |w_k|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(Point::norm).fold(0.0, f64::max)
    }

    /// Grid modulus `max_k |w_{k+1} − w_k|`.
    pub fn max_increment(&self) -> f64 {
        (0..self.grid.n).map(|k| self.increment(k).norm()).fold(0.0, f64::max)
    }

    /// `max_k |a_k − b_k|`; the grids must have the same length.
    pub fn sup_dist(&self, other: &Self) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "paths on different grids");
        self.values.iter().zip(&other.values).map(|(a, b)| a.dist(b)).fold(0.0, f64::max)
    }

    pub fn map(&self, f: impl Fn(&Point<D>) -> Point<D>) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(f).collect() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| *v * c)
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values.len() == other.values.len()
    }
}

impl Path<1> {
    pub fn from_scalars(grid: Grid, xs: &[f64]) -> Result<Self, SkorokhodError> {
        Self::new(grid, xs.iter().map(|x| Point([*x])).collect())
    }

    pub fn scalars(&self) -> Vec<f64> {
        self.values.iter().map(|v| v[0]).collect()
    }
}

/// Grid total variation `Σ_k |Δ w_k|`.
pub fn total_variation<const D: usize>(path: &Path<D>) -> f64 {
    (0..path.grid.n).map(|k| path.increment(k).norm()).sum()
}
