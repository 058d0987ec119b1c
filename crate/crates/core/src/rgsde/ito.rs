use alloc::vec::Vec;

use super::coefficients::{clamp_to_bound, Coefficients};
use super::RgsdeError;
use crate::linalg::Point;
use crate::skorokhod::Path;
use crate::uncertainty::GPathBundle;

/// Left-endpoint increment of `Y` on cell `k` with the coefficients frozen at
/// `(t_k, x_k)`: `f dt + Σ h^{il} Δ⟨B^i, B^l⟩ + Σ g^l ΔB^l`.
pub(crate) fn coefficient_increment<const D: usize, C: Coefficients<D> + ?Sized>(
    coeffs: &C,
    bundle: &GPathBundle<D>,
    k: usize,
    x: &Point<D>,
) -> Point<D> {
    let grid = bundle.grid();
    let t = grid.time(k);
    let bound = coeffs.bound();
    let mut dy = clamp_to_bound(coeffs.drift(t, x), bound, "f") * grid.dt;
    if coeffs.has_qv_drift() {
        let dq = bundle.dqv(k);
        for i in 0..D {
            for l in 0..D {
                if dq.0[i][l] != 0.0 {
                    dy += clamp_to_bound(coeffs.qv_drift(i, l, t, x), bound, "h") * dq.0[i][l];
                }
            }
        }
    }
    if coeffs.has_diffusion() {
        let db = bundle.b.increment(k);
        for l in 0..D {
            if db[l] != 0.0 {
                dy += clamp_to_bound(coeffs.diffusion(l, t, x), bound, "g") * db[l];
            }
        }
    }
    dy
}

/// `Y_k = Σ_{j<k} [f(t_j, x_j) dt + h^{il}(t_j, x_j) Δ⟨B^i, B^l⟩_j + g^l(t_j, x_j) ΔB^l_j]`.
pub fn build_y<const D: usize, C: Coefficients<D> + ?Sized>(
    coeffs: &C,
    x_prev: &Path<D>,
    bundle: &GPathBundle<D>,
) -> Result<Path<D>, RgsdeError> {
    if x_prev.grid != bundle.grid() || x_prev.values.len() != bundle.b.values.len() {
        return Err(RgsdeError::GridMismatch { expected: bundle.b.values.len(), got: x_prev.values.len() });
    }
    let n = bundle.grid().n;
    let mut y = Vec::with_capacity(n + 1);
    y.push(Point::zero());
    for k in 0..n {
        let next = y[k] + coefficient_increment(coeffs, bundle, k, &x_prev.values[k]);
        y.push(next);
    }
    Ok(Path { grid: bundle.grid(), values: y })
}

/// Cellwise-constant integrands of a general G-Itô process
/// `Y = ∫α dt + ∫η^{ij} d⟨B^i, B^j⟩ + ∫β^j dB^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct ItoIntegrands<const D: usize> {
    pub alpha: Vec<Point<D>>,
    /// `eta[k][i * D + j]`.
    pub eta: Vec<Vec<Point<D>>>,
    /// `beta[k][j]`.
    pub beta: Vec<Vec<Point<D>>>,
    pub bound: f64,
}

impl<const D: usize> ItoIntegrands<D> {
    /// Evaluates the integrands on every cell from the path history up to
    /// the cell's left endpoint, which keeps them adapted.
    pub fn from_fn(
        bundle: &GPathBundle<D>,
        bound: f64,
        mut alpha: impl FnMut(usize, &[Point<D>]) -> Point<D>,
        mut eta: impl FnMut(usize, usize, usize, &[Point<D>]) -> Point<D>,
        mut beta: impl FnMut(usize, usize, &[Point<D>]) -> Point<D>,
    ) -> Self {
        let n = bundle.grid().n;
        let mut out = Self { alpha: Vec::with_capacity(n), eta: Vec::with_capacity(n), beta: Vec::with_capacity(n), bound };
        for k in 0..n {
            let hist = &bundle.b.values[..=k];
            out.alpha.push(alpha(k, hist));
            out.eta.push((0..D * D).map(|ij| eta(k, ij / D, ij % D, hist)).collect());
            out.beta.push((0..D).map(|j| beta(k, j, hist)).collect());
        }
        out
    }

    /// Rejects integrands that are non-finite, exceed the declared bound, or
    /// have the wrong shape.
    pub fn validate(&self, n: usize) -> Result<(), RgsdeError> {
        let shape = self.alpha.len() == n
            && self.eta.len() == n
            && self.beta.len() == n
            && self.eta.iter().all(|e| e.len() == D * D)
            && self.beta.iter().all(|b| b.len() == D);
        if !shape {
            return Err(RgsdeError::GridMismatch { expected: n, got: self.alpha.len() });
        }
        for k in 0..n {
            let worst = core::iter::once(&self.alpha[k])
                .chain(&self.eta[k])
                .chain(&self.beta[k])
                .map(|v| if v.is_finite() { v.norm() } else { f64::INFINITY })
                .fold(0.0, f64::max);
            if worst > self.bound {
                return Err(RgsdeError::IntegrandOutOfBound { cell: k, value: worst, bound: self.bound });
            }
        }
        Ok(())
    }
}

/// The G-Itô process of `integrands` along `bundle`, with analytic `d⟨B⟩`.
pub fn build_ito_process<const D: usize>(
    integrands: &ItoIntegrands<D>,
    bundle: &GPathBundle<D>,
) -> Result<Path<D>, RgsdeError> {
    let grid = bundle.grid();
    integrands.validate(grid.n)?;
    let mut y = Vec::with_capacity(grid.n + 1);
    y.push(Point::zero());
    for k in 0..grid.n {
        let dq = bundle.dqv(k);
        let db = bundle.b.increment(k);
        let mut dy = integrands.alpha[k] * grid.dt;
        for i in 0..D {
            for j in 0..D {
                dy += integrands.eta[k][i * D + j] * dq.0[i][j];
            }
            dy += integrands.beta[k][i] * db[i];
        }
        y.push(y[k] + dy);
    }
    Ok(Path { grid, values: y })
}
