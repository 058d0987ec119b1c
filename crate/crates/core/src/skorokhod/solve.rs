use alloc::vec::Vec;

use super::{Grid, Method, Path, SkorokhodError, SkorokhodSolution};
use crate::geometry::{Domain, GeometryError, PenaltyField};
use crate::linalg::Point;
use crate::math;

/// Substep count per grid cell for the explicit penalty integrator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SubstepPolicy {
    /// `ceil(m · 2L · dt / θ)` substeps.
    Auto { theta: f64 },
    /// A fixed count; refused when it implies `θ > 1`.
    Fixed(usize),
}

impl Default for SubstepPolicy {
    fn default() -> Self {
        SubstepPolicy::Auto { theta: 0.5 }
    }
}

pub(crate) fn substeps_for(policy: SubstepPolicy, m: f64, two_l: f64, dt: f64) -> Result<usize, SkorokhodError> {
    if !(m >= 1.0 && m.is_finite()) {
        return Err(SkorokhodError::InvalidParameter("m must be >= 1"));
    }
    let stiffness = m * two_l * dt;
    match policy {
        SubstepPolicy::Auto { theta } => {
            if !(theta > 0.0) {
                return Err(SkorokhodError::InvalidParameter("theta must be positive"));
            }
            if theta > 1.0 {
                return Err(SkorokhodError::UnstableStep { theta });
            }
            Ok((math::ceil(stiffness / theta) as usize).max(1))
        }
        SubstepPolicy::Fixed(n) => {
            if n == 0 {
                return Err(SkorokhodError::InvalidParameter("substep count must be >= 1"));
            }
            let theta = stiffness / n as f64;
            if theta > 1.0 {
                return Err(SkorokhodError::UnstableStep { theta });
            }
            Ok(n)
        }
    }
}

/// Raw output of the solver loops; `driver` is the path actually integrated.
pub(crate) struct CoreOut<const D: usize> {
    pub xi: Vec<Point<D>>,
    pub phi: Vec<Point<D>>,
    pub tv: Vec<f64>,
    pub driver: Vec<Point<D>>,
}

impl<const D: usize> CoreOut<D> {
    fn with_capacity(x0: Point<D>, n: usize) -> Self {
        let mut out = Self {
            xi: Vec::with_capacity(n + 1),
            phi: Vec::with_capacity(n + 1),
            tv: Vec::with_capacity(n + 1),
            driver: Vec::with_capacity(n + 1),
        };
        out.xi.push(x0);
        out.phi.push(Point::zero());
        out.tv.push(0.0);
        out.driver.push(Point::zero());
        out
    }
}

pub(crate) fn check_start<const D: usize>(domain: &Domain<D>, x0: &Point<D>) -> Result<(), SkorokhodError> {
    if !x0.is_finite() {
        return Err(SkorokhodError::NonFinite { index: 0 });
    }
    let distance = domain.distance_to_closure(x0);
    if distance > domain.boundary_tol.max(1e-12) {
        return Err(SkorokhodError::NotInClosure { distance });
    }
    Ok(())
}

fn check_driver<const D: usize>(w: &Path<D>) -> Result<(), SkorokhodError> {
    let norm = w.values[0].norm();
    if norm > 1e-12 {
        return Err(SkorokhodError::DriverNotAnchored { norm });
    }
    Ok(())
}

/// Recursive projection. `next(k, ξ_k, w_k)` yields the driver value `w_{k+1}`;
/// it may depend on the state, which is how Euler-type SDE schemes reuse this loop.
pub(crate) fn projected_core<const D: usize>(
    domain: &Domain<D>,
    x0: Point<D>,
    grid: Grid,
    mut next: impl FnMut(usize, &Point<D>, &Point<D>) -> Point<D>,
) -> Result<CoreOut<D>, SkorokhodError> {
    let limit = 0.5 * domain.r0;
    let mut out = CoreOut::with_capacity(x0, grid.n);
    for k in 0..grid.n {
        let (xk, wk, phik) = (out.xi[k], out.driver[k], out.phi[k]);
        let wn = next(k, &xk, &wk);
        if !wn.is_finite() {
            return Err(SkorokhodError::NonFinite { index: k + 1 });
        }
        let increment = (wn - wk).norm();
        if increment >= limit {
            return Err(SkorokhodError::StepTooLarge { index: k, increment, limit });
        }
        let cand = x0 + wn + phik;
        let (p, d) = domain.closest(&cand);
        let phin = if d == 0.0 {
            phik
        } else if d >= domain.r0 {
            return Err(GeometryError::OutOfReach { distance: d, r0: domain.r0 }.into());
        } else {
            phik + (p - cand)
        };
        out.tv.push(out.tv[k] + (phin - phik).norm());
        out.phi.push(phin);
        out.xi.push(x0 + wn + phin);
        out.driver.push(wn);
    }
    Ok(out)
}

/// Explicit Euler for `dξ = dw − (m/2)∇U(ξ) dt` with `substeps` steps per cell
/// and linear interpolation of the driver inside the cell.
pub(crate) fn penalized_core<const D: usize>(
    field: &PenaltyField<D>,
    x0: Point<D>,
    grid: Grid,
    m: f64,
    substeps: usize,
    mut next: impl FnMut(usize, &Point<D>, &Point<D>) -> Point<D>,
) -> Result<CoreOut<D>, SkorokhodError> {
    let domain = &field.domain;
    let h = grid.dt / substeps as f64;
    let c = 0.5 * m * h;
    let inv = 1.0 / substeps as f64;
    let mut out = CoreOut::with_capacity(x0, grid.n);
    for k in 0..grid.n {
        let (xk, wk) = (out.xi[k], out.driver[k]);
        let wn = next(k, &xk, &wk);
        if !wn.is_finite() {
            return Err(SkorokhodError::NonFinite { index: k + 1 });
        }
        let dw = wn - wk;
        let step = dw.norm();
        let mut phi = out.phi[k];
        let mut tv = out.tv[k];
        // the cell cannot leave D when the start is deeper than the driver moves
        if domain.depth(&xk) <= step {
            for j in 0..substeps {
                let x = x0 + wk + dw * (j as f64 * inv) + phi;
                let g = field.gradient(&x);
                if g == Point::zero() {
                    if domain.depth(&x) > step * (substeps - j) as f64 * inv {
                        break;
                    }
                    continue;
                }
                let push = g * (-c);
                phi += push;
                tv += push.norm();
            }
        }
        let xn = x0 + wn + phi;
        if !xn.is_finite() {
            return Err(SkorokhodError::NonFinite { index: k + 1 });
        }
        out.xi.push(xn);
        out.phi.push(phi);
        out.tv.push(tv);
        out.driver.push(wn);
    }
    Ok(out)
}

fn assemble<const D: usize>(x0: Point<D>, grid: Grid, out: CoreOut<D>, method: Method) -> SkorokhodSolution<D> {
    SkorokhodSolution {
        x0,
        xi: Path { grid, values: out.xi },
        phi: Path { grid, values: out.phi },
        tv: out.tv,
        method,
    }
}

/// `ξ_{k+1} = proj(ξ_k + Δw_k)`.
pub fn solve_projected<const D: usize>(
    domain: &Domain<D>,
    w: &Path<D>,
    x0: Point<D>,
) -> Result<SkorokhodSolution<D>, SkorokhodError> {
    check_driver(w)?;
    check_start(domain, &x0)?;
    let out = projected_core(domain, x0, w.grid, |k, _, _| w.values[k + 1])?;
    Ok(assemble(x0, w.grid, out, Method::Projected))
}

/// The penalized approximation `ξ^m = x0 + w − (m/2)∫∇U(ξ^m) ds`.
pub fn solve_penalized<const D: usize>(
    field: &PenaltyField<D>,
    w: &Path<D>,
    x0: Point<D>,
    m: f64,
    policy: SubstepPolicy,
) -> Result<SkorokhodSolution<D>, SkorokhodError> {
    check_driver(w)?;
    check_start(&field.domain, &x0)?;
    let substeps = substeps_for(policy, m, field.lipschitz_2l, w.grid.dt)?;
    let out = penalized_core(field, x0, w.grid, m, substeps, |k, _, _| w.values[k + 1])?;
    Ok(assemble(x0, w.grid, out, Method::Penalized { m, substeps }))
}

/// The closed-form Skorokhod map of `(0, ∞)`:
/// `φ_t = max(0, max_{s ≤ t} −(x0 + w_s))`.
pub fn solve_halfline_explicit(x0: f64, w: &Path<1>) -> Result<SkorokhodSolution<1>, SkorokhodError> {
    check_driver(w)?;
    if !x0.is_finite() {
        return Err(SkorokhodError::NonFinite { index: 0 });
    }
    if x0 < 0.0 {
        return Err(SkorokhodError::NotInClosure { distance: -x0 });
    }
    let mut run = 0.0f64;
    let mut phi = Vec::with_capacity(w.values.len());
    let mut xi = Vec::with_capacity(w.values.len());
    for v in &w.values {
        run = run.max(-(x0 + v[0]));
        phi.push(Point([run]));
        xi.push(Point([x0 + v[0] + run]));
    }
    let tv = phi.iter().map(|p| p[0]).collect();
    Ok(SkorokhodSolution {
        x0: Point([x0]),
        xi: Path { grid: w.grid, values: xi },
        phi: Path { grid: w.grid, values: phi },
        tv,
        method: Method::ExplicitHalfline,
    })
}
