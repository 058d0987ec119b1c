use alloc::vec::Vec;

use super::coefficients::Coefficients;
use super::ito::{build_y, coefficient_increment};
use super::{RgsdeError, RgsdeMethod, RgsdeSolution};
use crate::exec::Executor;
use crate::geometry::{Domain, PenaltyField};
use crate::linalg::Point;
use crate::skorokhod::{
    penalized_core, projected_core, solve_penalized, solve_projected, substeps_for, Method, Path, SkorokhodSolution,
    SubstepPolicy,
};
use crate::uncertainty::GPathBundle;

/// The Skorokhod map used to turn a driver into `(X, K)`.
#[derive(Clone, Copy, Debug)]
pub enum Reflector<'a, const D: usize> {
    Projected(&'a Domain<D>),
    Penalized { field: &'a PenaltyField<D>, m: f64, policy: SubstepPolicy },
}

impl<'a, const D: usize> Reflector<'a, D> {
    pub fn domain(&self) -> &'a Domain<D> {
        match self {
            Reflector::Projected(d) => d,
            Reflector::Penalized { field, .. } => &field.domain,
        }
    }

    fn apply(&self, y: &Path<D>, x0: Point<D>) -> Result<SkorokhodSolution<D>, RgsdeError> {
        Ok(match *self {
            Reflector::Projected(d) => solve_projected(d, y, x0)?,
            Reflector::Penalized { field, m, policy } => solve_penalized(field, y, x0, m, policy)?,
        })
    }
}

/// `X = x0 + Y + K` for a given driver `Y`.
pub fn reflect_path<const D: usize>(
    reflector: &Reflector<'_, D>,
    y: &Path<D>,
    x0: Point<D>,
    bundle: Option<&GPathBundle<D>>,
) -> Result<RgsdeSolution<D>, RgsdeError> {
    let path = reflector.apply(y, x0)?;
    let method = RgsdeMethod::Reflected(path.method);
    Ok(RgsdeSolution {
        path,
        y: y.clone(),
        seed: bundle.map_or(0, |b| b.seed),
        path_index: bundle.map_or(0, |b| b.path_index),
        method,
    })
}

/// Reflected G-Brownian motion along every bundle: `Y = B`.
pub fn reflect_batch<const D: usize, E: Executor>(
    reflector: &Reflector<'_, D>,
    bundles: &[GPathBundle<D>],
    x0: Point<D>,
    exec: &E,
) -> Result<Vec<RgsdeSolution<D>>, RgsdeError> {
    let out = exec.map_indexed(bundles.len(), |p| {
        reflect_path(reflector, &bundles[p].b, x0, Some(&bundles[p])).map_err(|e| e.at(bundles[p].path_index))
    });
    out.into_iter().collect()
}

fn finish<const D: usize>(
    x0: Point<D>,
    bundle: &GPathBundle<D>,
    out: crate::skorokhod::CoreOut<D>,
    inner: Method,
    method: RgsdeMethod,
) -> RgsdeSolution<D> {
    let grid = bundle.grid();
    RgsdeSolution {
        path: SkorokhodSolution {
            x0,
            xi: Path { grid, values: out.xi },
            phi: Path { grid, values: out.phi },
            tv: out.tv,
            method: inner,
        },
        y: Path { grid, values: out.driver },
        seed: bundle.seed,
        path_index: bundle.path_index,
        method,
    }
}

/// Explicit Euler scheme for `X^m = x0 + Y(X^m) − (m/2)∫∇U(X^m) ds`, with the
/// coefficients frozen at the left endpoint of each outer cell. Without
/// coefficients the driver is `B`.
pub fn penalized_sde_solve<const D: usize>(
    field: &PenaltyField<D>,
    coeffs: Option<&dyn Coefficients<D>>,
    bundle: &GPathBundle<D>,
    x0: Point<D>,
    m: f64,
    policy: SubstepPolicy,
) -> Result<RgsdeSolution<D>, RgsdeError> {
    let grid = bundle.grid();
    crate::skorokhod::check_start(&field.domain, &x0)?;
    let substeps = substeps_for(policy, m, field.lipschitz_2l, grid.dt)?;
    let out = match coeffs {
        None => penalized_core(field, x0, grid, m, substeps, |k, _, _| bundle.b.values[k + 1])?,
        Some(c) => penalized_core(field, x0, grid, m, substeps, |k, x, y| *y + coefficient_increment(c, bundle, k, x))?,
    };
    let method = Method::Penalized { m, substeps };
    Ok(finish(x0, bundle, out, method, RgsdeMethod::Penalized { m, substeps }))
}

pub fn penalized_batch<const D: usize, E: Executor>(
    field: &PenaltyField<D>,
    coeffs: Option<&dyn Coefficients<D>>,
    bundles: &[GPathBundle<D>],
    x0: Point<D>,
    m: f64,
    policy: SubstepPolicy,
    exec: &E,
) -> Result<Vec<RgsdeSolution<D>>, RgsdeError> {
    let out = exec.map_indexed(bundles.len(), |p| {
        penalized_sde_solve(field, coeffs, &bundles[p], x0, m, policy).map_err(|e| e.at(bundles[p].path_index))
    });
    out.into_iter().collect()
}

/// One pass of `X_{k+1} = proj(X_k + ΔY_k(X_k))`: the Euler scheme with
/// projection, used as the reference for penalized runs with coefficients.
pub fn direct_euler_reflect<const D: usize>(
    domain: &Domain<D>,
    coeffs: &dyn Coefficients<D>,
    bundle: &GPathBundle<D>,
    x0: Point<D>,
) -> Result<RgsdeSolution<D>, RgsdeError> {
    crate::skorokhod::check_start(domain, &x0)?;
    let out = projected_core(domain, x0, bundle.grid(), |k, x, y| *y + coefficient_increment(coeffs, bundle, k, x))?;
    Ok(finish(x0, bundle, out, Method::Projected, RgsdeMethod::DirectEulerReflect))
}

pub fn direct_euler_batch<const D: usize, E: Executor>(
    domain: &Domain<D>,
    coeffs: &dyn Coefficients<D>,
    bundles: &[GPathBundle<D>],
    x0: Point<D>,
    exec: &E,
) -> Result<Vec<RgsdeSolution<D>>, RgsdeError> {
    let out = exec.map_indexed(bundles.len(), |p| {
        direct_euler_reflect(domain, coeffs, &bundles[p], x0).map_err(|e| e.at(bundles[p].path_index))
    });
    out.into_iter().collect()
}

/// The first Picard iterate `X⁰`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PicardInit {
    /// `X⁰ ≡ x0`.
    #[default]
    Start,
    /// `X⁰` is the reflection of `B` itself.
    ReflectedB,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub init: PicardInit,
}

impl Default for PicardConfig {
    fn default() -> Self {
        Self { tol: 1e-6, max_iter: 50, init: PicardInit::Start }
    }
}

impl PicardConfig {
    /// Tolerance `1e-6 · diam²`, falling back to `1e-6` for unbounded domains.
    pub fn for_domain<const D: usize>(domain: &Domain<D>) -> Self {
        let (lo, hi) = domain.sampling_box();
        let diam = lo.dist(&hi);
        let tol = if domain.is_bounded() && diam.is_finite() { 1e-6 * diam * diam } else { 1e-6 };
        Self { tol, ..Self::default() }
    }
}

/// `distances[i]` is the batch mean of `sup_t |X^{i+1} − X^i|²`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PicardTrace {
    pub distances: Vec<f64>,
    /// Iterations performed when the loop stopped.
    pub k_stop: usize,
    pub converged: bool,
}

impl PicardTrace {
    /// `distances[i + 1] / distances[i]`.
    pub fn ratios(&self) -> Vec<f64> {
        self.distances.windows(2).map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 }).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PicardOutcome<const D: usize> {
    pub solutions: Vec<RgsdeSolution<D>>,
    pub trace: PicardTrace,
}

/// Picard iteration `Y^{k+1} = build_y(X^k)`, `X^{k+1} = reflect(x0 + Y^{k+1})`
/// over a batch, stopped when the batch mean of `sup_t |X^{k+1} − X^k|²`
/// drops to `tol`.
pub fn picard_solve<const D: usize, C, E>(
    coeffs: &C,
    reflector: &Reflector<'_, D>,
    bundles: &[GPathBundle<D>],
    x0: Point<D>,
    cfg: &PicardConfig,
    exec: &E,
) -> Result<PicardOutcome<D>, RgsdeError>
where
    C: Coefficients<D> + ?Sized,
    E: Executor,
{
    if !(cfg.tol > 0.0) || cfg.max_iter == 0 {
        return Err(RgsdeError::InvalidParameter("Picard needs tol > 0 and max_iter >= 1"));
    }
    if bundles.is_empty() {
        return Err(RgsdeError::InvalidParameter("empty batch"));
    }
    let mut current: Vec<Path<D>> = match cfg.init {
        PicardInit::Start => bundles.iter().map(|b| Path::constant(b.grid(), x0)).collect(),
        PicardInit::ReflectedB => reflect_batch(reflector, bundles, x0, exec)?.into_iter().map(|s| s.path.xi).collect(),
    };
    let mut trace = PicardTrace::default();
    for iter in 1..=cfg.max_iter {
        let next = exec.map_indexed(bundles.len(), |p| {
            let b = &bundles[p];
            build_y(coeffs, &current[p], b)
                .and_then(|y| reflect_path(reflector, &y, x0, Some(b)))
                .map(|s| {
                    let d = s.x().sup_dist(&current[p]);
                    (s, d * d)
                })
                .map_err(|e| e.at(b.path_index))
        });
        let next: Vec<(RgsdeSolution<D>, f64)> = next.into_iter().collect::<Result<_, _>>()?;
        let dist = next.iter().map(|(_, d)| d).sum::<f64>() / next.len() as f64;
        trace.distances.push(dist);
        trace.k_stop = iter;
        if dist <= cfg.tol {
            trace.converged = true;
            let solutions = next
                .into_iter()
                .map(|(mut s, _)| {
                    if let RgsdeMethod::Reflected(inner) = s.method {
                        s.method = RgsdeMethod::Picard { iterations: iter, inner };
                    }
                    s
                })
                .collect();
            return Ok(PicardOutcome { solutions, trace });
        }
        if !dist.is_finite() {
            break;
        }
        current = next.into_iter().map(|(s, _)| s.path.xi).collect();
    }
    Err(RgsdeError::NoConvergence { max_iter: cfg.max_iter, trace })
}
