use alloc::vec::Vec;

use super::coefficients::Coefficients;
use super::solve::{direct_euler_batch, penalized_batch, reflect_batch, Reflector};
use super::{RgsdeError, RgsdeSolution};
use crate::exec::Executor;
use crate::geometry::PenaltyField;
use crate::linalg::Point;
use crate::math;
use crate::skorokhod::{containment_margin, holder_stats, reflection_constants, HolderMethod, HolderStats, SubstepPolicy};
use crate::uncertainty::{simulate, GPathBundle, Scenario};

/// `n_paths` bundles; path `p` runs under `scenarios[p % len]` with path index `p`.
pub fn simulate_batch<const D: usize, E: Executor>(
    scenarios: &[Scenario<D>],
    n_paths: usize,
    seed: u64,
    exec: &E,
) -> Vec<GPathBundle<D>> {
    assert!(!scenarios.is_empty(), "need at least one scenario");
    exec.map_indexed(n_paths, |p| simulate(&scenarios[p % scenarios.len()], seed, p as u64))
}

/// `(mean, standard error)`.
pub fn batch_mean(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, math::sqrt(var / n as f64))
}

/// Least-squares slope of `ln y` against `ln x`; `None` unless every value is
/// positive and at least two points are given.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|v| math::ln(*v)).collect();
    let ly: Vec<f64> = ys.iter().map(|v| math::ln(*v)).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Sup norms of the coefficient differences `f̂ = f¹ − f²`, `ĝ = g¹ − g²`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CoeffDeltas {
    pub f_hat: f64,
    pub g_hat: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityReport {
    /// Batch mean of `sup |X¹ − X²|⁴`.
    pub x_gap4: f64,
    /// Batch mean of `sup |K¹ − K²|⁴`.
    pub k_gap4: f64,
    /// Largest `sup |X¹ − X²|` over the batch.
    pub x_sup_max: f64,
    /// `∫_0^T (E sup_{u≤s} |X̂_u|⁴ + f̂⁴ + ĝ⁴) ds`.
    pub driver_term: f64,
    /// `(x_gap4 + k_gap4) / driver_term`, `None` when the driver term is 0.
    pub ratio: Option<f64>,
}

/// Fourth-moment gaps between two batches solved on the same bundles.
pub fn stability_gap<const D: usize>(
    sol1: &[RgsdeSolution<D>],
    sol2: &[RgsdeSolution<D>],
    deltas: CoeffDeltas,
) -> Result<StabilityReport, RgsdeError> {
    if sol1.len() != sol2.len() || sol1.is_empty() {
        return Err(RgsdeError::GridMismatch { expected: sol1.len(), got: sol2.len() });
    }
    let (mut xg, mut kg, mut drv, mut xmax) = (0.0, 0.0, 0.0, 0.0f64);
    for (a, b) in sol1.iter().zip(sol2) {
        if a.grid() != b.grid() || a.x().values.len() != b.x().values.len() {
            return Err(RgsdeError::GridMismatch { expected: a.x().values.len(), got: b.x().values.len() });
        }
        let grid = a.grid();
        let mut run = 0.0f64;
        let mut integral = 0.0;
        for k in 0..grid.n {
            run = run.max(a.x().values[k].dist(&b.x().values[k]));
            integral += run * run * run * run * grid.dt;
        }
        let xs = a.x().sup_dist(b.x());
        let ks = a.k().sup_dist(b.k());
        xmax = xmax.max(xs);
        xg += xs * xs * xs * xs;
        kg += ks * ks * ks * ks;
        drv += integral;
    }
    let n = sol1.len() as f64;
    let horizon = sol1[0].grid().horizon();
    let coeff = horizon * (math::powf(deltas.f_hat, 4.0) + math::powf(deltas.g_hat, 4.0));
    let (x_gap4, k_gap4) = (xg / n, kg / n);
    let driver_term = drv / n + coeff;
    let ratio = (driver_term > 0.0).then(|| (x_gap4 + k_gap4) / driver_term);
    Ok(StabilityReport { x_gap4, k_gap4, x_sup_max: xmax, driver_term, ratio })
}

/// Penalized-versus-reflected convergence over an `m` ladder.
#[derive(Clone, Copy)]
pub struct ConvergenceConfig<'a, const D: usize> {
    pub field: &'a PenaltyField<D>,
    pub m_ladder: &'a [f64],
    /// `None` drives by `B` (reflected G-Brownian motion).
    pub coeffs: Option<&'a dyn Coefficients<D>>,
    pub x0: Point<D>,
    pub alpha: f64,
    pub holder: HolderMethod,
    pub policy: SubstepPolicy,
}

/// One rung of the ladder. Every field except `sup_errs` goes to the table.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub m: f64,
    /// Batch mean of `sup |X^m − X^ref|²`.
    pub mean_sq_err: f64,
    pub stderr: f64,
    pub eps_p50: f64,
    pub eps_p90: f64,
    pub eps_max: f64,
    pub containment_max: f64,
    /// Fraction of paths with `ε^α_m < r0 / 2`.
    pub threshold_fraction: f64,
    /// Paths under the threshold whose containment margin exceeds `ε^α_m`.
    pub containment_violations: usize,
    /// `E sup |X^m|⁴ + E (|K^m|_T)⁴`.
    pub moment4: f64,
    /// Per-path `sup |X^m − X^ref|`.
    pub sup_errs: Vec<f64>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let idx = math::ceil(q * sorted.len() as f64) as usize;
    sorted[idx.clamp(1, sorted.len()) - 1]
}

/// Reference solution by projection, then one penalized batch per `m`.
pub fn convergence_study<const D: usize, E: Executor>(
    cfg: &ConvergenceConfig<'_, D>,
    bundles: &[GPathBundle<D>],
    exec: &E,
) -> Result<Vec<ConvergenceRow>, RgsdeError> {
    if bundles.is_empty() || !(cfg.alpha > 0.0 && cfg.alpha < 0.5) {
        return Err(RgsdeError::InvalidParameter("need a non-empty batch and alpha in (0, 1/2)"));
    }
    let domain = &cfg.field.domain;
    let reference = match cfg.coeffs {
        None => reflect_batch(&Reflector::Projected(domain), bundles, cfg.x0, exec)?,
        Some(c) => direct_euler_batch(domain, c, bundles, cfg.x0, exec)?,
    };
    // without coefficients the driver is B for every m
    let fixed: Option<Vec<HolderStats>> = cfg
        .coeffs
        .is_none()
        .then(|| exec.map_indexed(bundles.len(), |p| holder_stats(&bundles[p].b, cfg.alpha, cfg.holder)));
    let l = cfg.field.l();
    let mut rows = Vec::with_capacity(cfg.m_ladder.len());
    for &m in cfg.m_ladder {
        let sols = penalized_batch(cfg.field, cfg.coeffs, bundles, cfg.x0, m, cfg.policy, exec)?;
        let per_path = exec.map_indexed(sols.len(), |p| {
            let s = &sols[p];
            let stats = match &fixed {
                Some(v) => v[p],
                None => holder_stats(&s.y, cfg.alpha, cfg.holder),
            };
            let rc = reflection_constants(domain, l, &stats, m);
            let margin = containment_margin(&s.path, domain);
            (s.x().sup_dist(reference[p].x()), rc.eps, rc.containment_applies(), margin)
        });
        let sup_errs: Vec<f64> = per_path.iter().map(|r| r.0).collect();
        let sq: Vec<f64> = sup_errs.iter().map(|e| e * e).collect();
        let (mean_sq_err, stderr) = batch_mean(&sq);
        let mut eps: Vec<f64> = per_path.iter().map(|r| r.1).collect();
        eps.sort_by(f64::total_cmp);
        let under = per_path.iter().filter(|r| r.2).count();
        let violations = per_path.iter().filter(|r| r.2 && r.3 > r.1).count();
        let moment4 = sols
            .iter()
            .map(|s| {
                let x = s.x().sup_norm();
                let k = s.path.tv_final();
                x * x * x * x + k * k * k * k
            })
            .sum::<f64>()
            / sols.len() as f64;
        rows.push(ConvergenceRow {
            m,
            mean_sq_err,
            stderr,
            eps_p50: quantile(&eps, 0.5),
            eps_p90: quantile(&eps, 0.9),
            eps_max: eps.last().copied().unwrap_or(f64::NAN),
            containment_max: per_path.iter().map(|r| r.3).fold(0.0, f64::max),
            threshold_fraction: under as f64 / sols.len() as f64,
            containment_violations: violations,
            moment4,
            sup_errs,
        });
    }
    Ok(rows)
}
