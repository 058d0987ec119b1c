use alloc::string::String;
use alloc::vec::Vec;

use super::{sample_scenario, sigma_aa, simulate_b, Policy, Scenario, UncertaintyError, VolSet};
use crate::exec::Executor;
use crate::geometry::Domain;
use crate::linalg::Point;
use crate::math;
use crate::skorokhod::{holder_stats, reflection_constants, Grid, HolderMethod, Path};

/// Scenario family and batch size for the Monte Carlo estimators.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig<const D: usize> {
    /// Draws per random policy; deterministic policies contribute one scenario.
    pub n_scenarios: usize,
    pub n_paths: usize,
    pub policies: Vec<Policy<D>>,
    pub seed: u64,
}

/// Max over scenarios of per-scenario Monte Carlo means.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorReport {
    pub value: f64,
    pub stderr: f64,
    pub n_paths: usize,
    pub n_scenarios: usize,
    pub argmax: usize,
    pub argmax_label: String,
    pub means: Vec<f64>,
    pub stderrs: Vec<f64>,
}

pub fn build_family<const D: usize>(
    gamma: &VolSet<D>,
    grid: Grid,
    cfg: &SamplerConfig<D>,
) -> Result<Vec<Scenario<D>>, UncertaintyError> {
    let mut family = Vec::new();
    for policy in &cfg.policies {
        let copies = if policy.is_random() { cfg.n_scenarios } else { 1 };
        for _ in 0..copies {
            let index = family.len() as u64;
            family.push(sample_scenario(gamma, grid, policy, cfg.seed, index)?);
        }
    }
    Ok(family)
}

/// `values[s][p]`: the functional on path `p` of scenario `s`. Paths with the
/// same `p` share their Gaussian increments across scenarios.
pub fn evaluate_family<const D: usize, F, E>(
    functional: &F,
    family: &[Scenario<D>],
    n_paths: usize,
    seed: u64,
    exec: &E,
) -> Vec<Vec<f64>>
where
    F: Fn(&Path<D>) -> f64 + Sync,
    E: Executor,
{
    let flat = exec.map_indexed(family.len() * n_paths, |idx| {
        let (s, p) = (idx / n_paths, idx % n_paths);
        functional(&simulate_b(&family[s], seed, p as u64))
    });
    flat.chunks(n_paths.max(1)).map(<[f64]>::to_vec).collect()
}

fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    if v.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, math::sqrt(var / n))
}

pub fn report_from_values(values: &[Vec<f64>], labels: &[String]) -> EstimatorReport {
    let (means, stderrs): (Vec<f64>, Vec<f64>) = values.iter().map(|v| mean_stderr(v)).unzip();
    let mut argmax = 0;
    for (i, m) in means.iter().enumerate() {
        if *m > means[argmax] {
            argmax = i;
        }
    }
    EstimatorReport {
        value: means.get(argmax).copied().unwrap_or(f64::NAN),
        stderr: stderrs.get(argmax).copied().unwrap_or(f64::NAN),
        n_paths: values.first().map_or(0, Vec::len),
        n_scenarios: values.len(),
        argmax,
        argmax_label: labels.get(argmax).cloned().unwrap_or_default(),
        means,
        stderrs,
    }
}

fn labels<const D: usize>(family: &[Scenario<D>]) -> Vec<String> {
    family.iter().map(|s| s.label.clone()).collect()
}

pub fn upper_expectation_over<const D: usize, F, E>(
    functional: &F,
    family: &[Scenario<D>],
    n_paths: usize,
    seed: u64,
    exec: &E,
) -> EstimatorReport
where
    F: Fn(&Path<D>) -> f64 + Sync,
    E: Executor,
{
    report_from_values(&evaluate_family(functional, family, n_paths, seed, exec), &labels(family))
}

/// Lower-bound estimate of `sup_P E^P[X]` over the configured scenario family.
pub fn upper_expectation<const D: usize, F, E>(
    functional: &F,
    gamma: &VolSet<D>,
    grid: Grid,
    cfg: &SamplerConfig<D>,
    exec: &E,
) -> Result<EstimatorReport, UncertaintyError>
where
    F: Fn(&Path<D>) -> f64 + Sync,
    E: Executor,
{
    let family = build_family(gamma, grid, cfg)?;
    Ok(upper_expectation_over(functional, &family, cfg.n_paths, cfg.seed, exec))
}

/// Upper probability of an event over the family.
pub fn capacity_estimate<const D: usize, F, E>(
    event: &F,
    family: &[Scenario<D>],
    n_paths: usize,
    seed: u64,
    exec: &E,
) -> EstimatorReport
where
    F: Fn(&Path<D>) -> bool + Sync,
    E: Executor,
{
    upper_expectation_over(&|p: &Path<D>| if event(p) { 1.0 } else { 0.0 }, family, n_paths, seed, exec)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityReport {
    pub capacity: EstimatorReport,
    /// `(p, sup_P E|S|^p / a^p)` for `p ∈ {1, 2, 4}`.
    pub markov: Vec<(u32, f64)>,
    pub markov_bound: f64,
}

/// Capacity of `{S > a}` together with the Markov bounds `E|S|^p / a^p`.
pub fn threshold_capacity<const D: usize, S, E>(
    statistic: &S,
    a: f64,
    family: &[Scenario<D>],
    n_paths: usize,
    seed: u64,
    exec: &E,
) -> Result<CapacityReport, UncertaintyError>
where
    S: Fn(&Path<D>) -> f64 + Sync,
    E: Executor,
{
    if !(a > 0.0) {
        return Err(UncertaintyError::InvalidParameter("threshold must be positive"));
    }
    let vals = evaluate_family(statistic, family, n_paths, seed, exec);
    let lab = labels(family);
    let ind: Vec<Vec<f64>> =
        vals.iter().map(|v| v.iter().map(|s| if *s > a { 1.0 } else { 0.0 }).collect()).collect();
    let markov: Vec<(u32, f64)> = [1u32, 2, 4]
        .iter()
        .map(|&p| {
            let m: Vec<Vec<f64>> =
                vals.iter().map(|v| v.iter().map(|s| math::powf(s.abs() / a, p as f64)).collect()).collect();
            (p, report_from_values(&m, &lab).value)
        })
        .collect();
    let markov_bound = markov.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    Ok(CapacityReport { capacity: report_from_values(&ind, &lab), markov, markov_bound })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderRow {
    pub m: f64,
    pub eps_mean: f64,
    pub eps_p50: f64,
    pub eps_p99: f64,
    /// Fraction of paths with `ε^α_m < r0/2`.
    pub pass_rate: f64,
    /// Fraction of paths in the bad event `ε^α_m ≥ δ/(180βλ) ∧ r0/2`.
    pub bad_event_freq: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolderReport {
    pub n_paths: usize,
    pub mean: f64,
    pub p99: f64,
    pub approx: bool,
    pub rows: Vec<HolderRow>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let i = (math::ceil(q * sorted.len() as f64) as usize).clamp(1, sorted.len()) - 1;
    sorted[i]
}

/// Hölder norms of a batch and, per `m`, the collar widths and threshold events.
pub fn path_holder_report<const D: usize>(
    paths: &[Path<D>],
    alpha: f64,
    method: HolderMethod,
    domain: &Domain<D>,
    l: f64,
    m_ladder: &[f64],
) -> HolderReport {
    let stats: Vec<_> = paths.iter().map(|p| holder_stats(p, alpha, method)).collect();
    let mut norms: Vec<f64> = stats.iter().map(|s| s.holder_norm).collect();
    norms.sort_by(f64::total_cmp);
    let n = paths.len().max(1) as f64;
    let rows = m_ladder
        .iter()
        .map(|&m| {
            let consts: Vec<_> = stats.iter().map(|s| reflection_constants(domain, l, s, m)).collect();
            let mut eps: Vec<f64> = consts.iter().map(|c| c.eps).collect();
            eps.sort_by(f64::total_cmp);
            HolderRow {
                m,
                eps_mean: eps.iter().sum::<f64>() / n,
                eps_p50: quantile(&eps, 0.5),
                eps_p99: quantile(&eps, 0.99),
                pass_rate: consts.iter().filter(|c| c.eps < 0.5 * c.r0).count() as f64 / n,
                bad_event_freq: consts.iter().filter(|c| c.eps >= c.gap_threshold).count() as f64 / n,
            }
        })
        .collect();
    HolderReport {
        n_paths: paths.len(),
        mean: norms.iter().sum::<f64>() / n,
        p99: quantile(&norms, 0.99),
        approx: stats.iter().any(|s| s.approx),
        rows,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BdgReport {
    /// `sup` over scenarios of `E[sup_t |⟨a, B_t⟩|^p]`.
    pub moment: f64,
    pub stderr: f64,
    pub per_scenario: Vec<f64>,
    /// `σ_{aaᵀ}^{p/2} T^{p/2}`.
    pub reference: f64,
    /// `moment / reference`, an empirical proxy for `C_p`.
    pub ratio: f64,
}

pub fn bdg_moment_report<const D: usize, E: Executor>(
    gamma: &VolSet<D>,
    family: &[Scenario<D>],
    a: &Point<D>,
    p: f64,
    n_paths: usize,
    seed: u64,
    exec: &E,
) -> Result<BdgReport, UncertaintyError> {
    if !(p >= 2.0) {
        return Err(UncertaintyError::InvalidParameter("p must be >= 2"));
    }
    let s = sigma_aa(gamma, a)?;
    let horizon = family.first().map_or(0.0, |f| f.grid.horizon());
    let f = |path: &Path<D>| {
        let m = path.values.iter().map(|b| a.dot(b).abs()).fold(0.0, f64::max);
        math::powf(m, p)
    };
    let r = upper_expectation_over(&f, family, n_paths, seed, exec);
    let reference = math::powf(s * horizon, 0.5 * p);
    Ok(BdgReport { moment: r.value, stderr: r.stderr, per_scenario: r.means, reference, ratio: r.value / reference })
}
