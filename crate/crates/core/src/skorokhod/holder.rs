use alloc::vec::Vec;

use super::Path;
use crate::geometry::Domain;
use crate::math;

/// Exact pair scans are used up to this many cells.
pub const EXACT_HOLDER_MAX_N: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HolderMethod {
    /// Exact up to [`EXACT_HOLDER_MAX_N`] cells, dyadic beyond.
    Auto,
    Exact,
    /// Pairs `(i, i + 2^k)` only. Cheaper, and never larger than the exact
    /// value; for Brownian-like paths it sits within a factor 2 of it.
    Dyadic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderNorm {
    pub value: f64,
    /// `true` when the dyadic estimator was used.
    pub approx: bool,
}

/// Path regularity summary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderStats {
    pub alpha: f64,
    pub holder_norm: f64,
    /// Running sup norm `‖w‖_T`.
    pub sup_norm: f64,
    pub approx: bool,
}

pub fn holder_norm<const D: usize>(path: &Path<D>, alpha: f64) -> HolderNorm {
    holder_norm_with(path, alpha, HolderMethod::Auto)
}

pub fn holder_norm_with<const D: usize>(path: &Path<D>, alpha: f64, method: HolderMethod) -> HolderNorm {
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    let n = path.grid.n;
    let exact = match method {
        HolderMethod::Auto => n <= EXACT_HOLDER_MAX_N,
        HolderMethod::Exact => true,
        HolderMethod::Dyadic => false,
    };
    let dt = path.grid.dt;
    let v = &path.values;
    let mut best = 0.0f64;
    if exact {
        let inv: Vec<f64> = (0..=n).map(|k| if k == 0 { 0.0 } else { math::powf(k as f64 * dt, -alpha) }).collect();
        for i in 0..n {
            let vi = v[i];
            for j in i + 1..=n {
                let d = (v[j] - vi).norm_sq();
                let r = d * inv[j - i] * inv[j - i];
                if r > best {
                    best = r;
                }
            }
        }
        best = math::sqrt(best);
    } else {
        let mut lag = 1;
        while lag <= n {
            let w = math::powf(lag as f64 * dt, -alpha);
            for i in 0..=n - lag {
                best = best.max((v[i + lag] - v[i]).norm() * w);
            }
            lag *= 2;
        }
        best = best.max((v[n] - v[0]).norm() * math::powf(n as f64 * dt, -alpha));
    }
    HolderNorm { value: best, approx: !exact }
}

pub fn holder_stats<const D: usize>(path: &Path<D>, alpha: f64, method: HolderMethod) -> HolderStats {
    let h = holder_norm_with(path, alpha, method);
    HolderStats { alpha, holder_norm: h.value, sup_norm: path.sup_norm(), approx: h.approx }
}

/// `Δ_{s,t}(w)`: the diameter of `{w_k : i ≤ k ≤ j}`.
pub fn oscillation<const D: usize>(path: &Path<D>, i: usize, j: usize) -> f64 {
    let v = &path.values[i..=j];
    if D == 1 {
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])));
        return hi - lo;
    }
    let mut best = 0.0f64;
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            best = best.max((v[b] - v[a]).norm_sq());
        }
    }
    math::sqrt(best)
}

/// `ε^α_m(w) = 12 e^L m^{−α} ‖w‖_α`.
pub fn epsilon_alpha(m: f64, l: f64, alpha: f64, holder_norm: f64) -> f64 {
    12.0 * math::exp(l) * math::powf(m, -alpha) * holder_norm
}

/// `C0 (‖w‖_α^{1+1/α} + ‖w‖_α) exp(γ (1 + 1/α) ‖w‖_T)`.
pub fn tv_bound_rhs(stats: &HolderStats, c0: f64, gamma: f64) -> f64 {
    let p = 1.0 + 1.0 / stats.alpha;
    let h = stats.holder_norm;
    c0 * (math::powf(h, p) + h) * math::exp(gamma * p * stats.sup_norm)
}

/// The constants of the penalization estimates for one driver and one `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReflectionConstants {
    pub eps: f64,
    /// `γ = 2 κ² β / r0`.
    pub gamma: f64,
    /// `λ(w) = exp(γ (‖w‖_T + δ))`.
    pub lambda: f64,
    /// `δ / (180 β λ) ∧ r0/2`.
    pub gap_threshold: f64,
    /// Minimal gap `h = (δ / (36 β λ ‖w‖_α))^{1/α}` between reflection times.
    pub h: f64,
    /// `8 β λ + 1`, the oscillation amplification factor.
    pub oscillation_factor: f64,
    pub r0: f64,
}

impl ReflectionConstants {
    /// `0 < ε < r0/2`: containment and excursion estimates apply.
    pub fn containment_applies(&self) -> bool {
        self.eps > 0.0 && self.eps < 0.5 * self.r0
    }

    /// `0 < ε < δ/(180βλ) ∧ r0/2`: gap and total-variation estimates apply.
    pub fn gap_applies(&self) -> bool {
        self.eps > 0.0 && self.eps < self.gap_threshold
    }
}

pub fn reflection_constants<const D: usize>(domain: &Domain<D>, l: f64, stats: &HolderStats, m: f64) -> ReflectionConstants {
    let eps = epsilon_alpha(m, l, stats.alpha, stats.holder_norm);
    let gamma = 2.0 * domain.kappa * domain.kappa * domain.beta / domain.r0;
    let lambda = math::exp(gamma * (stats.sup_norm + domain.delta));
    let h = if stats.holder_norm > 0.0 {
        math::powf(domain.delta / (36.0 * domain.beta * lambda * stats.holder_norm), 1.0 / stats.alpha)
    } else {
        f64::INFINITY
    };
    ReflectionConstants {
        eps,
        gamma,
        lambda,
        gap_threshold: (domain.delta / (180.0 * domain.beta * lambda)).min(0.5 * domain.r0),
        h,
        oscillation_factor: 8.0 * domain.beta * lambda + 1.0,
        r0: domain.r0,
    }
}
