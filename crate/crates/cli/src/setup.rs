//! Builds core objects from configuration blocks. Every failure names its key.

use std::f64::consts::PI;

use rgsde_core::geometry::{Face, PsiSpec};
use rgsde_core::rgsde::Builtin;
use rgsde_core::rng::{CounterRng, Stream};
use rgsde_core::skorokhod::{HolderMethod, SubstepPolicy};
use rgsde_core::uncertainty::{build_family, Policy, SamplerConfig, Scenario, VolSet};
use rgsde_core::{Domain, DomainKind, Grid, Path, Point};

use crate::config::{CoefficientsBlock, DomainBlock, ExperimentConfig};
use crate::error::RunError;

pub fn point<const D: usize>(key: &str, v: &[f64]) -> Result<Point<D>, RunError> {
    if v.len() != D {
        return Err(RunError::validation(key, format!("needs {D} entries, got {}", v.len())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(RunError::validation(key, "entries must be finite"));
    }
    let mut p = Point::zero();
    p.0.copy_from_slice(v);
    Ok(p)
}

fn opt_point<const D: usize>(key: &str, v: &Option<Vec<f64>>, default: Point<D>) -> Result<Point<D>, RunError> {
    v.as_ref().map_or(Ok(default), |v| point(key, v))
}

fn need(key: &str, v: Option<f64>) -> Result<f64, RunError> {
    v.ok_or_else(|| RunError::validation(key, "required for this domain kind"))
}

pub fn domain<const D: usize>(b: &DomainBlock) -> Result<Domain<D>, RunError> {
    let geo = |e: rgsde_core::geometry::GeometryError| RunError::validation("domain", e);
    let (kind, r0, delta, beta) = match b.kind.as_str() {
        "half-line" => {
            let kind = DomainKind::HalfSpace(Face { normal: Point::unit(0), offset: 0.0 });
            let r0 = b.r0.unwrap_or(1.0);
            (kind, r0, b.delta.unwrap_or(r0), b.beta.unwrap_or(1.0))
        }
        "half-space" => {
            let normal = point::<D>("domain.normal", b.normal.as_deref().unwrap_or(&[]))?;
            let face = Face::new(normal, b.offset.unwrap_or(0.0)).map_err(|e| RunError::validation("domain.normal", e))?;
            let r0 = b.r0.unwrap_or(1.0);
            (DomainKind::HalfSpace(face), r0, b.delta.unwrap_or(r0), b.beta.unwrap_or(1.0))
        }
        "ball" => {
            let center = opt_point("domain.center", &b.center, Point::zero())?;
            let radius = b.radius.unwrap_or(1.0);
            let r0 = b.r0.unwrap_or(radius);
            (DomainKind::Ball { center, radius }, r0, b.delta.unwrap_or(0.5 * radius), b.beta.unwrap_or(2.0))
        }
        "box" => {
            let lo = opt_point("domain.lo", &b.lo, Point::splat(-1.0))?;
            let hi = opt_point("domain.hi", &b.hi, Point::splat(1.0))?;
            let side = (0..D).map(|i| hi[i] - lo[i]).fold(f64::INFINITY, f64::min);
            let kind = DomainKind::AxisBox { lo, hi };
            (kind, b.r0.unwrap_or(1.0), b.delta.unwrap_or(0.25 * side), b.beta.unwrap_or((D as f64).sqrt().max(1.0)))
        }
        "polytope" => {
            let rows = b.faces.as_ref().ok_or_else(|| RunError::validation("domain.faces", "required for a polytope"))?;
            let mut faces = Vec::new();
            for (i, row) in rows.iter().enumerate() {
                let key = format!("domain.faces[{i}]");
                if row.len() != D + 1 {
                    return Err(RunError::validation(key, format!("needs {} entries (normal, offset)", D + 1)));
                }
                let n = point::<D>(&key, &row[..D])?;
                faces.push(Face::new(n, row[D]).map_err(|e| RunError::validation(&key, e))?);
            }
            (DomainKind::Polytope { faces }, b.r0.unwrap_or(1.0), b.delta.unwrap_or(0.25), b.beta.unwrap_or(2.0))
        }
        "shell" => {
            let center = opt_point("domain.center", &b.center, Point::zero())?;
            let inner = need("domain.inner", b.inner)?;
            let outer = need("domain.outer", b.outer)?;
            let kind = DomainKind::Shell { center, inner, outer };
            (kind, b.r0.unwrap_or(inner), b.delta.unwrap_or(0.5 * inner), b.beta.unwrap_or(2.0))
        }
        "l-shape" => {
            let lo = opt_point("domain.lo", &b.lo, Point::splat(0.0))?;
            let hi = opt_point("domain.hi", &b.hi, Point::splat(2.0))?;
            let corner = opt_point("domain.corner", &b.corner, Point::splat(1.0))?;
            let kind = DomainKind::LShape { lo, hi, corner };
            (kind, b.r0.unwrap_or(0.5), b.delta.unwrap_or(0.25), b.beta.unwrap_or(2.0))
        }
        other => return Err(RunError::validation("domain.kind", format!("unknown kind `{other}`"))),
    };
    let mut d = Domain::new(kind, r0, delta, beta).map_err(geo)?;
    if let Some(k) = b.kappa {
        if !(k >= 1.0 && k.is_finite()) {
            return Err(RunError::validation("domain.kappa", "must be >= 1"));
        }
        d = d.with_kappa(k);
    }
    let psi = b.psi.as_deref().unwrap_or(match d.kind {
        DomainKind::Shell { .. } => "shell",
        DomainKind::LShape { .. } => "none",
        _ => "zero",
    });
    match (psi, &d.kind) {
        ("none", _) => {}
        ("zero", _) => d = d.with_psi(PsiSpec::zero()),
        ("shell", DomainKind::Shell { center, inner, outer }) => {
            let spec = PsiSpec::shell(*center, *inner, *outer);
            d = d.with_psi(spec);
        }
        ("shell", _) => return Err(RunError::validation("domain.psi", "`shell` needs a shell domain")),
        (other, _) => return Err(RunError::validation("domain.psi", format!("unknown function `{other}`"))),
    }
    Ok(d)
}

/// Default start: a point well inside the domain.
pub fn start<const D: usize>(cfg: &ExperimentConfig, d: &Domain<D>) -> Result<Point<D>, RunError> {
    let x0 = match &cfg.solver.x0 {
        Some(v) => point("solver.x0", v)?,
        None => match &d.kind {
            DomainKind::HalfSpace(f) => f.normal * (f.offset + 0.5),
            DomainKind::Ball { center, .. } => *center,
            DomainKind::AxisBox { lo, hi } => (*lo + *hi) * 0.5,
            DomainKind::Shell { center, inner, outer } => *center + Point::unit(0) * (0.5 * (inner + outer)),
            DomainKind::LShape { lo, corner, .. } => (*lo + *corner) * 0.5,
            DomainKind::Polytope { .. } => {
                return Err(RunError::validation("solver.x0", "required for a polytope"));
            }
        },
    };
    if d.distance_to_closure(&x0) > d.boundary_tol.max(1e-12) {
        return Err(RunError::validation("solver.x0", "start point lies outside the domain"));
    }
    Ok(x0)
}

pub fn grid(cfg: &ExperimentConfig) -> Result<Grid, RunError> {
    Grid::uniform(cfg.grid.horizon, cfg.grid.n).map_err(|e| RunError::validation("grid", e))
}

pub fn volset<const D: usize>(cfg: &ExperimentConfig) -> Result<VolSet<D>, RunError> {
    VolSet::diag_box(core::array::from_fn(|i| cfg.vol_lo(i)), core::array::from_fn(|i| cfg.vol_hi(i)))
        .map_err(|e| RunError::validation("uncertainty", e))
}

/// Open-loop and state-switch policies; `feedback` is only built by the gbm run.
pub fn policy<const D: usize>(cfg: &ExperimentConfig, name: &str) -> Result<Policy<D>, RunError> {
    let u = &cfg.uncertainty;
    Ok(match name {
        "high" => Policy::High,
        "low" => Policy::Low,
        "iid" => Policy::Iid,
        "bang-bang-time" => Policy::BangBangTime { switch_time: u.switch_time, high_first: true },
        "bang-bang-state" => Policy::BangBangState { direction: Point::unit(0), threshold: u.threshold },
        "feedback" => {
            return Err(RunError::validation("uncertainty.policies", "`feedback` is only available to the gbm experiment"))
        }
        other => return Err(RunError::validation("uncertainty.policies", format!("unknown policy `{other}`"))),
    })
}

pub fn policies<const D: usize>(cfg: &ExperimentConfig) -> Result<Vec<Policy<D>>, RunError> {
    cfg.uncertainty.policies.iter().map(|p| policy(cfg, p)).collect()
}

pub fn family<const D: usize>(cfg: &ExperimentConfig, grid: Grid) -> Result<Vec<Scenario<D>>, RunError> {
    let gamma = volset::<D>(cfg)?;
    let sampler = SamplerConfig {
        n_scenarios: cfg.uncertainty.n_scenarios.max(1),
        n_paths: cfg.uncertainty.n_paths,
        policies: policies(cfg)?,
        seed: cfg.seed,
    };
    build_family(&gamma, grid, &sampler).map_err(|e| RunError::validation("uncertainty", e))
}

/// `None` for `name = "none"` (plain reflected G-Brownian motion).
pub fn coefficients<const D: usize>(b: &CoefficientsBlock) -> Result<Option<Builtin<D>>, RunError> {
    let base = match b.name.as_str() {
        "none" => return Ok(None),
        "zero" => Builtin::Zero,
        "identity" => Builtin::Identity,
        "constant-drift" => {
            let c = b.drift.as_deref().ok_or_else(|| RunError::validation("coefficients.drift", "required"))?;
            Builtin::ConstantDrift(point("coefficients.drift", c)?)
        }
        "trig-bounded" => {
            if !(b.a.is_finite() && b.b.is_finite() && b.b.abs() < 1.0) {
                return Err(RunError::validation("coefficients.b", "needs |b| < 1 and finite a"));
            }
            Builtin::TrigBounded { a: b.a, b: b.b }
        }
        other => return Err(RunError::validation("coefficients.name", format!("unknown set `{other}`"))),
    };
    Ok(Some(match &b.shift {
        Some(s) => Builtin::perturbed(base, point("coefficients.shift", s)?),
        None => base,
    }))
}

pub fn holder(cfg: &ExperimentConfig) -> Result<HolderMethod, RunError> {
    match cfg.solver.holder.as_str() {
        "auto" => Ok(HolderMethod::Auto),
        "exact" => Ok(HolderMethod::Exact),
        "dyadic" => Ok(HolderMethod::Dyadic),
        other => Err(RunError::validation("solver.holder", format!("unknown method `{other}`"))),
    }
}

pub fn substeps(cfg: &ExperimentConfig) -> SubstepPolicy {
    match cfg.solver.substeps {
        Some(n) => SubstepPolicy::Fixed(n),
        None => SubstepPolicy::Auto { theta: cfg.solver.theta },
    }
}

/// `sin(4πt + iπ/2) − sin(iπ/2) − 2t` in coordinate `i`.
pub fn sin_drift<const D: usize>(grid: Grid) -> Path<D> {
    Path::from_fn(grid, |t| {
        Point(core::array::from_fn(|i| {
            let ph = 0.5 * PI * i as f64;
            (4.0 * PI * t + ph).sin() - ph.sin() - 2.0 * t
        }))
    })
    .expect("finite driver")
}

/// Random trigonometric driver `Σ a_j (sin(2π f_j t + p_j) − sin p_j)`, four
/// terms per coordinate, amplitudes uniform in `[−scale, scale]`.
pub fn smooth_driver<const D: usize>(grid: Grid, seed: u64, idx: u64, scale: f64) -> Path<D> {
    let mut rng = CounterRng::new(seed, Stream::Driver(idx));
    let terms: Vec<[(f64, f64, f64); D]> = (0..4)
        .map(|_| {
            core::array::from_fn(|_| {
                (scale * rng.uniform_in(-1.0, 1.0), rng.uniform_in(0.5, 4.0), rng.uniform_in(0.0, 2.0 * PI))
            })
        })
        .collect();
    Path::from_fn(grid, |t| {
        let mut p = Point::zero();
        for term in &terms {
            for (i, (a, f, ph)) in term.iter().enumerate() {
                p[i] += a * ((2.0 * PI * f * t + ph).sin() - ph.sin());
            }
        }
        p
    })
    .expect("finite driver")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::load;

    #[test]
    fn shell_defaults_follow_the_inner_radius() {
        let cfg = load(None, &["domain.kind=shell".into(), "domain.dim=2".into(), "domain.inner=1".into(), "domain.outer=3".into()])
            .unwrap();
        let d = domain::<2>(&cfg.domain).unwrap();
        assert_eq!((d.r0, d.delta, d.kappa), (1.0, 0.5, 2.0));
        assert!(d.psi.is_some());
        assert_eq!(start(&cfg, &d).unwrap(), Point([2.0, 0.0]));
    }

    #[test]
    fn errors_name_the_key() {
        let cfg = load(None, &["domain.kind=shell".into(), "domain.dim=2".into()]).unwrap();
        assert!(domain::<2>(&cfg.domain).unwrap_err().to_string().contains("domain.inner"));
        let cfg = load(None, &["domain.kind=torus".into()]).unwrap();
        assert!(domain::<1>(&cfg.domain).unwrap_err().to_string().contains("domain.kind"));
        let cfg = load(None, &["solver.x0=[-1.0]".into()]).unwrap();
        let d = domain::<1>(&cfg.domain).unwrap();
        assert!(start(&cfg, &d).unwrap_err().to_string().contains("solver.x0"));
    }

    #[test]
    fn sin_drift_starts_at_zero() {
        let w = sin_drift::<2>(Grid::uniform(1.0, 100).unwrap());
        assert_eq!(w.values[0], Point::zero());
        assert!((w.last()[0] + 2.0).abs() < 1e-12);
    }
}
