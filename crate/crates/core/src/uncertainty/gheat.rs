use alloc::vec::Vec;

use super::{UncertaintyError, VolSet};
use crate::math;
use crate::skorokhod::Grid;

/// Space grid and truncation for [`gheat_solve_1d`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GHeatConfig {
    pub dx: f64,
    /// Truncation half-width; `None` picks `8 σ_high √T`.
    pub half_width: Option<f64>,
    /// Time step; `None` picks the largest step allowed by the CFL limit.
    pub dt: Option<f64>,
    /// Monte Carlo grid whose cell start times get a recorded convexity table.
    pub feedback_grid: Option<Grid>,
    /// Also solve with `2 dx` and report the difference as an error bound.
    pub richardson: bool,
}

impl GHeatConfig {
    pub fn new(dx: f64) -> Self {
        Self { dx, half_width: None, dt: None, feedback_grid: None, richardson: true }
    }
}

/// Sign of `u_xx` at the start of every Monte Carlo cell, on the space grid.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedbackTable {
    pub x_min: f64,
    pub dx: f64,
    /// `convex[k][i]`: `u_xx(t_k, x_min + i dx) ≥ 0`.
    pub convex: Vec<Vec<bool>>,
}

impl FeedbackTable {
    pub fn cells(&self) -> usize {
        self.convex.len()
    }

    /// Lookup with nearest-node rounding; points beyond the truncation use the
    /// edge node.
    pub fn convex_at(&self, cell: usize, x: f64) -> bool {
        let row = &self.convex[cell];
        let i = math::round((x - self.x_min) / self.dx);
        let i = if i.is_nan() || i < 0.0 { 0 } else { (i as usize).min(row.len() - 1) };
        row[i]
    }

    /// Fraction of table entries marked convex.
    pub fn convex_fraction(&self) -> f64 {
        let total: usize = self.convex.iter().map(Vec::len).sum();
        let yes: usize = self.convex.iter().map(|r| r.iter().filter(|c| **c).count()).sum();
        yes as f64 / total.max(1) as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GHeatSolution {
    /// `u(0, 0)`.
    pub value: f64,
    /// `|u_dx(0,0) − u_2dx(0,0)|` when requested.
    pub fd_error: Option<f64>,
    pub feedback: Option<FeedbackTable>,
    pub time_steps: usize,
    pub half_width: f64,
}

struct Run {
    value: f64,
    feedback: Option<FeedbackTable>,
    steps: usize,
}

fn march(
    terminal: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    horizon: f64,
    dx: f64,
    half: f64,
    dt: Option<f64>,
    record: Option<Grid>,
) -> Result<Run, UncertaintyError> {
    let limit = dx * dx / (2.0 * hi * hi).max(f64::MIN_POSITIVE);
    let dt_max = match dt {
        Some(dt) if dt > limit => return Err(UncertaintyError::CflViolation { dt, limit }),
        Some(dt) if !(dt > 0.0) => return Err(UncertaintyError::InvalidParameter("dt must be positive")),
        Some(dt) => dt,
        None => limit,
    };
    let steps = (math::ceil(horizon / dt_max) as usize).max(1);
    let tau = horizon / steps as f64;
    let m = math::round(half / dx) as usize;
    let xs: Vec<f64> = (0..=2 * m).map(|i| (i as f64 - m as f64) * dx).collect();
    let mut u: Vec<f64> = xs.iter().map(|x| terminal(*x)).collect();
    let mut next = u.clone();
    let (a_hi, a_lo) = (0.5 * hi * hi * tau / (dx * dx), 0.5 * lo * lo * tau / (dx * dx));

    // requested record times, as time-to-go, in increasing order
    let mut wanted: Vec<(usize, f64)> = match record {
        Some(g) => (0..g.n).map(|k| (k, horizon - g.time(k))).collect(),
        None => Vec::new(),
    };
    wanted.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut rows: Vec<Vec<bool>> = alloc::vec![Vec::new(); record.map_or(0, |g| g.n)];
    let mut w = 0;
    let convexity = |u: &[f64]| -> Vec<bool> {
        let n = u.len();
        let mut c: Vec<bool> = (0..n)
            .map(|i| i == 0 || i + 1 == n || u[i + 1] - 2.0 * u[i] + u[i - 1] >= -1e-12 * (1.0 + u[i].abs()))
            .collect();
        c[0] = c[1];
        c[n - 1] = c[n - 2];
        c
    };
    for s in 0..=steps {
        let time_to_go = s as f64 * tau;
        while w < wanted.len() && wanted[w].1 <= time_to_go + 0.5 * tau {
            rows[wanted[w].0] = convexity(&u);
            w += 1;
        }
        if s == steps {
            break;
        }
        for i in 1..2 * m {
            let d2 = u[i + 1] - 2.0 * u[i] + u[i - 1];
            next[i] = u[i] + if d2 >= 0.0 { a_hi * d2 } else { a_lo * d2 };
        }
        next[0] = u[0];
        next[2 * m] = u[2 * m];
        core::mem::swap(&mut u, &mut next);
    }
    Ok(Run {
        value: u[m],
        feedback: record.map(|_| FeedbackTable { x_min: xs[0], dx, convex: rows }),
        steps,
    })
}

/// Explicit monotone finite differences for `u_τ = ½(σ_high² (u_xx)⁺ − σ_low² (u_xx)⁻)`,
/// `u(τ = 0) = φ`, marched in time-to-go with Dirichlet far-field values
/// `φ(±half_width)`. Returns `u` at `(t, x) = (0, 0)`.
pub fn gheat_solve_1d(
    gamma: &VolSet<1>,
    terminal: &dyn Fn(f64) -> f64,
    horizon: f64,
    cfg: &GHeatConfig,
) -> Result<GHeatSolution, UncertaintyError> {
    let (lo, hi) = gamma.bounds().ok_or(UncertaintyError::PolicyUnsupported("G-heat solver needs an interval set"))?;
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(UncertaintyError::InvalidParameter("horizon must be positive"));
    }
    if !(cfg.dx > 0.0 && cfg.dx.is_finite()) {
        return Err(UncertaintyError::InvalidParameter("dx must be positive"));
    }
    let required = 6.0 * hi * math::sqrt(horizon);
    let half = cfg.half_width.unwrap_or(8.0 * hi * math::sqrt(horizon)).max(2.0 * cfg.dx);
    if half < required {
        return Err(UncertaintyError::TruncationTooTight { half_width: half, required });
    }
    // keep the origin on both the dx and the 2dx grid
    let half = math::ceil(half / (2.0 * cfg.dx)) * 2.0 * cfg.dx;
    let fine = march(terminal, lo, hi, horizon, cfg.dx, half, cfg.dt, cfg.feedback_grid)?;
    let fd_error = if cfg.richardson {
        let coarse = march(terminal, lo, hi, horizon, 2.0 * cfg.dx, half, cfg.dt, None)?;
        Some((fine.value - coarse.value).abs())
    } else {
        None
    };
    Ok(GHeatSolution {
        value: fine.value,
        fd_error,
        feedback: fine.feedback,
        time_steps: fine.steps,
        half_width: half,
    })
}
