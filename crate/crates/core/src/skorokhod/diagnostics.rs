use alloc::vec::Vec;

use super::{SkorokhodError, SkorokhodSolution};
use crate::geometry::Domain;
use crate::linalg::Point;

/// `max_k dist(ξ_k, D̄)`.
pub fn containment_margin<const D: usize>(sol: &SkorokhodSolution<D>, domain: &Domain<D>) -> f64 {
    sol.xi.values.iter().map(|x| domain.distance_to_closure(x)).fold(0.0, f64::max)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExcursionReport {
    /// Indices where the trace exceeded `eps` without first returning below
    /// `eps/3` after its last up-crossing of `eps/2`.
    pub violations: Vec<usize>,
    /// Number of up-crossings of `eps/2`.
    pub crossings: usize,
    pub max_distance: f64,
}

impl ExcursionReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Scan a distance trace for excursions that reach `eps` before revisiting `eps/3`.
pub fn excursion_scan(trace: &[f64], eps: f64) -> ExcursionReport {
    #[derive(PartialEq)]
    enum State {
        Low,
        Armed,
        Tripped,
    }
    let mut state = State::Low;
    let mut report = ExcursionReport::default();
    for (k, &d) in trace.iter().enumerate() {
        report.max_distance = report.max_distance.max(d);
        if d > eps {
            if state == State::Low {
                report.crossings += 1;
            }
            if state != State::Tripped {
                report.violations.push(k);
                state = State::Tripped;
            }
        } else if d >= 0.5 * eps {
            if state == State::Low {
                report.crossings += 1;
                state = State::Armed;
            }
        } else if d < eps / 3.0 {
            state = State::Low;
        }
    }
    report
}

pub fn excursion_report<const D: usize>(sol: &SkorokhodSolution<D>, domain: &Domain<D>, eps: f64) -> ExcursionReport {
    assert!(eps > 0.0, "eps must be positive");
    let trace: Vec<f64> = sol.xi.values.iter().map(|x| domain.distance_to_closure(x)).collect();
    excursion_scan(&trace, eps)
}

/// Alternating boundary-hit indices `T_n` and `δ/2`-displacement indices `t_n`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReflectionSchedule {
    pub big_t: Vec<usize>,
    pub small_t: Vec<usize>,
    /// Times of `big_t`.
    pub big_t_times: Vec<f64>,
    pub small_t_times: Vec<f64>,
    /// `min_n (T_n − T_{n−1})`; `None` with fewer than two boundary hits.
    pub min_gap: Option<f64>,
}

/// Stopping times on the projected path `ξ̄`: `T_0` is the first index with `ξ̄`
/// on the boundary, `t_n` the first later index where `ξ̄` has moved `δ/2` from
/// `ξ̄_{T_{n−1}}`, and `T_n` the next boundary index from `t_n` on.
pub fn reflection_schedule<const D: usize>(
    sol: &SkorokhodSolution<D>,
    domain: &Domain<D>,
    delta: f64,
) -> Result<ReflectionSchedule, SkorokhodError> {
    let tol = domain.boundary_tol.max(1e-12);
    let proj: Vec<Point<D>> = sol.xi.values.iter().map(|x| domain.project(x)).collect::<Result<_, _>>()?;
    let on_boundary: Vec<bool> = sol.xi.values.iter().map(|x| domain.depth(x) <= tol).collect();
    let n = proj.len();
    let grid = sol.grid();
    let mut s = ReflectionSchedule::default();
    let Some(mut last) = (0..n).find(|&k| on_boundary[k]) else {
        return Ok(s);
    };
    s.big_t.push(last);
    loop {
        let Some(tn) = (last + 1..n).find(|&k| proj[k].dist(&proj[last]) >= 0.5 * delta) else {
            break;
        };
        s.small_t.push(tn);
        let Some(bn) = (tn..n).find(|&k| on_boundary[k]) else {
            break;
        };
        s.big_t.push(bn);
        last = bn;
    }
    s.big_t_times = s.big_t.iter().map(|&k| grid.time(k)).collect();
    s.small_t_times = s.small_t.iter().map(|&k| grid.time(k)).collect();
    s.min_gap = s.big_t_times.windows(2).map(|w| w[1] - w[0]).reduce(f64::min);
    Ok(s)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complementarity {
    pub value: f64,
    /// `tv_T = 0`; the value is then 0 by convention.
    pub degenerate: bool,
}

/// Fraction of the total variation accrued in cells whose endpoints both stay
/// farther than `band` from the boundary.
pub fn complementarity_defect<const D: usize>(sol: &SkorokhodSolution<D>, domain: &Domain<D>, band: f64) -> Complementarity {
    let total = sol.tv_final();
    if total <= 0.0 {
        return Complementarity { value: 0.0, degenerate: true };
    }
    let dist: Vec<f64> = sol.xi.values.iter().map(|x| domain.distance_to_boundary(x)).collect();
    let off: f64 = (0..sol.tv.len() - 1)
        .filter(|&k| dist[k].min(dist[k + 1]) > band)
        .map(|k| sol.tv[k + 1] - sol.tv[k])
        .sum();
    Complementarity { value: (off / total).clamp(0.0, 1.0), degenerate: false }
}

/// Worst `1 − ⟨Δφ/|Δφ|, n⟩` over pushing cells, with `n` ranging over the normal
/// cone at the boundary point nearest to `ξ_{k+1}`.
pub fn normal_alignment_defect<const D: usize>(sol: &SkorokhodSolution<D>, domain: &Domain<D>) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..sol.phi.grid.n {
        let d = sol.phi.increment(k);
        let Some(u) = d.normalized() else { continue };
        let x = sol.xi.values[k + 1];
        let xb = domain.nearest_boundary_point(&x);
        worst = worst.max(1.0 - domain.cone_cosine(&xb, &u));
    }
    worst.clamp(0.0, 1.0)
}
