use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{sigma_aa, FeedbackTable, UncertaintyError, VolSet};
use crate::linalg::{Mat, Point};
use crate::math;
use crate::rng::{CounterRng, Stream};
use crate::skorokhod::{Grid, Path};

/// How a scenario selects its volatility.
#[derive(Clone, Debug, PartialEq)]
pub enum Policy<const D: usize> {
    /// A fixed member of `Γ`.
    Constant(Mat<D>),
    /// The extremal matrix maximising `tr(QQᵀ)`.
    High,
    /// The extremal matrix minimising `tr(QQᵀ)`.
    Low,
    /// Independent uniform draws per cell.
    Iid,
    /// Open loop: one extremal matrix before `switch_time`, the other after.
    BangBangTime { switch_time: f64, high_first: bool },
    /// Closed loop: high while `⟨a, B_t⟩ ≥ threshold`, low otherwise.
    BangBangState { direction: Point<D>, threshold: f64 },
    /// Closed loop, one dimension: high where the table marks `u_xx ≥ 0`.
    Feedback(FeedbackTable),
}

impl<const D: usize> Policy<D> {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Constant(_) => "constant",
            Policy::High => "constant-high",
            Policy::Low => "constant-low",
            Policy::Iid => "iid",
            Policy::BangBangTime { .. } => "bang-bang-time",
            Policy::BangBangState { .. } => "bang-bang-state",
            Policy::Feedback(_) => "feedback",
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, Policy::Iid)
    }
}

/// The volatility law of a scenario; closed-loop laws are realised path by path.
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioLaw<const D: usize> {
    OpenLoop(Vec<Mat<D>>),
    StateSwitch { direction: Point<D>, threshold: f64, high: Mat<D>, low: Mat<D> },
    Feedback { table: FeedbackTable, high: Mat<D>, low: Mat<D> },
}

/// One explicit member of the measure family at grid resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario<const D: usize> {
    pub grid: Grid,
    pub law: ScenarioLaw<D>,
    pub label: String,
}

impl<const D: usize> Scenario<D> {
    /// An open-loop scenario, checked cell by cell for membership in `Γ`.
    pub fn open_loop(grid: Grid, q: Vec<Mat<D>>, gamma: &VolSet<D>, label: &str) -> Result<Self, UncertaintyError> {
        if q.len() != grid.n {
            return Err(UncertaintyError::DimensionMismatch { expected: grid.n, got: q.len() });
        }
        if let Some(cell) = q.iter().position(|m| !gamma.contains(m)) {
            return Err(UncertaintyError::OutOfSet { cell });
        }
        Ok(Self { grid, law: ScenarioLaw::OpenLoop(q), label: label.to_string() })
    }

    /// An open-loop scenario without the membership check (for building
    /// deliberate violations).
    pub fn unchecked(grid: Grid, q: Vec<Mat<D>>) -> Self {
        assert_eq!(q.len(), grid.n);
        Self { grid, law: ScenarioLaw::OpenLoop(q), label: "unchecked".to_string() }
    }

    /// Volatility on cell `k` given the path value at its left end.
    #[inline]
    pub fn q_at(&self, k: usize, b: &Point<D>) -> Mat<D> {
        match &self.law {
            ScenarioLaw::OpenLoop(q) => q[k],
            ScenarioLaw::StateSwitch { direction, threshold, high, low } => {
                if direction.dot(b) >= *threshold {
                    *high
                } else {
                    *low
                }
            }
            ScenarioLaw::Feedback { table, high, low } => {
                if table.convex_at(k, b[0]) {
                    *high
                } else {
                    *low
                }
            }
        }
    }

    pub fn open_loop_q(&self) -> Option<&[Mat<D>]> {
        match &self.law {
            ScenarioLaw::OpenLoop(q) => Some(q),
            _ => None,
        }
    }

    /// The same scenario with every volatility multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let law = match &self.law {
            ScenarioLaw::OpenLoop(q) => ScenarioLaw::OpenLoop(q.iter().map(|m| m.scale(c)).collect()),
            ScenarioLaw::StateSwitch { direction, threshold, high, low } => ScenarioLaw::StateSwitch {
                direction: *direction,
                threshold: *threshold * c,
                high: high.scale(c),
                low: low.scale(c),
            },
            ScenarioLaw::Feedback { table, high, low } => ScenarioLaw::Feedback {
                table: table.clone(),
                high: high.scale(c),
                low: low.scale(c),
            },
        };
        Self { grid: self.grid, law, label: self.label.clone() }
    }
}

fn iid_draw<const D: usize>(gamma: &VolSet<D>, rng: &mut CounterRng) -> Mat<D> {
    match gamma {
        VolSet::DiagBox { lo, hi } => {
            let mut d = [0.0; D];
            for i in 0..D {
                d[i] = rng.uniform_in(lo[i], hi[i]);
            }
            Mat::diag(&d)
        }
        VolSet::Finite(l) => l[rng.below(l.len())],
    }
}

/// Build the scenario a policy describes. `index` selects the draw stream of
/// random policies, so `(seed, index)` determines the scenario.
pub fn sample_scenario<const D: usize>(
    gamma: &VolSet<D>,
    grid: Grid,
    policy: &Policy<D>,
    seed: u64,
    index: u64,
) -> Result<Scenario<D>, UncertaintyError> {
    let n = grid.n;
    let label = policy.name();
    match policy {
        Policy::Constant(q) => Scenario::open_loop(grid, alloc::vec![*q; n], gamma, label),
        Policy::High => Scenario::open_loop(grid, alloc::vec![gamma.high(); n], gamma, label),
        Policy::Low => Scenario::open_loop(grid, alloc::vec![gamma.low(); n], gamma, label),
        Policy::Iid => {
            let mut rng = CounterRng::new(seed, Stream::Volatility(index));
            let q = (0..n).map(|_| iid_draw(gamma, &mut rng)).collect();
            Scenario::open_loop(grid, q, gamma, label)
        }
        Policy::BangBangTime { switch_time, high_first } => {
            let (a, b) = if *high_first { (gamma.high(), gamma.low()) } else { (gamma.low(), gamma.high()) };
            let q = (0..n).map(|k| if grid.time(k) < *switch_time { a } else { b }).collect();
            Scenario::open_loop(grid, q, gamma, label)
        }
        Policy::BangBangState { direction, threshold } => Ok(Scenario {
            grid,
            law: ScenarioLaw::StateSwitch {
                direction: *direction,
                threshold: *threshold,
                high: gamma.high(),
                low: gamma.low(),
            },
            label: label.to_string(),
        }),
        Policy::Feedback(table) => {
            if D != 1 {
                return Err(UncertaintyError::PolicyUnsupported("feedback tables are one-dimensional"));
            }
            if table.cells() != n {
                return Err(UncertaintyError::DimensionMismatch { expected: n, got: table.cells() });
            }
            Ok(Scenario {
                grid,
                law: ScenarioLaw::Feedback { table: table.clone(), high: gamma.high(), low: gamma.low() },
                label: label.to_string(),
            })
        }
    }
}

/// One simulated path under one scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct GPathBundle<const D: usize> {
    /// Standard normal increments scaled by `√dt`.
    pub dw: Vec<Point<D>>,
    pub b: Path<D>,
    /// `⟨B, B⟩_k = Σ_{j<k} Q_j Q_jᵀ dt`.
    pub qv_analytic: Vec<Mat<D>>,
    /// `Σ_{j<k} ΔB_j ΔB_jᵀ`.
    pub qv_empirical: Vec<Mat<D>>,
    /// The volatility realised on each cell.
    pub q: Vec<Mat<D>>,
    pub seed: u64,
    pub path_index: u64,
}

impl<const D: usize> GPathBundle<D> {
    pub fn grid(&self) -> Grid {
        self.b.grid
    }

    /// `Δ⟨B, B⟩ = Q_k Q_kᵀ dt` on cell `k`, the exact summand of `qv_analytic`.
    #[inline]
    pub fn dqv(&self, k: usize) -> Mat<D> {
        self.q[k].gram().scale(self.b.grid.dt)
    }
}

fn noise<const D: usize>(rng: &mut CounterRng, sq: f64) -> Point<D> {
    let mut z = Point::zero();
    for i in 0..D {
        z[i] = rng.normal() * sq;
    }
    z
}

/// Path `path_index` of a scenario. The Gaussian increments depend only on
/// `(seed, path_index)`, so every scenario sees the same noise.
pub fn simulate<const D: usize>(scenario: &Scenario<D>, seed: u64, path_index: u64) -> GPathBundle<D> {
    let grid = scenario.grid;
    let n = grid.n;
    let sq = math::sqrt(grid.dt);
    let mut rng = CounterRng::new(seed, Stream::Noise(path_index));
    let mut dw = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n + 1);
    let mut qa = Vec::with_capacity(n + 1);
    let mut qe = Vec::with_capacity(n + 1);
    let mut qs = Vec::with_capacity(n);
    b.push(Point::zero());
    qa.push(Mat::zero());
    qe.push(Mat::zero());
    for k in 0..n {
        let z = noise::<D>(&mut rng, sq);
        let q = scenario.q_at(k, &b[k]);
        let db = q.mul_vec(&z);
        b.push(b[k] + db);
        qa.push(qa[k].add(&q.gram().scale(grid.dt)));
        qe.push(qe[k].add(&Mat::outer(&db, &db)));
        dw.push(z);
        qs.push(q);
    }
    GPathBundle { dw, b: Path { grid, values: b }, qv_analytic: qa, qv_empirical: qe, q: qs, seed, path_index }
}

/// Only the path `B` of [`simulate`], with identical values.
pub fn simulate_b<const D: usize>(scenario: &Scenario<D>, seed: u64, path_index: u64) -> Path<D> {
    let grid = scenario.grid;
    let sq = math::sqrt(grid.dt);
    let mut rng = CounterRng::new(seed, Stream::Noise(path_index));
    let mut b = Vec::with_capacity(grid.n + 1);
    b.push(Point::zero());
    for k in 0..grid.n {
        let z = noise::<D>(&mut rng, sq);
        let db = scenario.q_at(k, &b[k]).mul_vec(&z);
        b.push(b[k] + db);
    }
    Path { grid, values: b }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QvDefect {
    /// `max_k aᵀ Δ⟨B,B⟩_k a − σ_{aaᵀ} dt`.
    pub defect: f64,
    pub worst_cell: usize,
}

/// Grid-level check of `aᵀ(⟨B⟩_t − ⟨B⟩_s)a ≤ σ_{aaᵀ}(t − s)`.
pub fn qv_bound_defect<const D: usize>(
    bundle: &GPathBundle<D>,
    gamma: &VolSet<D>,
    a: &Point<D>,
) -> Result<QvDefect, UncertaintyError> {
    let s = sigma_aa(gamma, a)? * bundle.grid().dt;
    let mut out = QvDefect { defect: f64::NEG_INFINITY, worst_cell: 0 };
    for k in 0..bundle.grid().n {
        let d = bundle.dqv(k).quad(a) - s;
        if d > out.defect {
            out = QvDefect { defect: d, worst_cell: k };
        }
    }
    Ok(out)
}
