use alloc::boxed::Box;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::geometry::Domain;
use crate::linalg::Point;
use crate::math;
use crate::rng::{CounterRng, Stream};

static CLAMP_EVENTS: AtomicUsize = AtomicUsize::new(0);

/// Number of coefficient evaluations clamped to their declared bound since
/// process start.
pub fn clamp_events() -> usize {
    CLAMP_EVENTS.load(Ordering::Relaxed)
}

/// Scales `v` back onto the ball of radius `bound`. The first clamp, and every
/// power-of-two count after it, is logged at warning level.
pub fn clamp_to_bound<const D: usize>(v: Point<D>, bound: f64, what: &str) -> Point<D> {
    let n = v.norm();
    if n <= bound || !n.is_finite() {
        return v;
    }
    let count = CLAMP_EVENTS.fetch_add(1, Ordering::Relaxed) + 1;
    if count.is_power_of_two() {
        log::warn!("coefficient {what} exceeded its declared bound {bound} (|v| = {n}); clamped ({count} events so far)");
    }
    v * (bound / n)
}

/// Coefficients `f`, `h^{ij}`, `g^j` with a common bound and Lipschitz
/// constant `L0`. Implementors return raw values; the solvers clamp them.
pub trait Coefficients<const D: usize>: Sync {
    fn drift(&self, t: f64, x: &Point<D>) -> Point<D>;

    /// The `d⟨B^i, B^j⟩` coefficient.
    fn qv_drift(&self, _i: usize, _j: usize, _t: f64, _x: &Point<D>) -> Point<D> {
        Point::zero()
    }

    /// Column `j`, multiplying `dB^j`.
    fn diffusion(&self, j: usize, t: f64, x: &Point<D>) -> Point<D>;

    fn bound(&self) -> f64;

    /// `false` lets the integrator skip the `d⟨B⟩` sum.
    fn has_qv_drift(&self) -> bool {
        false
    }

    /// `false` when `g ≡ 0`.
    fn has_diffusion(&self) -> bool {
        true
    }
}

/// The named coefficient sets shipped with the library.
#[derive(Clone, Debug, PartialEq)]
pub enum Builtin<const D: usize> {
    Zero,
    /// `f ≡ c`, `g = h = 0`.
    ConstantDrift(Point<D>),
    /// `g^j = e_j`: the driver is `B` itself.
    Identity,
    /// `f_i = −a sin x_i`, `g^j = (1 + b cos x_j) e_j`.
    TrigBounded { a: f64, b: f64 },
    /// Adds a constant to the drift of another set.
    Perturbed { base: Box<Builtin<D>>, shift: Point<D> },
    /// Adds `c·e_i` to the `d⟨B^i, B^i⟩` coefficient of another set.
    QvDrift { base: Box<Builtin<D>>, c: f64 },
}

impl<const D: usize> Builtin<D> {
    /// The set used by the Picard experiments.
    pub fn trig() -> Self {
        Builtin::TrigBounded { a: 1.0, b: 0.1 }
    }

    pub fn perturbed(base: Builtin<D>, shift: Point<D>) -> Self {
        Builtin::Perturbed { base: Box::new(base), shift }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Zero => "zero",
            Builtin::ConstantDrift(_) => "constant-drift",
            Builtin::Identity => "identity",
            Builtin::TrigBounded { .. } => "trig-bounded",
            Builtin::Perturbed { .. } => "perturbed",
            Builtin::QvDrift { .. } => "qv-drift",
        }
    }
}

impl<const D: usize> Coefficients<D> for Builtin<D> {
    fn drift(&self, t: f64, x: &Point<D>) -> Point<D> {
        match self {
            Builtin::Zero | Builtin::Identity => Point::zero(),
            Builtin::ConstantDrift(c) => *c,
            Builtin::TrigBounded { a, .. } => x.map(|v| -a * math::sin(v)),
            Builtin::Perturbed { base, shift } => base.drift(t, x) + *shift,
            Builtin::QvDrift { base, .. } => base.drift(t, x),
        }
    }

    fn qv_drift(&self, i: usize, j: usize, t: f64, x: &Point<D>) -> Point<D> {
        match self {
            Builtin::Perturbed { base, .. } => base.qv_drift(i, j, t, x),
            Builtin::QvDrift { base, c } => {
                let mut v = base.qv_drift(i, j, t, x);
                if i == j {
                    v[i] += c;
                }
                v
            }
            _ => Point::zero(),
        }
    }

    fn diffusion(&self, j: usize, t: f64, x: &Point<D>) -> Point<D> {
        match self {
            Builtin::Zero | Builtin::ConstantDrift(_) => Point::zero(),
            Builtin::Identity => Point::unit(j),
            Builtin::TrigBounded { b, .. } => Point::unit(j) * (1.0 + b * math::cos(x[j])),
            Builtin::Perturbed { base, .. } | Builtin::QvDrift { base, .. } => base.diffusion(j, t, x),
        }
    }

    fn bound(&self) -> f64 {
        match self {
            Builtin::Zero => 0.0,
            Builtin::ConstantDrift(c) => c.norm(),
            Builtin::Identity => 1.0,
            Builtin::TrigBounded { a, b } => (a.abs() * math::sqrt(D as f64)).max(1.0 + b.abs()),
            Builtin::Perturbed { base, shift } => base.bound() + shift.norm(),
            Builtin::QvDrift { base, c } => base.bound() + c.abs(),
        }
    }

    fn has_qv_drift(&self) -> bool {
        match self {
            Builtin::QvDrift { .. } => true,
            Builtin::Perturbed { base, .. } => base.has_qv_drift(),
            _ => false,
        }
    }

    fn has_diffusion(&self) -> bool {
        match self {
            Builtin::Zero | Builtin::ConstantDrift(_) => false,
            Builtin::Perturbed { base, .. } | Builtin::QvDrift { base, .. } => base.has_diffusion(),
            _ => true,
        }
    }
}

/// Spot check of the bound and Lipschitz declarations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientCheck {
    /// `max |value| / L0` over the sampled points.
    pub value_ratio: f64,
    /// `max |c(x) − c(y)| / (L0 |x − y|)`.
    pub lipschitz_ratio: f64,
    pub points_checked: usize,
}

impl CoefficientCheck {
    pub fn pass(&self) -> bool {
        self.value_ratio <= 1.0 + 1e-6 && self.lipschitz_ratio <= 1.0 + 1e-6
    }
}

fn each_component<const D: usize, C: Coefficients<D> + ?Sized>(c: &C, t: f64, x: &Point<D>, mut visit: impl FnMut(Point<D>)) {
    visit(c.drift(t, x));
    for j in 0..D {
        visit(c.diffusion(j, t, x));
        for i in 0..D {
            visit(c.qv_drift(i, j, t, x));
        }
    }
}

/// Samples `samples` points of `[0, horizon] × D̄`, each paired with a nearby
/// second point, and compares against the declared `L0`.
pub fn check_coefficients<const D: usize, C: Coefficients<D> + ?Sized>(
    coeffs: &C,
    domain: &Domain<D>,
    horizon: f64,
    samples: usize,
    seed: u64,
) -> CoefficientCheck {
    let l0 = coeffs.bound();
    let mut rng = CounterRng::new(seed, Stream::Sampling(1));
    let mut out = CoefficientCheck { value_ratio: 0.0, lipschitz_ratio: 0.0, points_checked: samples };
    let ratio = |v: f64| if l0 > 0.0 { v / l0 } else if v > 0.0 { f64::INFINITY } else { 0.0 };
    for _ in 0..samples {
        let x = &domain.sample_closure(&mut rng);
        let t = rng.uniform() * horizon;
        let y = *x + rng.unit_vector::<D>() * (1e-3 * rng.uniform() + 1e-4);
        let dist = x.dist(&y);
        let mut vx = alloc::vec::Vec::with_capacity(1 + D + D * D);
        each_component(coeffs, t, x, |v| vx.push(v));
        let mut idx = 0;
        each_component(coeffs, t, &y, |v| {
            out.value_ratio = out.value_ratio.max(ratio(vx[idx].norm()));
            out.lipschitz_ratio = out.lipschitz_ratio.max(ratio(vx[idx].dist(&v) / dist));
            idx += 1;
        });
    }
    out
}
