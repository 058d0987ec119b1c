//! Sampling checks of Conditions (A), (B) and (C). These are evidence, not proofs.

use alloc::vec::Vec;

use super::{Domain, GeometryError};
use crate::linalg::Point;
use crate::rng::{CounterRng, Stream};

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionAReport<const D: usize> {
    pub pass: bool,
    /// Boundary point with the most negative exterior-ball slack.
    pub worst_point: Point<D>,
    /// `max_n dist(x − r0 n, D̄) − r0` at the worst point; negative means no
    /// exterior ball of radius `r0` fits there.
    pub worst_slack: f64,
    pub points_checked: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionBReport<const D: usize> {
    pub pass: bool,
    pub worst_point: Point<D>,
    pub worst_inner_product: f64,
    /// Sampled boundary points whose own normal cone is empty (reentrant
    /// corners). Condition (B) may still hold there, but Condition (A) cannot.
    pub empty_cone_points: usize,
    pub points_checked: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionCReport<const D: usize> {
    pub pass: bool,
    pub min_slack: f64,
    pub worst_x: Point<D>,
    pub worst_y: Point<D>,
    pub triples_checked: usize,
}

fn boundary_points<const D: usize>(domain: &Domain<D>, samples: usize, rng: &mut CounterRng) -> Vec<Point<D>> {
    let mut pts = domain.special_boundary_points();
    pts.extend((0..samples).map(|_| domain.sample_boundary(rng)));
    pts
}

fn candidate_normals<const D: usize>(domain: &Domain<D>, x: &Point<D>, rng: &mut CounterRng) -> Vec<Point<D>> {
    let mut c = domain.cone_generators(x);
    c.extend(domain.cone_direction(x));
    if D == 1 {
        c.push(Point::unit(0));
        c.push(-Point::unit(0));
    } else {
        c.extend((0..32).map(|_| rng.unit_vector::<D>()));
    }
    c
}

/// For every sampled boundary point, look for a unit `n` with
/// `B(x − r0 n, r0) ∩ D = ∅`.
pub fn verify_condition_a<const D: usize>(domain: &Domain<D>, boundary_samples: usize, seed: u64) -> ConditionAReport<D> {
    let mut rng = CounterRng::new(seed, Stream::Sampling(0));
    let pts = boundary_points(domain, boundary_samples, &mut rng);
    let r0 = domain.r0;
    let mut report = ConditionAReport {
        pass: true,
        worst_point: pts.first().copied().unwrap_or(Point::zero()),
        worst_slack: f64::INFINITY,
        points_checked: pts.len(),
    };
    for x in &pts {
        let slack = candidate_normals(domain, x, &mut rng)
            .iter()
            .map(|n| domain.exterior_ball_slack(x, n, r0))
            .fold(f64::NEG_INFINITY, f64::max);
        if slack < report.worst_slack {
            report.worst_slack = slack;
            report.worst_point = *x;
        }
    }
    report.pass = report.worst_slack >= -domain.ball_tol(r0);
    report
}

/// Boundary points within `delta` of `x`, found by projecting random points of
/// `B(x, delta)` to the boundary, plus any special points in range.
fn boundary_neighbours<const D: usize>(
    domain: &Domain<D>,
    x: &Point<D>,
    delta: f64,
    cone_samples: usize,
    specials: &[Point<D>],
    rng: &mut CounterRng,
) -> Vec<Point<D>> {
    let mut out = alloc::vec![*x];
    out.extend(specials.iter().filter(|s| s.dist(x) <= delta).copied());
    for _ in 0..cone_samples {
        let r = delta * crate::math::powf(rng.uniform(), 1.0 / D as f64);
        let z = *x + rng.unit_vector::<D>() * r;
        let y = domain.nearest_boundary_point(&z);
        if y.dist(x) <= delta {
            out.push(y);
        }
    }
    out
}

/// Proposes `l_x` and checks `⟨l_x, n⟩ ≥ 1/β` for the normal-cone generators at
/// sampled boundary points of `B(x, δ)`. Since the test is linear in `n` and
/// its threshold positive, checking the generators covers the whole cone.
///
/// `l_x` is the better of the normalised generator sum at `x` and the max-min
/// direction of the gathered normals (the normalised minimum-norm point of
/// their convex hull, found by Frank–Wolfe).
pub fn verify_condition_b<const D: usize>(
    domain: &Domain<D>,
    boundary_samples: usize,
    cone_samples: usize,
    delta: f64,
    beta: f64,
    seed: u64,
) -> ConditionBReport<D> {
    let mut rng = CounterRng::new(seed, Stream::Sampling(1));
    let specials = domain.special_boundary_points();
    let pts = boundary_points(domain, boundary_samples, &mut rng);
    let mut report = ConditionBReport {
        pass: true,
        worst_point: pts.first().copied().unwrap_or(Point::zero()),
        worst_inner_product: f64::INFINITY,
        empty_cone_points: 0,
        points_checked: pts.len(),
    };
    for x in &pts {
        let neigh = boundary_neighbours(domain, x, delta, cone_samples, &specials, &mut rng);
        let normals: Vec<Point<D>> = neigh.iter().flat_map(|y| domain.cone_generators(y)).collect();
        let own = domain.cone_direction(x);
        if own.is_none() {
            report.empty_cone_points += 1;
        }
        let score = |l: &Point<D>| normals.iter().map(|n| l.dot(n)).fold(f64::INFINITY, f64::min);
        let worst = own
            .iter()
            .chain(max_min_direction(&normals).iter())
            .map(score)
            .fold(f64::NEG_INFINITY, f64::max);
        if worst < report.worst_inner_product {
            report.worst_inner_product = worst;
            report.worst_point = *x;
        }
    }
    report.pass = report.worst_inner_product >= 1.0 / beta - 1e-12;
    report
}

/// Normalised minimum-norm point of the convex hull of `normals`; `None` when the
/// hull (numerically) contains the origin.
fn max_min_direction<const D: usize>(normals: &[Point<D>]) -> Option<Point<D>> {
    let mut p = *normals.first()?;
    for _ in 0..500 {
        let (i, _) = normals
            .iter()
            .enumerate()
            .map(|(i, n)| (i, p.dot(n)))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        let d = p - normals[i];
        let gap = p.dot(&d);
        if gap <= 1e-15 {
            break;
        }
        let g = (gap / d.norm_sq()).clamp(0.0, 1.0);
        p = p - d * g;
    }
    if p.norm() < 1e-9 {
        None
    } else {
        p.normalized()
    }
}

/// Minimum over sampled triples of `⟨y − x, n⟩ + ⟨∇Ψ(x), n⟩ |y − x|² / δ'`.
///
/// `y` ranges over random closure points, other boundary points, and the
/// reflections of `x` through the domain's sampling box centre.
pub fn check_condition_c<const D: usize>(domain: &Domain<D>, samples: usize, seed: u64) -> Result<ConditionCReport<D>, GeometryError> {
    let psi = domain.psi.ok_or(GeometryError::PsiMissing)?;
    let mut rng = CounterRng::new(seed, Stream::Sampling(2));
    let xs = boundary_points(domain, samples, &mut rng);
    let mut ys: Vec<Point<D>> = (0..samples).map(|_| domain.sample_closure(&mut rng)).collect();
    ys.extend(boundary_points(domain, samples, &mut rng));
    let (lo, hi) = domain.sampling_box();
    let mid = (lo + hi) * 0.5;
    let tol = 10.0 * domain.boundary_tol.max(1e-12);
    let mut report = ConditionCReport {
        pass: true,
        min_slack: f64::INFINITY,
        worst_x: xs.first().copied().unwrap_or(Point::zero()),
        worst_y: xs.first().copied().unwrap_or(Point::zero()),
        triples_checked: 0,
    };
    for x in &xs {
        let grad = psi.gradient(x);
        let gens = domain.cone_generators(x);
        let mirror = mid * 2.0 - *x;
        let extra = (domain.distance_to_closure(&mirror) == 0.0).then_some(mirror);
        for y in ys.iter().chain(extra.iter()) {
            let v = *y - *x;
            let s2 = v.norm_sq();
            for n in &gens {
                let slack = v.dot(n) + grad.dot(n) * s2 / psi.delta_prime;
                report.triples_checked += 1;
                if slack < report.min_slack {
                    report.min_slack = slack;
                    report.worst_x = *x;
                    report.worst_y = *y;
                }
            }
        }
    }
    report.pass = report.min_slack >= -tol;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::super::{DomainKind, PsiSpec};
    use super::*;

    fn shell(r0: f64) -> Domain<2> {
        Domain::shell(Point([0.0, 0.0]), 1.0, 3.0, r0).unwrap()
    }

    fn l_shape() -> Domain<2> {
        Domain::new(
            DomainKind::LShape { lo: Point([0.0, 0.0]), hi: Point([2.0, 2.0]), corner: Point([1.0, 1.0]) },
            0.5,
            0.5,
            2.0,
        )
        .unwrap()
    }

    #[test]
    fn condition_a_examples() {
        let hs = Domain::<2>::half_line(3.0);
        assert!(verify_condition_a(&hs, 100, 1).pass);
        assert!(verify_condition_a(&shell(1.0), 500, 1).pass);
        let bad = verify_condition_a(&shell(1.5), 500, 1);
        assert!(!bad.pass);
        assert!((bad.worst_point.norm() - 1.0).abs() < 1e-9, "fails on the inner sphere");
        assert!(!verify_condition_a(&l_shape(), 200, 1).pass);
    }

    #[test]
    fn condition_b_examples() {
        let ball = Domain::ball(Point([0.0, 0.0]), 1.0).unwrap();
        assert!(verify_condition_b(&ball, 200, 50, 0.5, 2.0, 2).pass);
        assert!(verify_condition_b(&shell(1.0), 200, 50, 0.5, 2.0, 2).pass);
        let l = verify_condition_b(&l_shape(), 200, 50, 0.5, 2.0, 2);
        assert!(l.empty_cone_points >= 1);
        // the notch normals (−1,0), (0,−1) admit l = −(1,1)/√2
        assert!((l.worst_inner_product - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6, "{l:?}");
        assert!(!verify_condition_b(&l_shape(), 200, 50, 0.5, 1.2, 2).pass);
    }

    #[test]
    fn condition_c_examples() {
        let bx = Domain::new(
            DomainKind::AxisBox { lo: Point([0.0, 0.0]), hi: Point([1.0, 2.0]) },
            1.0,
            0.5,
            2.0,
        )
        .unwrap()
        .with_psi(PsiSpec::zero());
        assert!(check_condition_c(&bx, 100, 3).unwrap().pass);
        let good = shell(1.0).with_psi(PsiSpec::shell(Point([0.0, 0.0]), 1.0, 3.0));
        let r = check_condition_c(&good, 200, 3).unwrap();
        assert!(r.pass, "{r:?}");
        let bare = shell(1.0).with_psi(PsiSpec::zero());
        let r = check_condition_c(&bare, 200, 3).unwrap();
        assert!(!r.pass && (r.worst_x.norm() - 1.0).abs() < 1e-9);
        assert_eq!(check_condition_c(&shell(1.0), 10, 3), Err(GeometryError::PsiMissing));
    }
}
