use proptest::prelude::*;
use rgsde_core::geometry::{Domain, DomainKind, Face, PenaltyField};
use rgsde_core::rng::{CounterRng, Stream};
use rgsde_core::Point;

const SAMPLES: usize = 1000;

fn gallery2() -> Vec<Domain<2>> {
    let tri = vec![
        Face::new(Point([1.0, 0.0]), 0.0).unwrap(),
        Face::new(Point([0.0, 1.0]), 0.0).unwrap(),
        Face::new(Point([-1.0, -1.0]), -2.0).unwrap(),
    ];
    vec![
        Domain::new(DomainKind::HalfSpace(Face::new(Point([1.0, 1.0]), 0.5).unwrap()), 1.0, 1.0, 1.0).unwrap(),
        Domain::ball(Point([0.5, -0.5]), 1.5).unwrap(),
        Domain::new(DomainKind::AxisBox { lo: Point([0.0, 0.0]), hi: Point([1.0, 2.0]) }, 1.0, 0.25, 2.0).unwrap(),
        Domain::new(DomainKind::Polytope { faces: tri }, 1.0, 0.25, 3.0).unwrap(),
        Domain::shell(Point([0.0, 0.0]), 1.0, 3.0, 1.0).unwrap(),
    ]
}

/// A point at distance in `(0, reach)` of the boundary, on either side.
fn near_boundary<const D: usize>(domain: &Domain<D>, rng: &mut CounterRng, reach: f64) -> Point<D> {
    let b = domain.sample_boundary(rng);
    b + rng.unit_vector::<D>() * (reach * rng.uniform())
}

fn outside_points<const D: usize>(domain: &Domain<D>, n: usize, reach: f64, seed: u64) -> Vec<Point<D>> {
    let mut rng = CounterRng::new(seed, Stream::Sampling(99));
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x = near_boundary(domain, &mut rng, reach);
        let d = domain.distance_to_closure(&x);
        if d > 1e-6 && d < reach {
            out.push(x);
        }
    }
    out
}

#[test]
fn projection_is_idempotent_and_normals_are_in_the_cone() {
    for domain in gallery2() {
        for x in outside_points(&domain, SAMPLES, 0.95 * domain.r0, 1) {
            let p = domain.project(&x).unwrap();
            let pp = domain.project(&p).unwrap();
            assert!(p.dist(&pp) <= 1e-12, "{}: {x:?}", domain.name());
            let n = (p - x).normalized().unwrap();
            assert!(domain.normal_cone_contains(&p, &n, domain.r0).unwrap(), "{}: {x:?}", domain.name());
        }
    }
}

#[test]
fn penalty_is_squared_distance_in_the_collar() {
    for domain in gallery2() {
        let field = PenaltyField::new(&domain).unwrap();
        let mut rng = CounterRng::new(2, Stream::Sampling(0));
        for _ in 0..SAMPLES {
            let x = near_boundary(&domain, &mut rng, 0.5 * domain.r0);
            let d = domain.distance_to_closure(&x);
            if d <= 0.5 * domain.r0 {
                assert!((field.value(&x) - d * d).abs() <= 1e-12, "{}", domain.name());
            }
        }
    }
}

#[test]
fn penalty_gradient_matches_central_differences() {
    let h = 1e-6;
    for domain in gallery2() {
        let field = PenaltyField::new(&domain).unwrap();
        let mut rng = CounterRng::new(3, Stream::Sampling(0));
        let mut checked = 0;
        while checked < SAMPLES {
            let x = near_boundary(&domain, &mut rng, 1.5 * domain.r0);
            if domain.distance_to_closure(&x) < 1e-4 {
                continue;
            }
            let g = field.gradient(&x);
            let mut fd = Point::<2>::zero();
            for i in 0..2 {
                let e = Point::<2>::unit(i) * h;
                fd[i] = (field.value(&(x + e)) - field.value(&(x - e))) / (2.0 * h);
            }
            let err = (fd - g).norm() / g.norm().max(1e-3);
            assert!(err <= 1e-6, "{}: {x:?} rel err {err}", domain.name());
            checked += 1;
        }
    }
}

#[test]
fn penalty_gradient_lipschitz_ratio_is_bounded() {
    for domain in gallery2() {
        let field = PenaltyField::new(&domain).unwrap();
        let mut rng = CounterRng::new(4, Stream::Sampling(0));
        let mut worst = 0.0f64;
        for _ in 0..SAMPLES {
            let x = near_boundary(&domain, &mut rng, 1.5 * domain.r0);
            let y = x + rng.unit_vector::<2>() * (0.2 * rng.uniform() + 1e-6);
            let r = (field.gradient(&x) - field.gradient(&y)).norm() / x.dist(&y);
            worst = worst.max(r);
        }
        assert!(worst <= field.lipschitz_2l * (1.0 + 1e-9), "{}: {worst} > {}", domain.name(), field.lipschitz_2l);
    }
}

#[test]
fn projection_lipschitz_constant_matches_kappa() {
    for domain in gallery2() {
        let pts = outside_points(&domain, SAMPLES, 0.5 * domain.r0, 5);
        let mut rng = CounterRng::new(5, Stream::Sampling(1));
        for x in &pts {
            let y = *x + rng.unit_vector::<2>() * (0.1 * rng.uniform() + 1e-6);
            if domain.distance_to_closure(&y) > 0.5 * domain.r0 {
                continue;
            }
            let ratio = domain.project(x).unwrap().dist(&domain.project(&y).unwrap()) / x.dist(&y);
            let bound = if domain.is_convex() { 1.0 } else { domain.kappa };
            assert!(ratio <= bound * (1.0 + 1e-9), "{}: ratio {ratio}", domain.name());
        }
    }
}

#[test]
fn three_dimensional_shell_and_box() {
    let shell = Domain::<3>::shell(Point::zero(), 1.0, 2.0, 1.0).unwrap();
    let cube = Domain::<3>::new(DomainKind::AxisBox { lo: Point::splat(-1.0), hi: Point::splat(1.0) }, 1.0, 0.25, 2.0).unwrap();
    for domain in [shell, cube] {
        for x in outside_points(&domain, 300, 0.9, 6) {
            let p = domain.project(&x).unwrap();
            let n = (p - x).normalized().unwrap();
            assert!(domain.normal_cone_contains(&p, &n, domain.r0).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ball_projection_lands_on_the_sphere(
        cx in -5.0f64..5.0, cy in -5.0f64..5.0, r in 0.1f64..4.0,
        ux in -1.0f64..1.0, uy in -1.0f64..1.0, s in 0.01f64..0.99,
    ) {
        let ball = Domain::ball(Point([cx, cy]), r).unwrap();
        let u = Point([ux, uy]);
        prop_assume!(u.norm() > 1e-3);
        let x = Point([cx, cy]) + u.normalized().unwrap() * (r * (1.0 + s));
        let p = ball.project(&x).unwrap();
        prop_assert!((p.dist(&Point([cx, cy])) - r).abs() <= 1e-12 * (1.0 + r + cx.abs() + cy.abs()));
        prop_assert!(ball.project(&p).unwrap().dist(&p) <= 1e-12);
    }

    #[test]
    fn box_distance_is_one_lipschitz(
        x0 in -3.0f64..3.0, y0 in -3.0f64..3.0, x1 in -3.0f64..3.0, y1 in -3.0f64..3.0,
    ) {
        let b = Domain::new(DomainKind::AxisBox { lo: Point([0.0, 0.0]), hi: Point([1.0, 2.0]) }, 5.0, 0.25, 2.0).unwrap();
        let (a, c) = (Point([x0, y0]), Point([x1, y1]));
        let gap = (b.distance_to_closure(&a) - b.distance_to_closure(&c)).abs();
        prop_assert!(gap <= a.dist(&c) + 1e-12);
    }

    #[test]
    fn shell_penalty_is_nonnegative_and_zero_inside(rho in 0.0f64..5.0, theta in 0.0f64..6.3) {
        let shell = Domain::shell(Point([0.0, 0.0]), 1.0, 3.0, 1.0).unwrap();
        let field = PenaltyField::new(&shell).unwrap();
        let x = Point([rho * theta.cos(), rho * theta.sin()]);
        let u = field.value(&x);
        prop_assert!(u >= 0.0);
        if (1.0..=3.0).contains(&rho) {
            prop_assert!(u <= 1e-20);
        }
    }
}
