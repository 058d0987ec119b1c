use std::f64::consts::PI;

use proptest::prelude::*;
use rgsde_core::geometry::{Domain, PenaltyField};
use rgsde_core::rng::{CounterRng, Stream};
use rgsde_core::skorokhod::{
    holder_stats, oscillation, reflection_constants, solve_halfline_explicit, solve_penalized, solve_projected,
    HolderMethod, SubstepPolicy,
};
use rgsde_core::{Grid, Path, Point};

/// Random trigonometric driver `Σ a_j sin(2π f_j t + p_j) − sin(p_j)` anchored at 0.
fn smooth_driver<const D: usize>(grid: Grid, seed: u64, idx: u64, scale: f64) -> Path<D> {
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
            for i in 0..D {
                let (a, f, ph) = term[i];
                p[i] += a * ((2.0 * PI * f * t + ph).sin() - ph.sin());
            }
        }
        p
    })
    .unwrap()
}

#[test]
fn projected_matches_the_explicit_half_line_map() {
    let grid = Grid::uniform(1.0, 2000).unwrap();
    let half = Domain::<1>::half_line(1.0);
    for i in 0..100 {
        let w = smooth_driver::<1>(grid, 17, i, 0.6);
        let a = solve_projected(&half, &w, Point([0.3])).unwrap();
        let b = solve_halfline_explicit(0.3, &w).unwrap();
        assert!(a.xi.sup_dist(&b.xi) <= 2.0 * w.max_increment() + 1e-15);
        assert!(a.identity_defect(&w) <= 1e-10);
    }
}

#[test]
fn penalized_tv_is_uniformly_bounded_in_m() {
    let grid = Grid::uniform(1.0, 1000).unwrap();
    let shell = Domain::<2>::shell(Point::zero(), 1.0, 3.0, 1.0).unwrap();
    let field = PenaltyField::new(&shell).unwrap();
    for i in 0..4 {
        let w = smooth_driver::<2>(grid, 5, i, 0.8);
        let proj = solve_projected(&shell, &w, Point([2.0, 0.0])).unwrap();
        for m in [1e2, 1e3, 1e4, 1e5] {
            let pen = solve_penalized(&field, &w, Point([2.0, 0.0]), m, SubstepPolicy::default()).unwrap();
            assert!(pen.tv_final() <= 2.0 * proj.tv_final() + 1.0, "m={m}");
            assert!(pen.identity_defect(&w) <= 1e-10);
        }
    }
}

#[test]
fn oscillation_bound_holds_on_dyadic_windows() {
    let grid = Grid::uniform(1.0, 1024).unwrap();
    let half = Domain::<1>::half_line(1.0);
    let field = PenaltyField::new(&half).unwrap();
    for i in 0..6 {
        let w = smooth_driver::<1>(grid, 23, i, 0.5);
        let stats = holder_stats(&w, 0.4, HolderMethod::Exact);
        for m in [1e2, 1e3, 1e4] {
            let rc = reflection_constants(&half, field.l(), &stats, m);
            let sol = solve_penalized(&field, &w, Point([0.2]), m, SubstepPolicy::default()).unwrap();
            let mut len = 1024;
            while len >= 8 {
                for start in (0..1024).step_by(len) {
                    let lhs = oscillation(&sol.xi, start, start + len);
                    let rhs = rc.oscillation_factor * (oscillation(&w, start, start + len) + rc.eps);
                    assert!(lhs <= rhs, "window {start}+{len}: {lhs} > {rhs}");
                }
                len /= 2;
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn identity_holds_for_every_method(seed in 0u64..10_000, scale in 0.05f64..1.0, x0 in 0.0f64..2.0) {
        let grid = Grid::uniform(1.0, 400).unwrap();
        let half = Domain::<1>::half_line(1.0);
        let field = PenaltyField::new(&half).unwrap();
        let w = smooth_driver::<1>(grid, seed, 0, scale);
        let sols = [
            solve_projected(&half, &w, Point([x0])).unwrap(),
            solve_halfline_explicit(x0, &w).unwrap(),
            solve_penalized(&field, &w, Point([x0]), 1e3, SubstepPolicy::default()).unwrap(),
        ];
        for s in &sols {
            prop_assert!(s.identity_defect(&w) <= 1e-10);
            prop_assert!(s.tv.windows(2).all(|p| p[1] >= p[0]));
        }
    }

    #[test]
    fn shell_projected_stays_in_the_closure(seed in 0u64..10_000, scale in 0.1f64..1.5) {
        let grid = Grid::uniform(1.0, 800).unwrap();
        let shell = Domain::<2>::shell(Point::zero(), 1.0, 3.0, 1.0).unwrap();
        let w = smooth_driver::<2>(grid, seed, 1, scale);
        let s = solve_projected(&shell, &w, Point([0.0, 2.0])).unwrap();
        prop_assert!(s.identity_defect(&w) <= 1e-10);
        for x in &s.xi.values {
            prop_assert!(shell.distance_to_closure(x) <= shell.boundary_tol.max(1e-12));
        }
    }
}
