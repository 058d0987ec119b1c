use proptest::prelude::*;
use rgsde_core::exec::{Executor, Sequential};
use rgsde_core::skorokhod::Grid;
use rgsde_core::uncertainty::{
    build_family, evaluate_family, g_function, qv_bound_defect, report_from_values, sample_scenario, simulate,
    upper_expectation, upper_expectation_over, Policy, SamplerConfig, VolSet,
};
use rgsde_core::{Mat, Point};

/// Evaluates in reverse index order, standing in for an arbitrary worker schedule.
struct Reversed;

impl Executor for Reversed {
    fn map_indexed<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        let mut out: Vec<(usize, T)> = (0..n).rev().map(|i| (i, f(i))).collect();
        out.sort_by_key(|p| p.0);
        out.into_iter().map(|p| p.1).collect()
    }
}

fn sym2(a: f64, b: f64, c: f64) -> Mat<2> {
    Mat([[a, b], [b, c]])
}

fn gamma2_lists() -> Vec<VolSet<2>> {
    vec![
        VolSet::diag_box([1.0, 1.0], [2.0, 2.0]).unwrap(),
        VolSet::finite(vec![Mat::identity(), Mat::scalar(2.0), Mat([[1.0, 0.5], [0.0, 1.5]])]).unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn g_is_positively_homogeneous(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, lam in 0.0f64..10.0) {
        for gamma in gamma2_lists() {
            let m = sym2(a, b, c);
            let lhs = g_function(&gamma, &m.scale(lam)).unwrap();
            let rhs = lam * g_function(&gamma, &m).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
        }
        let g1 = VolSet::interval(1.0, 2.0).unwrap();
        let lhs = g_function(&g1, &Mat([[a * lam]])).unwrap();
        prop_assert!((lhs - lam * g_function(&g1, &Mat([[a]])).unwrap()).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }

    #[test]
    fn g_is_monotone(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, u in -2.0f64..2.0, v in -2.0f64..2.0) {
        // adding a positive semidefinite matrix never decreases G
        let base = sym2(a, b, c);
        let psd = Mat::outer(&Point([u, v]), &Point([u, v]));
        for gamma in gamma2_lists() {
            prop_assert!(g_function(&gamma, &base).unwrap() <= g_function(&gamma, &base.add(&psd)).unwrap() + 1e-12);
        }
    }

    #[test]
    fn qv_defect_vanishes_on_generated_bundles(seed in 0u64..1000, probe in -1.0f64..1.0) {
        let grid = Grid::uniform(1.0, 64).unwrap();
        let gamma = VolSet::diag_box([1.0, 1.0], [2.0, 2.0]).unwrap();
        let policies = [Policy::High, Policy::Low, Policy::Iid, Policy::BangBangTime { switch_time: 0.3, high_first: true },
            Policy::BangBangState { direction: Point([1.0, -1.0]), threshold: 0.1 }];
        for (i, p) in policies.iter().enumerate() {
            let s = sample_scenario(&gamma, grid, p, seed, i as u64).unwrap();
            let b = simulate(&s, seed, 0);
            let a = Point([probe, 1.0]);
            prop_assert!(qv_bound_defect(&b, &gamma, &a).unwrap().defect <= 1e-12);
        }
    }
}

#[test]
fn adding_scenarios_never_lowers_the_estimate() {
    let grid = Grid::uniform(1.0, 100).unwrap();
    let gamma = VolSet::interval(1.0, 2.0).unwrap();
    let cfg = SamplerConfig { n_scenarios: 4, n_paths: 500, policies: vec![Policy::Low, Policy::Iid], seed: 3 };
    let small = build_family(&gamma, grid, &cfg).unwrap();
    let mut big = small.clone();
    big.push(sample_scenario(&gamma, grid, &Policy::High, 3, 99).unwrap());
    let f = |p: &rgsde_core::Path<1>| p.last()[0].powi(2);
    let a = upper_expectation_over(&f, &small, 500, 3, &Sequential);
    let b = upper_expectation_over(&f, &big, 500, 3, &Sequential);
    assert!(b.value >= a.value);
}

#[test]
fn estimate_is_sublinear_on_a_shared_batch() {
    let grid = Grid::uniform(1.0, 100).unwrap();
    let gamma = VolSet::interval(1.0, 2.0).unwrap();
    let cfg = SamplerConfig {
        n_scenarios: 3,
        n_paths: 2000,
        policies: vec![Policy::High, Policy::Low, Policy::Iid, Policy::BangBangTime { switch_time: 0.5, high_first: false }],
        seed: 8,
    };
    let family = build_family(&gamma, grid, &cfg).unwrap();
    let labels: Vec<String> = family.iter().map(|s| s.label.clone()).collect();
    let x = evaluate_family(&|p: &rgsde_core::Path<1>| p.last()[0].powi(2), &family, 2000, 8, &Sequential);
    let y = evaluate_family(&|p: &rgsde_core::Path<1>| -(p.last()[0].abs()), &family, 2000, 8, &Sequential);
    let xy: Vec<Vec<f64>> = x.iter().zip(&y).map(|(a, b)| a.iter().zip(b).map(|(u, v)| u + v).collect()).collect();
    let (rx, ry, rxy) = (report_from_values(&x, &labels), report_from_values(&y, &labels), report_from_values(&xy, &labels));
    assert!(rxy.value <= rx.value + ry.value + 3.0 * rxy.stderr);
}

#[test]
fn estimates_do_not_depend_on_the_executor() {
    let grid = Grid::uniform(1.0, 50).unwrap();
    let gamma = VolSet::diag_box([1.0, 1.0], [2.0, 2.0]).unwrap();
    let cfg = SamplerConfig { n_scenarios: 3, n_paths: 200, policies: vec![Policy::High, Policy::Iid], seed: 11 };
    let f = |p: &rgsde_core::Path<2>| p.sup_norm();
    let a = upper_expectation(&f, &gamma, grid, &cfg, &Sequential).unwrap();
    let b = upper_expectation(&f, &gamma, grid, &cfg, &Reversed).unwrap();
    assert_eq!(a, b);
}
