//! The ten acceptance criteria, one line each. Runs without the libtest
//! harness so the lines are always printed; any failure makes the target fail.

use std::path::{Path as FsPath, PathBuf};
use std::process::Command;
use std::time::Instant;

use rgsde_cli::exec::PoolExecutor;
use rgsde_cli::setup::{sin_drift, smooth_driver};
use rgsde_core::exec::Sequential;
use rgsde_core::rgsde::{
    convergence_study, loglog_slope, picard_solve, simulate_batch, stability_gap, Builtin, CoeffDeltas,
    ConvergenceConfig, PicardConfig, PicardInit, Reflector,
};
use rgsde_core::skorokhod::{
    containment_margin, excursion_report, holder_stats, reflection_constants, reflection_schedule,
    solve_halfline_explicit, solve_penalized, solve_projected, HolderMethod, SubstepPolicy,
};
use rgsde_core::uncertainty::{
    gheat_solve_1d, qv_bound_defect, sample_scenario, simulate, simulate_b, upper_expectation_over, FeedbackTable,
    GHeatConfig, GPathBundle, Policy, Scenario, VolSet,
};
use rgsde_core::rng::{CounterRng, Stream};
use rgsde_core::{Domain, Grid, Path, PenaltyField, Point};

type Outcome = (bool, String);

fn sci(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| format!("{x:.2e}")).collect::<Vec<_>>().join(", "))
}

/// `x0 + w_t + max(0, max_{s≤t} −(x0 + w_s))`, written out independently of the library.
fn reflect_half_line(x0: f64, w: &[f64]) -> Vec<f64> {
    let mut push = 0.0f64;
    w.iter()
        .map(|wt| {
            push = push.max(-(x0 + wt));
            x0 + wt + push
        })
        .collect()
}

fn shell() -> Domain<2> {
    Domain::shell(Point::zero(), 1.0, 3.0, 1.0).unwrap()
}

fn c1_half_line_oracle() -> Outcome {
    let clock = Instant::now();
    let grid = Grid::uniform(1.0, 2000).unwrap();
    let half = Domain::<1>::half_line(1.0);
    let (mut worst, mut ok) = (0.0f64, true);
    for i in 0..100 {
        let w = smooth_driver::<1>(grid, 17, i, 0.6);
        let proj = solve_projected(&half, &w, Point([0.3])).unwrap();
        let exact = solve_halfline_explicit(0.3, &w).unwrap();
        let oracle = reflect_half_line(0.3, &w.scalars());
        let gap = proj.xi.scalars().iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let map_gap = exact.xi.scalars().iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let modulus = w.max_increment();
        worst = worst.max(gap / modulus);
        ok &= gap <= 2.0 * modulus && map_gap <= 1e-12;
    }
    let secs = clock.elapsed().as_secs_f64();
    (ok && secs < 5.0, format!("100 drivers, worst gap/modulus {worst:.3e} (limit 2), {secs:.2}s (limit 5s)"))
}

fn sup_err<const D: usize>(a: &Path<D>, b: &[Point<D>]) -> f64 {
    a.values.iter().zip(b).map(|(x, y)| x.dist(y)).fold(0.0, f64::max)
}

fn c2_penalization() -> Outcome {
    let clock = Instant::now();
    let grid = Grid::uniform(1.0, 2000).unwrap();
    let ladder = [1e2, 1e3, 1e4];
    let half = Domain::<1>::half_line(1.0);
    let hf = PenaltyField::new(&half).unwrap();
    let w = sin_drift::<1>(grid);
    let oracle: Vec<Point<1>> = reflect_half_line(0.5, &w.scalars()).into_iter().map(|x| Point([x])).collect();
    let e1: Vec<f64> = ladder
        .iter()
        .map(|&m| sup_err(&solve_penalized(&hf, &w, Point([0.5]), m, SubstepPolicy::default()).unwrap().xi, &oracle))
        .collect();
    let sh = shell();
    let sf = PenaltyField::new(&sh).unwrap();
    let w2 = sin_drift::<2>(grid);
    let x0 = Point([2.0, 0.0]);
    let reference = solve_projected(&sh, &w2, x0).unwrap().xi.values;
    let e2: Vec<f64> = ladder
        .iter()
        .map(|&m| sup_err(&solve_penalized(&sf, &w2, x0, m, SubstepPolicy::default()).unwrap().xi, &reference))
        .collect();
    let dec = |e: &[f64]| e.windows(2).all(|p| p[1] < p[0]);
    let secs = clock.elapsed().as_secs_f64();
    let ok = dec(&e1) && dec(&e2) && e1[2] <= 1e-2 && secs < 30.0;
    (ok, format!("half-line errors {} (last <= 1e-2), shell errors {}, {secs:.2}s (limit 30s)", sci(&e1), sci(&e2)))
}

/// 200 G-Brownian drivers under constant-high, constant-low and i.i.d. volatility in `[1, 2]`.
fn brownian_drivers(n: usize, seed: u64) -> Vec<Path<1>> {
    let gamma = VolSet::interval(1.0, 2.0).unwrap();
    let grid = Grid::uniform(1.0, 2000).unwrap();
    let fam: Vec<Scenario<1>> = [Policy::High, Policy::Low, Policy::Iid]
        .iter()
        .map(|p| sample_scenario(&gamma, grid, p, seed, 0).unwrap())
        .collect();
    (0..n).map(|p| simulate_b(&fam[p % 3], seed, p as u64)).collect()
}

#[derive(Default)]
struct Tally {
    runs: usize,
    contained: usize,
    containment_violations: usize,
    gapped: usize,
    excursion_violations: usize,
    gap_violations: usize,
    gap_checked: usize,
}

fn penalized_tally(d: &Domain<1>, drivers: &[Path<1>], exec: &PoolExecutor) -> Tally {
    use rgsde_core::exec::Executor;
    let f = PenaltyField::new(d).unwrap();
    let per = exec.map_indexed(drivers.len(), |p| {
        let w = &drivers[p];
        let stats = holder_stats(w, 0.4, HolderMethod::Exact);
        let mut t = Tally::default();
        for m in [1e2, 1e3, 1e4] {
            let sol = solve_penalized(&f, w, Point([0.5]), m, SubstepPolicy::default()).unwrap();
            let rc = reflection_constants(d, f.l(), &stats, m);
            t.runs += 1;
            if rc.containment_applies() {
                t.contained += 1;
                t.containment_violations += usize::from(containment_margin(&sol, d) > rc.eps);
            }
            if rc.gap_applies() {
                t.gapped += 1;
                t.excursion_violations += usize::from(!excursion_report(&sol, d, rc.eps).ok());
                let s = reflection_schedule(&sol, d, d.delta).unwrap();
                if let Some(g) = s.min_gap {
                    t.gap_checked += 1;
                    t.gap_violations += usize::from(g < rc.h);
                }
            }
        }
        t
    });
    per.into_iter().fold(Tally::default(), |mut a, t| {
        a.runs += t.runs;
        a.contained += t.contained;
        a.containment_violations += t.containment_violations;
        a.gapped += t.gapped;
        a.excursion_violations += t.excursion_violations;
        a.gap_violations += t.gap_violations;
        a.gap_checked += t.gap_checked;
        a
    })
}

fn c3_c4_thresholds() -> (Outcome, Outcome) {
    let exec = PoolExecutor::new(2).unwrap();
    let drivers = brownian_drivers(200, 3);
    // with the unit collar the constants never drop below r0/2; the wide
    // collar keeps the geometry and puts the thresholds within reach
    let unit = penalized_tally(&Domain::<1>::half_line(1.0), &drivers, &exec);
    let wide = penalized_tally(&Domain::<1>::half_line(1.0e6), &drivers, &exec);
    let c3 = (
        unit.containment_violations + wide.containment_violations == 0 && wide.contained > 0,
        format!(
            "containment violations {} of {} threshold runs (r0 = 1e6; {} of {} runs qualify), r0 = 1: {} of {} qualify",
            wide.containment_violations, wide.contained, wide.contained, wide.runs, unit.contained, unit.runs
        ),
    );
    let frac = wide.gapped as f64 / wide.runs as f64;
    let c4 = (
        wide.excursion_violations + wide.gap_violations + unit.excursion_violations + unit.gap_violations == 0
            && wide.gapped > 0,
        format!(
            "threshold-meeting fraction {frac:.3} (r0 = 1e6), {:.3} (r0 = 1); excursion violations {}, gap violations {} ({} runs with two or more boundary hits)",
            unit.gapped as f64 / unit.runs as f64,
            wide.excursion_violations,
            wide.gap_violations,
            wide.gap_checked
        ),
    );
    (c3, c4)
}

fn c5_g_expectation() -> Outcome {
    let clock = Instant::now();
    let exec = PoolExecutor::new(2).unwrap();
    let gamma = VolSet::interval(1.0, 2.0).unwrap();
    let mc = Grid::uniform(1.0, 50).unwrap();
    let cfg = GHeatConfig { feedback_grid: Some(mc), richardson: true, ..GHeatConfig::new(0.02) };
    let phis: [(&str, fn(f64) -> f64, Option<f64>); 4] =
        [("x", |x| x, Some(0.0)), ("x2", |x| x * x, Some(4.0)), ("-x2", |x| -x * x, Some(-1.0)), ("abs", f64::abs, None)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, phi, exact) in phis {
        let sol = gheat_solve_1d(&gamma, &phi, 1.0, &cfg).unwrap();
        let s = sample_scenario(&gamma, mc, &Policy::Feedback(sol.feedback.clone().unwrap()), 11, 0).unwrap();
        let rep = upper_expectation_over(&|p: &Path<1>| phi(p.last()[0]), &[s], 10_000, 11, &exec);
        let tol = 2.0 * (rep.stderr + sol.fd_error.unwrap());
        let diff = (sol.value - rep.value).abs();
        ok &= diff <= tol;
        if let Some(v) = exact {
            ok &= (sol.value - v).abs() <= tol && (rep.value - v).abs() <= tol;
        }
        parts.push(format!("{name}: pde {:.4} mc {:.4} diff {diff:.3e} tol {tol:.3e}", sol.value, rep.value));
    }
    let secs = clock.elapsed().as_secs_f64();
    (ok && secs < 60.0, format!("{}; {secs:.2}s (limit 60s)", parts.join("; ")))
}

fn qv_worst<const D: usize>(policies: &[Policy<D>], n: usize) -> f64 {
    let gamma = VolSet::diag_box([1.0; D], [2.0; D]).unwrap();
    let grid = Grid::uniform(1.0, 100).unwrap();
    let mut rng = CounterRng::new(6, Stream::Sampling(7));
    let mut worst = f64::NEG_INFINITY;
    for i in 0..n {
        let s = sample_scenario(&gamma, grid, &policies[i % policies.len()], 6, i as u64).unwrap();
        let b = simulate(&s, 6, i as u64);
        for a in [rng.unit_vector::<D>(), Point::unit(0), Point::unit(D - 1)] {
            worst = worst.max(qv_bound_defect(&b, &gamma, &a).unwrap().defect);
        }
    }
    worst
}

fn c6_qv() -> Outcome {
    let checker = FeedbackTable {
        x_min: -5.0,
        dx: 0.5,
        convex: (0..100).map(|k| (0..21).map(|i| (i + k) % 3 != 0).collect()).collect(),
    };
    let p1 = vec![
        Policy::High,
        Policy::Low,
        Policy::Iid,
        Policy::Constant(rgsde_core::Mat([[1.5]])),
        Policy::BangBangTime { switch_time: 0.5, high_first: false },
        Policy::BangBangState { direction: Point([1.0]), threshold: 0.0 },
        Policy::Feedback(checker),
    ];
    let p2 = vec![
        Policy::High,
        Policy::Low,
        Policy::Iid,
        Policy::BangBangTime { switch_time: 0.3, high_first: true },
        Policy::BangBangState { direction: Point([0.6, 0.8]), threshold: 0.1 },
    ];
    let (w1, w2) = (qv_worst::<1>(&p1, 1000), qv_worst::<2>(&p2, 1000));
    (w1 <= 1e-12 && w2 <= 1e-12, format!("max defect d=1 {w1:.2e}, d=2 {w2:.2e} over 1000 scenarios each (limit 1e-12)"))
}

fn bundles<const D: usize>(paths: usize, n: usize, seed: u64) -> Vec<GPathBundle<D>> {
    let gamma = VolSet::diag_box([1.0; D], [2.0; D]).unwrap();
    let grid = Grid::uniform(1.0, n).unwrap();
    let fam: Vec<Scenario<D>> = [Policy::High, Policy::Low, Policy::Iid, Policy::Iid]
        .iter()
        .enumerate()
        .map(|(i, p)| sample_scenario(&gamma, grid, p, seed, i as u64).unwrap())
        .collect();
    simulate_batch(&fam, paths, seed, &Sequential)
}

fn ladder_check<const D: usize>(d: &Domain<D>, x0: Point<D>, seed: u64, exec: &PoolExecutor) -> (bool, String) {
    let f = PenaltyField::new(d).unwrap();
    let b = bundles::<D>(200, 1000, seed);
    let cfg = ConvergenceConfig {
        field: &f,
        m_ladder: &[1e2, 1e3, 1e4],
        coeffs: None,
        x0,
        alpha: 0.4,
        holder: HolderMethod::Dyadic,
        policy: SubstepPolicy::default(),
    };
    let rows = convergence_study(&cfg, &b, exec).unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| r.mean_sq_err).collect();
    let m4: Vec<f64> = rows.iter().map(|r| r.moment4).collect();
    let spread = m4.iter().copied().fold(0.0, f64::max) / m4.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = errs.windows(2).all(|w| w[1] < w[0]) && spread < 2.0;
    (ok, format!("errors {}, moment spread {spread:.3}", sci(&errs)))
}

fn c7_rgbm() -> Outcome {
    let clock = Instant::now();
    let exec = PoolExecutor::new(2).unwrap();
    let (a, sa) = ladder_check(&Domain::<1>::half_line(1.0), Point([0.5]), 5, &exec);
    let (b, sb) = ladder_check(&shell(), Point([2.0, 0.0]), 5, &exec);
    let secs = clock.elapsed().as_secs_f64();
    (a && b && secs < 300.0, format!("half-line {sa}; shell {sb}; {secs:.1}s (limit 300s)"))
}

fn picard_check<const D: usize>(d: &Domain<D>, x0: Point<D>, exec: &PoolExecutor) -> (bool, String) {
    let b = bundles::<D>(200, 1000, 5);
    let r = Reflector::Projected(d);
    let cfg = PicardConfig { tol: 1e-6, max_iter: 8, init: PicardInit::Start };
    let trig = Builtin::<D>::trig();
    let a = picard_solve(&trig, &r, &b, x0, &cfg, exec);
    let c = picard_solve(&trig, &r, &b, x0, &PicardConfig { init: PicardInit::ReflectedB, ..cfg }, exec);
    let (a, c) = match (a, c) {
        (Ok(a), Ok(c)) => (a, c),
        (a, c) => return (false, format!("no convergence: {:?} / {:?}", a.err(), c.err())),
    };
    let ratio = a.trace.ratios().into_iter().skip(1).fold(0.0, f64::max);
    let gap = a.solutions.iter().zip(&c.solutions).map(|(p, q)| p.x().sup_dist(q.x()).powi(2)).sum::<f64>() / b.len() as f64;
    let ok = a.trace.converged && a.trace.k_stop <= 8 && ratio <= 0.7 && gap <= 10.0 * cfg.tol;
    (ok, format!("{} iterations, max ratio after 2 {ratio:.3}, start-vs-reflected gap {gap:.2e}", a.trace.k_stop))
}

fn c8_picard() -> Outcome {
    let exec = PoolExecutor::new(2).unwrap();
    let (a, sa) = picard_check(&Domain::<1>::half_line(1.0), Point([0.5]), &exec);
    let (b, sb) = picard_check(&shell(), Point([2.0, 0.0]), &exec);
    (a && b, format!("half-line {sa}; shell {sb}"))
}

fn c9_stability() -> Outcome {
    let exec = PoolExecutor::new(2).unwrap();
    let half = Domain::<1>::half_line(1.0);
    let r = Reflector::Projected(&half);
    let b = bundles::<1>(100, 500, 8);
    let cfg = PicardConfig { tol: 1e-12, max_iter: 30, init: PicardInit::Start };
    let base = picard_solve(&Builtin::trig(), &r, &b, Point([0.5]), &cfg, &exec).unwrap().solutions;
    let eps = [0.1, 0.05, 0.025];
    let gaps: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let c = Builtin::perturbed(Builtin::trig(), Point([e]));
            let s = picard_solve(&c, &r, &b, Point([0.5]), &cfg, &exec).unwrap().solutions;
            stability_gap(&base, &s, CoeffDeltas { f_hat: e, g_hat: 0.0 }).unwrap().x_gap4
        })
        .collect();
    let slope = loglog_slope(&eps, &gaps).unwrap();
    ((slope - 4.0).abs() <= 0.5, format!("slope {slope:.3} (target 4 ± 0.5), gaps {}", sci(&gaps)))
}

fn configs() -> Vec<PathBuf> {
    let dir = FsPath::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut v: Vec<PathBuf> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|x| x == "toml")).collect();
    v.sort();
    v
}

fn csvs(dir: &FsPath) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn c10_determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let mut bad = Vec::new();
    let cfgs = configs();
    for cfg in &cfgs {
        let text = std::fs::read_to_string(cfg).unwrap();
        let exp = text.lines().find_map(|l| l.strip_prefix("experiment = ")).unwrap().trim_matches('"').to_string();
        let stem = cfg.file_stem().unwrap().to_string_lossy().into_owned();
        let mut outs = Vec::new();
        for workers in [1, 3] {
            let out = tmp.path().join(format!("{stem}-{workers}"));
            let status = Command::new(env!("CARGO_BIN_EXE_rgsde"))
                .args([exp.as_str(), "--config"])
                .arg(cfg)
                .args(["--workers", &workers.to_string(), "--out"])
                .arg(&out)
                .status()
                .unwrap();
            if !status.success() {
                bad.push(format!("{stem} exited {status}"));
            }
            outs.push(csvs(&out));
        }
        if outs[0].is_empty() || outs[0] != outs[1] {
            bad.push(format!("{stem} differs between 1 and 3 workers"));
        }
    }
    (bad.is_empty(), if bad.is_empty() { format!("{} configs byte-identical at 1 and 3 workers", cfgs.len()) } else { bad.join("; ") })
}

fn main() {
    let clock = Instant::now();
    let (c3, c4) = c3_c4_thresholds();
    let results: Vec<(&str, Outcome)> = vec![
        ("half-line oracle agreement", c1_half_line_oracle()),
        ("penalization convergence", c2_penalization()),
        ("penalized containment", c3),
        ("excursions and reflection gaps", c4),
        ("G-expectation cross-check", c5_g_expectation()),
        ("quadratic-variation bound", c6_qv()),
        ("reflected G-Brownian motion convergence", c7_rgbm()),
        ("Picard solver", c8_picard()),
        ("stability scaling", c9_stability()),
        ("determinism across worker counts", c10_determinism()),
    ];
    let mut failed = 0;
    for (i, (name, (ok, detail))) in results.iter().enumerate() {
        failed += usize::from(!ok);
        println!("criterion {:>2} {} {name}: {detail}", i + 1, if *ok { "PASS" } else { "FAIL" });
    }
    println!("acceptance: {} passed, {failed} failed in {:.1}s", results.len() - failed, clock.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
