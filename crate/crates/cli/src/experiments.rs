//! The five experiment kinds. Each returns its CSV tables and a JSON summary;
//! nothing here touches the filesystem.

use std::time::Instant;

use serde_json::{json, Map, Value};

use rgsde_core::exec::Executor;
use rgsde_core::geometry::{check_condition_c, verify_condition_a, verify_condition_b, Face};
use rgsde_core::rgsde::{
    convergence_study, direct_euler_reflect, loglog_slope, penalized_batch, picard_solve, reflect_batch,
    reflect_path, simulate_batch, stability_gap, Builtin, CoeffDeltas, Coefficients, ConvergenceConfig,
    PicardConfig, PicardInit, PicardOutcome, Reflector, RgsdeError, RgsdeSolution,
};
use rgsde_core::rng::{CounterRng, Stream};
use rgsde_core::skorokhod::{
    containment_margin, excursion_report, holder_stats, reflection_constants, reflection_schedule,
    solve_halfline_explicit, solve_penalized, solve_projected, Method, SkorokhodError,
};
use rgsde_core::uncertainty::{
    gheat_solve_1d, qv_bound_defect, sample_scenario, simulate, simulate_b, upper_expectation_over, GHeatConfig,
    Policy, VolSet,
};
use rgsde_core::{Domain, DomainKind, Grid, Path, PenaltyField, Point};

use crate::config::ExperimentConfig;
use crate::error::RunError;
use crate::output::{num, opt, point, Table};
use crate::setup;

/// Tables plus headline numbers.
#[derive(Debug, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub summary: Map<String, Value>,
}

fn sk_err(seed: u64, path: u64) -> impl Fn(SkorokhodError) -> RunError {
    move |e| RunError::numerical(e, seed, Some(path))
}

fn rg_err(seed: u64) -> impl Fn(RgsdeError) -> RunError {
    move |e| {
        let path = e.path();
        RunError::numerical(e, seed, path)
    }
}

fn field<const D: usize>(d: &Domain<D>) -> Result<PenaltyField<D>, RunError> {
    PenaltyField::new(d).map_err(|e| RunError::validation("domain.r0", e))
}

fn is_unit_half_line<const D: usize>(d: &Domain<D>) -> bool {
    D == 1 && matches!(d.kind, DomainKind::HalfSpace(Face { normal, offset }) if normal[0] == 1.0 && offset == 0.0)
}

fn mean(v: impl IntoIterator<Item = f64>) -> f64 {
    let (s, n) = v.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 { f64::NAN } else { s / n as f64 }
}

fn fmax(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

pub fn verify_domain<const D: usize>(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    let d = setup::domain::<D>(&cfg.domain)?;
    let v = &cfg.verify;
    let mut conditions = Table::new("conditions", &["condition", "pass", "statistic", "value", "worst_point", "points_checked"]);
    let a = verify_condition_a(&d, v.boundary_samples, cfg.seed);
    conditions.push(vec![
        "A".into(),
        a.pass.to_string(),
        "min_exterior_ball_slack".into(),
        num(a.worst_slack),
        point(&a.worst_point.0),
        a.points_checked.to_string(),
    ]);
    let b = verify_condition_b(&d, v.boundary_samples, v.cone_samples, d.delta, d.beta, cfg.seed);
    conditions.push(vec![
        "B".into(),
        b.pass.to_string(),
        "min_cone_inner_product".into(),
        num(b.worst_inner_product),
        point(&b.worst_point.0),
        b.points_checked.to_string(),
    ]);
    let c = match d.psi {
        Some(_) => {
            let c = check_condition_c(&d, v.psi_samples, cfg.seed).map_err(|e| RunError::numerical(e, cfg.seed, None))?;
            conditions.push(vec![
                "C".into(),
                c.pass.to_string(),
                "min_triple_slack".into(),
                num(c.min_slack),
                point(&c.worst_x.0),
                c.triples_checked.to_string(),
            ]);
            Some(c.pass)
        }
        None => {
            conditions.push(vec!["C".into(), "n/a".into(), "no_psi".into(), String::new(), String::new(), "0".into()]);
            None
        }
    };

    let mut constants = Table::new("constants", &["name", "value"]);
    let mut put = |k: &str, v: String| constants.push(vec![k.into(), v]);
    put("kind", d.name().into());
    put("dim", D.to_string());
    put("r0", num(d.r0));
    put("delta", num(d.delta));
    put("beta", num(d.beta));
    put("kappa", num(d.kappa));
    put("boundary_tol", num(d.boundary_tol));
    put("empty_cone_points", b.empty_cone_points.to_string());
    match PenaltyField::new(&d) {
        Ok(f) => {
            put("penalty_admissible", "true".into());
            put("c1", num(f.c1));
            put("c2", num(f.c2));
            put("two_l", num(f.lipschitz_2l));
            put("sup_grad", num(f.sup_lambda));
        }
        Err(e) => {
            put("penalty_admissible", "false".into());
            put("penalty_reason", e.to_string());
        }
    }
    let mut summary = Map::new();
    summary.insert("condition_a".into(), json!(a.pass));
    summary.insert("condition_b".into(), json!(b.pass));
    summary.insert("condition_c".into(), json!(c));
    Ok(Report { tables: vec![conditions, constants], summary })
}

/// Per-driver, per-`m` statistics of the deterministic study.
#[derive(Clone, Copy, Default)]
struct Rung {
    sup_err: f64,
    eps: f64,
    containment: f64,
    contained: bool,
    gapped: bool,
    containment_violation: bool,
    excursion_violation: bool,
    gap_violation: bool,
    tv: f64,
}

fn drivers<const D: usize, E: Executor>(cfg: &ExperimentConfig, grid: Grid, exec: &E) -> Result<Vec<Path<D>>, RunError> {
    let n = cfg.driver.count;
    match cfg.driver.kind.as_str() {
        "sin-drift" => Ok(vec![setup::sin_drift(grid)]),
        "smooth" => Ok(exec.map_indexed(n, |p| setup::smooth_driver(grid, cfg.seed, p as u64, cfg.driver.amplitude))),
        "brownian" => {
            let fam = setup::family::<D>(cfg, grid)?;
            Ok(exec.map_indexed(n, |p| simulate_b(&fam[p % fam.len()], cfg.seed, p as u64)))
        }
        other => Err(RunError::validation("driver.kind", format!("unknown driver `{other}`"))),
    }
}

fn first_coordinate<const D: usize>(w: &Path<D>) -> Path<1> {
    Path { grid: w.grid, values: w.values.iter().map(|p| Point([p[0]])).collect() }
}

pub fn skorokhod<const D: usize, E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Report, RunError> {
    let d = setup::domain::<D>(&cfg.domain)?;
    let f = field(&d)?;
    let grid = setup::grid(cfg)?;
    let x0 = setup::start(cfg, &d)?;
    let holder = setup::holder(cfg)?;
    let policy = setup::substeps(cfg);
    let ladder = &cfg.solver.m_ladder;
    let alpha = cfg.solver.alpha;
    let ws = drivers::<D, E>(cfg, grid, exec)?;
    let half = is_unit_half_line(&d);
    let seed = cfg.seed;

    let per_driver = exec.map_indexed(ws.len(), |p| -> Result<(Option<(f64, f64)>, Vec<Rung>), RunError> {
        let w = &ws[p];
        let err = sk_err(seed, p as u64);
        let projected = solve_projected(&d, w, x0).map_err(&err)?;
        let (reference, oracle): (Vec<Point<D>>, _) = if half {
            let exact = solve_halfline_explicit(x0[0], &first_coordinate(w)).map_err(&err)?;
            let gap = exact.xi.values.iter().zip(&projected.xi.values).map(|(a, b)| (a[0] - b[0]).abs()).fold(0.0, f64::max);
            let vals = exact.xi.values.iter().map(|v| {
                let mut q = Point::zero();
                q[0] = v[0];
                q
            });
            (vals.collect(), Some((gap, w.max_increment())))
        } else {
            (projected.xi.values.clone(), None)
        };
        let stats = holder_stats(w, alpha, holder);
        let mut rungs = Vec::with_capacity(ladder.len());
        for &m in ladder {
            let sol = solve_penalized(&f, w, x0, m, policy).map_err(&err)?;
            let rc = reflection_constants(&d, f.l(), &stats, m);
            let sup_err = sol.xi.values.iter().zip(&reference).map(|(a, b)| a.dist(b)).fold(0.0, f64::max);
            let containment = containment_margin(&sol, &d);
            let contained = rc.containment_applies();
            let gapped = rc.gap_applies();
            let excursion_violation = contained && !excursion_report(&sol, &d, rc.eps).ok();
            let gap_violation = gapped && {
                let s = reflection_schedule(&sol, &d, d.delta).map_err(&err)?;
                s.min_gap.is_some_and(|g| g < rc.h)
            };
            rungs.push(Rung {
                sup_err,
                eps: rc.eps,
                containment,
                contained,
                gapped,
                containment_violation: contained && containment > rc.eps,
                excursion_violation,
                gap_violation,
                tv: sol.tv_final(),
            });
        }
        Ok((oracle, rungs))
    });
    let per_driver: Vec<_> = per_driver.into_iter().collect::<Result<_, _>>()?;

    let mut conv = Table::new(
        "convergence",
        &[
            "m",
            "drivers",
            "sup_err_mean",
            "sup_err_max",
            "eps_min",
            "eps_max",
            "containment_max",
            "containment_fraction",
            "containment_violations",
            "excursion_violations",
            "threshold_fraction",
            "gap_violations",
            "tv_mean",
        ],
    );
    let n = per_driver.len();
    let count = |i: usize, pred: &dyn Fn(&Rung) -> bool| per_driver.iter().filter(|(_, r)| pred(&r[i])).count();
    let mut errs = Vec::new();
    let mut violations = 0;
    for (i, &m) in ladder.iter().enumerate() {
        let col = |g: &dyn Fn(&Rung) -> f64| per_driver.iter().map(move |(_, r)| g(&r[i])).collect::<Vec<_>>();
        let sup_err_mean = mean(col(&|r| r.sup_err));
        errs.push(sup_err_mean);
        let (cv, ev, gv) = (count(i, &|r| r.containment_violation), count(i, &|r| r.excursion_violation), count(i, &|r| r.gap_violation));
        violations += cv + ev + gv;
        conv.push(vec![
            num(m),
            n.to_string(),
            num(sup_err_mean),
            num(fmax(col(&|r| r.sup_err))),
            num(col(&|r| r.eps).into_iter().fold(f64::INFINITY, f64::min)),
            num(fmax(col(&|r| r.eps))),
            num(fmax(col(&|r| r.containment))),
            num(count(i, &|r| r.contained) as f64 / n as f64),
            cv.to_string(),
            ev.to_string(),
            num(count(i, &|r| r.gapped) as f64 / n as f64),
            gv.to_string(),
            num(mean(col(&|r| r.tv))),
        ]);
    }
    let mut tables = vec![conv];
    let mut summary = Map::new();
    summary.insert("sup_err_mean".into(), json!(errs));
    summary.insert("strictly_decreasing".into(), json!(errs.windows(2).all(|w| w[1] < w[0])));
    summary.insert("violations".into(), json!(violations));
    if half {
        let mut oracle = Table::new("oracle", &["driver", "gap", "modulus", "pass"]);
        let mut worst = 0.0f64;
        for (p, (o, _)) in per_driver.iter().enumerate() {
            let (gap, modulus) = o.expect("half-line oracle");
            worst = worst.max(gap / modulus.max(f64::MIN_POSITIVE));
            oracle.push(vec![p.to_string(), num(gap), num(modulus), (gap <= 2.0 * modulus).to_string()]);
        }
        summary.insert("oracle_worst_ratio".into(), json!(worst));
        tables.push(oracle);
    }
    Ok(Report { tables, summary })
}

const FUNCTIONALS: [&str; 4] = ["x", "x2", "-x2", "abs"];

fn functional(name: &str) -> Result<fn(f64) -> f64, RunError> {
    Ok(match name {
        "x" => |x| x,
        "x2" => |x| x * x,
        "-x2" => |x| -x * x,
        "abs" => f64::abs,
        other => return Err(RunError::validation("gbm.functionals", format!("unknown functional `{other}` (have {FUNCTIONALS:?})"))),
    })
}

fn qv_rows<const D: usize>(cfg: &ExperimentConfig, grid: Grid, table: &mut Table) -> Result<f64, RunError> {
    let gamma = setup::volset::<D>(cfg)?;
    let names: Vec<&String> = cfg.uncertainty.policies.iter().filter(|p| p.as_str() != "feedback").collect();
    let per = cfg.gbm.qv_scenarios.div_ceil(names.len().max(1));
    let mut worst_all = f64::NEG_INFINITY;
    for name in names {
        let policy = setup::policy::<D>(cfg, name)?;
        let mut rng = CounterRng::new(cfg.seed, Stream::Sampling(100 + D as u64));
        let mut worst = f64::NEG_INFINITY;
        for i in 0..per {
            let s = sample_scenario(&gamma, grid, &policy, cfg.seed, i as u64).map_err(|e| RunError::numerical(e, cfg.seed, Some(i as u64)))?;
            let bundle = simulate(&s, cfg.seed, i as u64);
            let a: Point<D> = rng.unit_vector();
            let q = qv_bound_defect(&bundle, &gamma, &a).map_err(|e| RunError::numerical(e, cfg.seed, Some(i as u64)))?;
            worst = worst.max(q.defect);
        }
        worst_all = worst_all.max(worst);
        table.push(vec![D.to_string(), name.clone(), per.to_string(), num(worst), (worst <= 1e-12).to_string()]);
    }
    Ok(worst_all)
}

pub fn gbm<E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Report, RunError> {
    let g = &cfg.gbm;
    let gamma = VolSet::interval(cfg.vol_lo(0), cfg.vol_hi(0)).map_err(|e| RunError::validation("uncertainty", e))?;
    let mc = Grid::uniform(cfg.grid.horizon, g.mc_cells.max(1)).map_err(|e| RunError::validation("gbm.mc_cells", e))?;
    let heat = GHeatConfig { feedback_grid: Some(mc), richardson: g.richardson, ..GHeatConfig::new(g.dx) };
    let mut table = Table::new(
        "gexpectation",
        &["functional", "pde", "fd_error", "mc_value", "mc_stderr", "diff", "tolerance", "pass"],
    );
    let mut summary = Map::new();
    let mut all = true;
    for name in &g.functionals {
        let phi = functional(name)?;
        let sol = gheat_solve_1d(&gamma, &phi, cfg.grid.horizon, &heat).map_err(|e| RunError::validation("gbm", e))?;
        let fb = sol.feedback.clone().expect("feedback grid was requested");
        let s = sample_scenario(&gamma, mc, &Policy::Feedback(fb), cfg.seed, 0).map_err(|e| RunError::numerical(e, cfg.seed, None))?;
        let rep = upper_expectation_over(&|p: &Path<1>| phi(p.last()[0]), &[s], cfg.uncertainty.n_paths, cfg.seed, exec);
        let fd = sol.fd_error.unwrap_or(0.0);
        let diff = (sol.value - rep.value).abs();
        let tol = 2.0 * (rep.stderr + fd);
        all &= diff <= tol;
        table.push(vec![
            name.clone(),
            num(sol.value),
            opt(sol.fd_error),
            num(rep.value),
            num(rep.stderr),
            num(diff),
            num(tol),
            (diff <= tol).to_string(),
        ]);
        summary.insert(format!("pde_{name}"), json!(sol.value));
    }
    let grid = setup::grid(cfg)?;
    let mut qv = Table::new("qv", &["dim", "policy", "scenarios", "max_defect", "pass"]);
    let mut worst = f64::NEG_INFINITY;
    for &dim in &g.qv_dims {
        worst = worst.max(match dim {
            1 => qv_rows::<1>(cfg, grid, &mut qv)?,
            2 => qv_rows::<2>(cfg, grid, &mut qv)?,
            3 => qv_rows::<3>(cfg, grid, &mut qv)?,
            _ => return Err(RunError::validation("gbm.qv_dims", "entries must be 1, 2 or 3")),
        });
    }
    summary.insert("all_within_tolerance".into(), json!(all));
    summary.insert("qv_max_defect".into(), json!(worst));
    Ok(Report { tables: vec![table, qv], summary })
}

fn picard_cfg(cfg: &ExperimentConfig, init: PicardInit) -> PicardConfig {
    PicardConfig { tol: cfg.solver.tol, max_iter: cfg.solver.max_iter, init }
}

fn init_name(i: PicardInit) -> &'static str {
    match i {
        PicardInit::Start => "start",
        PicardInit::ReflectedB => "reflected-b",
    }
}

fn paths_table<const D: usize>(sol: &RgsdeSolution<D>) -> Table {
    let mut headers = vec!["t".to_string()];
    headers.extend((1..=D).map(|i| format!("X_{i}")));
    headers.extend((1..=D).map(|i| format!("K_{i}")));
    headers.push("ktv".into());
    let h: Vec<&str> = headers.iter().map(String::as_str).collect();
    let mut t = Table::new("paths", &h);
    for (time, x, k, tv) in sol.rows() {
        let mut row = vec![num(time)];
        row.extend(x.0.iter().map(|v| num(*v)));
        row.extend(k.0.iter().map(|v| num(*v)));
        row.push(num(tv));
        t.push(row);
    }
    t
}

pub fn rgsde<const D: usize, E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Report, RunError> {
    let d = setup::domain::<D>(&cfg.domain)?;
    let grid = setup::grid(cfg)?;
    let x0 = setup::start(cfg, &d)?;
    let coeffs = setup::coefficients::<D>(&cfg.coefficients)?;
    let fam = setup::family::<D>(cfg, grid)?;
    let bundles = simulate_batch(&fam, cfg.uncertainty.n_paths, cfg.seed, exec);
    let reflector = Reflector::Projected(&d);
    let seed = cfg.seed;
    let mut report = Report::default();
    let mut first: Option<RgsdeSolution<D>> = None;
    let need_coeffs = |study: &str| -> Result<&Builtin<D>, RunError> {
        coeffs.as_ref().ok_or_else(|| RunError::validation("coefficients.name", format!("the {study} study needs a coefficient set")))
    };

    for study in &cfg.solver.studies {
        match study.as_str() {
            "convergence" => {
                let f = field(&d)?;
                let cc = ConvergenceConfig {
                    field: &f,
                    m_ladder: &cfg.solver.m_ladder,
                    coeffs: coeffs.as_ref().map(|c| c as &dyn Coefficients<D>),
                    x0,
                    alpha: cfg.solver.alpha,
                    holder: setup::holder(cfg)?,
                    policy: setup::substeps(cfg),
                };
                let rows = convergence_study(&cc, &bundles, exec).map_err(rg_err(seed))?;
                let mut t = Table::new(
                    "convergence",
                    &[
                        "m",
                        "paths",
                        "mean_sq_err",
                        "stderr",
                        "moment4",
                        "eps_p50",
                        "eps_p90",
                        "eps_max",
                        "containment_max",
                        "threshold_fraction",
                        "containment_violations",
                    ],
                );
                for r in &rows {
                    t.push(vec![
                        num(r.m),
                        bundles.len().to_string(),
                        num(r.mean_sq_err),
                        num(r.stderr),
                        num(r.moment4),
                        num(r.eps_p50),
                        num(r.eps_p90),
                        num(r.eps_max),
                        num(r.containment_max),
                        num(r.threshold_fraction),
                        r.containment_violations.to_string(),
                    ]);
                }
                let errs: Vec<f64> = rows.iter().map(|r| r.mean_sq_err).collect();
                let m4: Vec<f64> = rows.iter().map(|r| r.moment4).collect();
                let spread = fmax(m4.iter().copied()) / m4.iter().copied().fold(f64::INFINITY, f64::min);
                report.summary.insert("mean_sq_err".into(), json!(errs));
                report.summary.insert("strictly_decreasing".into(), json!(errs.windows(2).all(|w| w[1] < w[0])));
                report.summary.insert("moment4_spread".into(), json!(spread));
                report.tables.push(t);
            }
            "picard" => {
                let c = need_coeffs("picard")?;
                let init = match cfg.solver.init.as_str() {
                    "start" => PicardInit::Start,
                    "reflected-b" => PicardInit::ReflectedB,
                    other => return Err(RunError::validation("solver.init", format!("unknown iterate `{other}`"))),
                };
                let run = |i: PicardInit| -> Result<PicardOutcome<D>, RunError> {
                    picard_solve(c, &reflector, &bundles, x0, &picard_cfg(cfg, i), exec).map_err(rg_err(seed))
                };
                let a = run(init)?;
                let mut t = Table::new("picard", &["init", "iteration", "distance", "ratio"]);
                let mut push_trace = |o: &PicardOutcome<D>, i: PicardInit| {
                    let ratios = o.trace.ratios();
                    for (k, dist) in o.trace.distances.iter().enumerate() {
                        let r = if k == 0 { None } else { Some(ratios[k - 1]) };
                        t.push(vec![init_name(i).into(), (k + 1).to_string(), num(*dist), opt(r)]);
                    }
                };
                push_trace(&a, init);
                report.summary.insert("picard_iterations".into(), json!(a.trace.k_stop));
                report.summary.insert("picard_max_ratio_after_2".into(), json!(fmax(a.trace.ratios().into_iter().skip(1))));
                if cfg.solver.uniqueness {
                    let other = if init == PicardInit::Start { PicardInit::ReflectedB } else { PicardInit::Start };
                    let b = run(other)?;
                    push_trace(&b, other);
                    let gap = mean(a.solutions.iter().zip(&b.solutions).map(|(p, q)| p.x().sup_dist(q.x()).powi(2)));
                    let mut u = Table::new("uniqueness", &["init_a", "init_b", "mean_sq_gap", "bound", "pass"]);
                    let bound = 10.0 * cfg.solver.tol;
                    u.push(vec![init_name(init).into(), init_name(other).into(), num(gap), num(bound), (gap <= bound).to_string()]);
                    report.summary.insert("uniqueness_gap".into(), json!(gap));
                    report.tables.push(t);
                    report.tables.push(u);
                } else {
                    report.tables.push(t);
                }
                first = a.solutions.into_iter().next();
            }
            "stability" => {
                let c = need_coeffs("stability")?;
                let pc = picard_cfg(cfg, PicardInit::Start);
                let base = picard_solve(c, &reflector, &bundles, x0, &pc, exec).map_err(rg_err(seed))?.solutions;
                let mut t = Table::new("stability", &["eps", "x_gap4", "k_gap4", "x_sup_max", "driver_term", "ratio"]);
                let mut gaps = Vec::new();
                for &e in &cfg.solver.perturbations {
                    let shifted = Builtin::perturbed(c.clone(), Point::unit(0) * e);
                    let s = picard_solve(&shifted, &reflector, &bundles, x0, &pc, exec).map_err(rg_err(seed))?.solutions;
                    let rep = stability_gap(&base, &s, CoeffDeltas { f_hat: e.abs(), g_hat: 0.0 }).map_err(rg_err(seed))?;
                    gaps.push(rep.x_gap4);
                    t.push(vec![num(e), num(rep.x_gap4), num(rep.k_gap4), num(rep.x_sup_max), num(rep.driver_term), opt(rep.ratio)]);
                }
                let eps: Vec<f64> = cfg.solver.perturbations.iter().map(|e| e.abs()).collect();
                report.summary.insert("stability_slope".into(), json!(loglog_slope(&eps, &gaps)));
                report.tables.push(t);
            }
            other => return Err(RunError::validation("solver.studies", format!("unknown study `{other}`"))),
        }
    }
    let first = match (first, &coeffs) {
        (Some(s), _) => s,
        (None, None) => reflect_path(&reflector, &bundles[0].b, x0, Some(&bundles[0])).map_err(rg_err(seed))?,
        (None, Some(c)) => direct_euler_reflect(&d, c, &bundles[0], x0).map_err(rg_err(seed))?,
    };
    report.tables.push(paths_table(&first));
    Ok(report)
}

/// Work counts go to the CSV; wall times only to the summary.
pub fn bench<const D: usize, E: Executor>(cfg: &ExperimentConfig, exec: &E) -> Result<Report, RunError> {
    let d = setup::domain::<D>(&cfg.domain)?;
    let f = field(&d)?;
    let grid = setup::grid(cfg)?;
    let x0 = setup::start(cfg, &d)?;
    let fam = setup::family::<D>(cfg, grid)?;
    let n = cfg.bench.paths.max(1);
    let seed = cfg.seed;
    let mut t = Table::new("bench", &["method", "paths", "cells", "substeps_per_cell", "steps"]);
    let mut times = Map::new();
    let clock = Instant::now();
    let bundles = simulate_batch(&fam, n, seed, exec);
    times.insert("simulate".into(), json!(clock.elapsed().as_secs_f64()));
    t.push(vec!["simulate".into(), n.to_string(), grid.n.to_string(), "1".into(), (n * grid.n).to_string()]);
    for _ in 0..cfg.bench.repeats.saturating_sub(1) {
        simulate_batch(&fam, n, seed, exec);
    }
    let clock = Instant::now();
    for _ in 0..cfg.bench.repeats.max(1) {
        reflect_batch(&Reflector::Projected(&d), &bundles, x0, exec).map_err(rg_err(seed))?;
    }
    times.insert("projected".into(), json!(clock.elapsed().as_secs_f64() / cfg.bench.repeats.max(1) as f64));
    t.push(vec!["projected".into(), n.to_string(), grid.n.to_string(), "1".into(), (n * grid.n).to_string()]);
    for &m in &cfg.solver.m_ladder {
        let clock = Instant::now();
        let mut sols = Vec::new();
        for _ in 0..cfg.bench.repeats.max(1) {
            sols = penalized_batch(&f, None, &bundles, x0, m, setup::substeps(cfg), exec).map_err(rg_err(seed))?;
        }
        times.insert(format!("penalized_m{m}"), json!(clock.elapsed().as_secs_f64() / cfg.bench.repeats.max(1) as f64));
        let sub = match sols[0].path.method {
            Method::Penalized { substeps, .. } => substeps,
            _ => 1,
        };
        t.push(vec![format!("penalized:{m}"), n.to_string(), grid.n.to_string(), sub.to_string(), (n * grid.n * sub).to_string()]);
    }
    let mut summary = Map::new();
    summary.insert("seconds".into(), Value::Object(times));
    Ok(Report { tables: vec![t], summary })
}
