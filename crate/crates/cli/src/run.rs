//! Orchestration: config, executor, experiment, artifacts, exit code.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::Value;

use crate::config::{self, ExperimentConfig};
use crate::error::RunError;
use crate::exec::PoolExecutor;
use crate::experiments::{self, Report};
use crate::output::{self, Failure, Manifest, OutputFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    VerifyDomain,
    Skorokhod,
    Gbm,
    Rgsde,
    Bench,
}

impl Experiment {
    pub const ALL: [Experiment; 5] =
        [Experiment::VerifyDomain, Experiment::Skorokhod, Experiment::Gbm, Experiment::Rgsde, Experiment::Bench];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::VerifyDomain => "verify-domain",
            Experiment::Skorokhod => "skorokhod",
            Experiment::Gbm => "gbm",
            Experiment::Rgsde => "rgsde",
            Experiment::Bench => "bench",
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub seed: Option<u64>,
    pub workers: usize,
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub out_dir: Option<PathBuf>,
    pub summary: Value,
    pub error: Option<RunError>,
}

macro_rules! by_dim {
    ($dim:expr, $f:ident, $($arg:expr),*) => {
        match $dim {
            1 => experiments::$f::<1, _>($($arg),*),
            2 => experiments::$f::<2, _>($($arg),*),
            3 => experiments::$f::<3, _>($($arg),*),
            d => Err(RunError::validation("domain.dim", format!("unsupported dimension {d}"))),
        }
    };
}

fn resolve(exp: Experiment, opts: &RunOptions) -> Result<ExperimentConfig, RunError> {
    let path = opts.config.as_deref().ok_or_else(|| RunError::validation("--config", "a config file is required"))?;
    let mut overrides = opts.overrides.clone();
    if let Some(s) = opts.seed {
        overrides.push(format!("seed={s}"));
    }
    let cfg = config::load(Some(path), &overrides)?;
    if let Some(e) = &cfg.experiment {
        if e != exp.name() {
            return Err(RunError::validation("experiment", format!("config is for `{e}`, not `{}`", exp.name())));
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dispatch(exp: Experiment, cfg: &ExperimentConfig, exec: &PoolExecutor) -> Result<Report, RunError> {
    let dim = cfg.domain.dim;
    match exp {
        Experiment::VerifyDomain => match dim {
            1 => experiments::verify_domain::<1>(cfg),
            2 => experiments::verify_domain::<2>(cfg),
            3 => experiments::verify_domain::<3>(cfg),
            d => Err(RunError::validation("domain.dim", format!("unsupported dimension {d}"))),
        },
        Experiment::Skorokhod => by_dim!(dim, skorokhod, cfg, exec),
        Experiment::Gbm => experiments::gbm(cfg, exec),
        Experiment::Rgsde => by_dim!(dim, rgsde, cfg, exec),
        Experiment::Bench => by_dim!(dim, bench, cfg, exec),
    }
}

fn out_dir(exp: Experiment, cfg: &ExperimentConfig, opts: &RunOptions) -> PathBuf {
    opts.out
        .clone()
        .or_else(|| std::env::var_os("RGSDE_OUT").map(PathBuf::from))
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(exp.name()))
}

fn failure(e: &RunError) -> Failure {
    let (kind, seed, path) = match e {
        RunError::Validation { .. } => ("validation", None, None),
        RunError::Numerical { seed, path, .. } => ("numerical", Some(*seed), *path),
        RunError::Io(_) => ("io", None, None),
    };
    Failure { kind, message: e.to_string(), seed, path }
}

#[allow(clippy::too_many_arguments)]
fn finish(
    dir: &Path,
    exp: Experiment,
    cfg: &ExperimentConfig,
    workers: usize,
    wall: f64,
    outputs: Vec<OutputFile>,
    err: Option<&RunError>,
    summary: &Value,
) -> Result<(), RunError> {
    let echo = cfg.echo();
    std::fs::write(dir.join("config.toml"), &echo)?;
    let manifest = Manifest {
        tool: "rgsde",
        version: output::version_string(),
        experiment: exp.name().into(),
        seed: cfg.seed,
        workers,
        config_sha256: output::sha256_hex(echo.as_bytes()),
        config: echo,
        wall_time_s: wall,
        status: if err.is_some() { "failed" } else { "ok" },
        outputs,
        failure: err.map(failure),
        summary: summary.clone(),
    };
    output::write_manifest(dir, &manifest)
}

/// Runs one experiment. Validation problems exit 2 before anything is
/// computed; numerical failures exit 3 with the failing seed and path in the
/// manifest.
pub fn run(exp: Experiment, opts: &RunOptions) -> RunOutcome {
    let bail = |e: RunError, dir: Option<PathBuf>| RunOutcome { exit_code: e.exit_code(), out_dir: dir, summary: Value::Null, error: Some(e) };
    let cfg = match resolve(exp, opts) {
        Ok(c) => c,
        Err(e) => return bail(e, None),
    };
    let dir = out_dir(exp, &cfg, opts);
    if let Err(e) = std::fs::create_dir_all(&dir) {
        return bail(RunError::Io(format!("cannot create {}: {e}", dir.display())), None);
    }
    let exec = match PoolExecutor::new(opts.workers) {
        Ok(x) => x,
        Err(e) => return bail(RunError::validation("--workers", e), Some(dir)),
    };
    log::info!("{} with seed {} on {} worker(s), output in {}", exp.name(), cfg.seed, exec.workers(), dir.display());
    let clock = Instant::now();
    let result = dispatch(exp, &cfg, &exec);
    let wall = clock.elapsed().as_secs_f64();
    let clamps = rgsde_core::rgsde::clamp_events();
    if clamps > 0 {
        log::warn!("{clamps} coefficient evaluation(s) were clamped to the declared bound");
    }
    let (outputs, summary, err) = match result {
        Ok(report) => {
            let summary = Value::Object(report.summary);
            match output::write_tables(&dir, &report.tables) {
                Ok(files) => (files, summary, None),
                Err(e) => (Vec::new(), summary, Some(e)),
            }
        }
        Err(e) => (Vec::new(), Value::Null, Some(e)),
    };
    let written = finish(&dir, exp, &cfg, exec.workers(), wall, outputs, err.as_ref(), &summary).and_then(|_| {
        let text = serde_json::to_string_pretty(&summary).map_err(|e| RunError::Io(e.to_string()))?;
        std::fs::write(dir.join("summary.json"), text + "\n").map_err(RunError::from)
    });
    let err = err.or(written.err());
    RunOutcome { exit_code: err.as_ref().map_or(0, RunError::exit_code), out_dir: Some(dir), summary, error: err }
}
