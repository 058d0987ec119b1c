use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rgsde_cli::{gallery, run, Experiment, RunOptions};

#[derive(Parser)]
#[command(name = "rgsde", version, about = "Reflected G-SDE experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sampling checks of the domain conditions and the penalty constants.
    VerifyDomain(Common),
    /// Deterministic Skorokhod problems: penalized against projected/explicit.
    Skorokhod(Common),
    /// G-expectation cross-check and the quadratic-variation bound.
    Gbm(Common),
    /// Reflected G-Brownian motion and reflected G-SDEs.
    Rgsde(Common),
    /// Work counts and timings of the solvers.
    Bench(Common),
    /// Print a built-in gallery: domains, coefficients or policies.
    List { kind: String },
}

#[derive(Args)]
struct Common {
    /// Config file (also accepted as --config).
    #[arg(value_name = "CONFIG")]
    config_pos: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dotted override such as `solver.m_ladder=[100,1000]`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output directory; falls back to RGSDE_OUT, then `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the headline numbers as JSON on stdout.
    #[arg(long)]
    json_summary: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (exp, c) = match cli.command {
        Command::List { kind } => {
            return match gallery::render(&kind) {
                Ok(text) => {
                    print!("{text}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            };
        }
        Command::VerifyDomain(c) => (Experiment::VerifyDomain, c),
        Command::Skorokhod(c) => (Experiment::Skorokhod, c),
        Command::Gbm(c) => (Experiment::Gbm, c),
        Command::Rgsde(c) => (Experiment::Rgsde, c),
        Command::Bench(c) => (Experiment::Bench, c),
    };
    let opts = RunOptions { config: c.config.or(c.config_pos), overrides: c.set, seed: c.seed, workers: c.workers, out: c.out };
    let outcome = run(exp, &opts);
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    if c.json_summary {
        println!("{}", serde_json::to_string(&outcome.summary).unwrap_or_default());
    }
    if let Some(dir) = &outcome.out_dir {
        log::info!("artifacts in {}", dir.display());
    }
    ExitCode::from(outcome.exit_code as u8)
}
