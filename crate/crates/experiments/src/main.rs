use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use lwf_experiments::runner::with_threads;
use lwf_experiments::{Command, Config, HarnessError};

#[derive(Parser)]
#[command(
    name = "lwf",
    version,
    about = "Lambda-Wright-Fisher simulations and verification experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Simulate the discrete population model
    SimulateDiscrete(RunArgs),
    /// Simulate the limit jump-diffusion
    SimulateSde(RunArgs),
    /// Simulate the ancestral block-counting process
    Ancestral(RunArgs),
    /// Discrete-to-SDE convergence in law
    Convergence(RunArgs),
    /// Fixation probabilities against the ancestral prediction
    Fixation(RunArgs),
    /// Moment duality between the SDE and the ancestral process
    Duality(RunArgs),
    /// Trend of E[ln(X1 X2 X3)] under rock-paper-scissors selection
    RpsLyapunov(RunArgs),
    /// Alleles go extinct one at a time
    SuccessiveExtinction(RunArgs),
    /// Empirical one-generation drift against the closed forms
    DriftOracle(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file
    #[arg(long)]
    config: PathBuf,
    /// Overrides experiment.seed
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides experiment.replicates
    #[arg(long)]
    replicates: Option<usize>,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (defaults to all cores)
    #[arg(long)]
    threads: Option<usize>,
}

impl Sub {
    fn split(self) -> (Command, RunArgs) {
        match self {
            Sub::SimulateDiscrete(a) => (Command::SimulateDiscrete, a),
            Sub::SimulateSde(a) => (Command::SimulateSde, a),
            Sub::Ancestral(a) => (Command::Ancestral, a),
            Sub::Convergence(a) => (Command::Convergence, a),
            Sub::Fixation(a) => (Command::Fixation, a),
            Sub::Duality(a) => (Command::Duality, a),
            Sub::RpsLyapunov(a) => (Command::RpsLyapunov, a),
            Sub::SuccessiveExtinction(a) => (Command::SuccessiveExtinction, a),
            Sub::DriftOracle(a) => (Command::DriftOracle, a),
        }
    }
}

fn run(command: Command, args: RunArgs) -> anyhow::Result<bool> {
    let mut cfg = Config::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.experiment.seed = seed;
    }
    if let Some(r) = args.replicates {
        cfg.experiment.replicates = r;
    }
    cfg.validate()?;
    if args.threads == Some(0) {
        return Err(HarnessError::Config("--threads must be >= 1".into()).into());
    }
    let start = Instant::now();
    let out = with_threads(args.threads, || command.run(&cfg))?;
    let elapsed = start.elapsed().as_secs_f64();

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    fs::write(args.out.join("report.json"), out.report.to_json()).context("writing report.json")?;
    if let Some(csv) = &out.csv {
        fs::write(args.out.join("trajectories.csv"), csv).context("writing trajectories.csv")?;
    }
    let timing = serde_json::json!({
        "subcommand": command.name(),
        "wall_clock_seconds": elapsed,
        "threads": args.threads.unwrap_or_else(rayon::current_num_threads),
    });
    fs::write(args.out.join("timing.json"), format!("{timing:#}\n"))
        .context("writing timing.json")?;

    for c in &out.report.checks {
        println!(
            "{} {} (observed {}, {})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.observed,
            c.tolerance
        );
    }
    for n in &out.report.notes {
        println!("note: {n}");
    }
    println!(
        "{} {} in {elapsed:.2}s",
        command,
        if out.report.passed {
            "passed"
        } else {
            "failed"
        }
    );
    Ok(out.report.passed)
}

fn main() -> ExitCode {
    let (command, args) = Cli::parse().command.split();
    match run(command, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e
                .downcast_ref::<HarnessError>()
                .is_some_and(HarnessError::is_config);
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}
