//! Experiment harness for the Λ-Wright-Fisher toolkit: configuration, deterministic
//! parallel replicates, and statistical checks with declared tolerances.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod runner;

use std::fmt;
use std::str::FromStr;

pub use config::Config;
pub use error::{HarnessError, Result};
pub use experiments::RunOutput;
pub use report::{Check, ExperimentReport, Provenance};

/// The `lwf` subcommands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    SimulateDiscrete,
    SimulateSde,
    Ancestral,
    Convergence,
    Fixation,
    Duality,
    RpsLyapunov,
    SuccessiveExtinction,
    DriftOracle,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::SimulateDiscrete,
        Command::SimulateSde,
        Command::Ancestral,
        Command::Convergence,
        Command::Fixation,
        Command::Duality,
        Command::RpsLyapunov,
        Command::SuccessiveExtinction,
        Command::DriftOracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::SimulateDiscrete => "simulate-discrete",
            Command::SimulateSde => "simulate-sde",
            Command::Ancestral => "ancestral",
            Command::Convergence => "convergence",
            Command::Fixation => "fixation",
            Command::Duality => "duality",
            Command::RpsLyapunov => "rps-lyapunov",
            Command::SuccessiveExtinction => "successive-extinction",
            Command::DriftOracle => "drift-oracle",
        }
    }

    pub fn run(self, cfg: &Config) -> Result<RunOutput> {
        use experiments::*;
        match self {
            Command::SimulateDiscrete => run_simulate_discrete(cfg),
            Command::SimulateSde => run_simulate_sde(cfg),
            Command::Ancestral => run_ancestral(cfg),
            Command::Convergence => run_convergence(cfg),
            Command::Fixation => run_fixation(cfg),
            Command::Duality => run_duality(cfg),
            Command::RpsLyapunov => run_rps_lyapunov(cfg),
            Command::SuccessiveExtinction => run_successive_extinction(cfg),
            Command::DriftOracle => run_drift_oracle(cfg),
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown subcommand `{s}`")))
    }
}
