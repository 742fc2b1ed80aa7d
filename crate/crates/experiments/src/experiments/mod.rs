//! The experiments and the plain simulation subcommands.

mod convergence;
mod drift_oracle;
mod duality;
mod fixation;
mod lyapunov;
mod simulate;
mod succession;

pub use convergence::run_convergence;
pub use drift_oracle::{builtin_pairings, run_drift_oracle, Pairing};
pub use duality::run_duality;
pub use fixation::run_fixation;
pub use lyapunov::run_rps_lyapunov;
pub use simulate::{run_ancestral, run_simulate_discrete, run_simulate_sde};
pub use succession::run_successive_extinction;

use lwf_core::{paired, ColouringRule, Drift, RuleKind, SdeConfig, Simplex};

use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::report::ExperimentReport;

/// A report plus an optional CSV export.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: ExperimentReport,
    pub csv: Option<String>,
}

impl From<ExperimentReport> for RunOutput {
    fn from(report: ExperimentReport) -> Self {
        Self { report, csv: None }
    }
}

fn new_report(cfg: &Config, name: &str) -> ExperimentReport {
    let config = serde_json::to_value(cfg).expect("config serializes");
    ExperimentReport::new(name, cfg.experiment.seed, cfg.experiment.replicates, config)
}

fn x0(cfg: &Config) -> Result<Simplex> {
    Ok(Simplex::new(cfg.model.x0.clone())?)
}

fn rule(cfg: &Config) -> Result<ColouringRule> {
    let kind = cfg.rule.clone().unwrap_or(RuleKind::Neutral);
    Ok(ColouringRule::new(cfg.model.k(), kind)?)
}

/// The configured drift, or the one paired with the configured rule.
fn drift(cfg: &Config) -> Result<Drift> {
    if let Some(d) = &cfg.drift {
        d.validate(cfg.model.k())?;
        return Ok(d.clone());
    }
    let r = rule(cfg)?;
    paired(&r, cfg.model.kappa, &cfg.model.tail).ok_or_else(|| {
        HarnessError::Config(format!(
            "no closed-form drift pairs with rule `{}` and tail {:?}; give a `drift` block",
            r.name(),
            cfg.model.tail
        ))
    })
}

fn sde_config(cfg: &Config, drift: Drift) -> SdeConfig {
    let m = &cfg.model;
    SdeConfig::new(m.k(), drift, m.sigma, cfg.lambda.clone(), m.dt, m.horizon)
        .with_eps_jump(m.eps_jump)
        .with_tol_ext(m.tol_ext)
}
