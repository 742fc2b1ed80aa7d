//! The experiment configuration document.
//!
//! A single JSON object with the top-level blocks `model`, `rule`, `drift`,
//! `lambda`, `schedule` and `experiment`. Unknown keys anywhere are rejected.

use std::path::Path;

use lwf_core::{DriftFunction, LambdaMeasure, RuleKind};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub model: ModelBlock,
    #[serde(default)]
    pub rule: Option<RuleKind>,
    #[serde(default)]
    pub drift: Option<DriftFunction<f64>>,
    #[serde(default = "zero_lambda")]
    pub lambda: LambdaMeasure,
    #[serde(default)]
    pub schedule: ScheduleBlock,
    #[serde(default)]
    pub experiment: ExperimentBlock,
}

fn zero_lambda() -> LambdaMeasure {
    LambdaMeasure::Zero
}

/// Population and integrator parameters shared by the experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelBlock {
    /// Initial frequencies; also fixes `K`.
    pub x0: Vec<f64>,
    /// Population size of the discrete model.
    pub n: u64,
    pub kappa: f64,
    pub sigma: f64,
    /// Sample-size law conditional on more than one potential parent.
    pub tail: Vec<(usize, f64)>,
    pub dt: f64,
    pub horizon: f64,
    pub eps_jump: f64,
    pub tol_ext: f64,
    pub record_every: u64,
    /// Give up on fixation after this much time.
    pub max_time: f64,
    /// Initial state of the ancestral process.
    pub n0: u64,
}

impl Default for ModelBlock {
    fn default() -> Self {
        Self {
            x0: vec![0.5, 0.5],
            n: 1000,
            kappa: 1.0,
            sigma: 1.0,
            tail: vec![(2, 1.0)],
            dt: 1e-3,
            horizon: 1.0,
            eps_jump: 1e-3,
            tol_ext: 0.0,
            record_every: 1,
            max_time: 1e3,
            n0: 1,
        }
    }
}

impl ModelBlock {
    pub fn k(&self) -> usize {
        self.x0.len()
    }
}

/// Scaling-schedule exponents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleBlock {
    pub alpha: f64,
    /// `rho_N = N^{-b}` when `sigma = 0`.
    pub b: Option<f64>,
}

impl Default for ScheduleBlock {
    fn default() -> Self {
        Self {
            alpha: 0.25,
            b: None,
        }
    }
}

/// Replicate count, seed, and the knobs of individual experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentBlock {
    pub seed: u64,
    pub replicates: usize,
    /// Population sizes of the convergence experiment.
    pub n_grid: Vec<u64>,
    /// Recorded times in the Lyapunov experiment.
    pub time_points: usize,
    /// Start `(1/3 + delta, 1/3, 1/3 - delta)` of the Lyapunov experiment.
    pub delta: f64,
    /// Duality grid.
    pub n0s: Vec<u64>,
    pub times: Vec<f64>,
    pub xs: Vec<f64>,
    /// Drift oracle: interior points per pairing and samples per point.
    pub points: usize,
    pub samples: usize,
    /// Length of the stationary run of the ancestral process, 0 to skip.
    pub stationary_time: f64,
    /// Fraction of `stationary_time` discarded as burn-in.
    pub burn_in_fraction: f64,
}

impl Default for ExperimentBlock {
    fn default() -> Self {
        Self {
            seed: 0,
            replicates: 1000,
            n_grid: vec![200, 800, 3200],
            time_points: 21,
            delta: 0.05,
            n0s: vec![1, 2, 3],
            times: vec![0.5, 1.0],
            xs: vec![0.3, 0.7],
            points: 25,
            samples: 1_000_000,
            stationary_time: 0.0,
            burn_in_fraction: 0.1,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: Value =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        let cfg: Config =
            serde_json::from_value(raw.clone()).map_err(|e| HarnessError::Config(e.to_string()))?;
        // serde ignores extra keys beside unit variants such as {"kind": "zero"};
        // anything not reproduced by the typed config is unknown
        let typed = serde_json::to_value(&cfg).map_err(|e| HarnessError::Config(e.to_string()))?;
        if let Some(path) = unknown_key(&raw, &typed, String::new()) {
            return Err(HarnessError::Config(format!("unknown key `{path}`")));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        let m = &self.model;
        if m.x0.len() < 2 {
            return bad(format!(
                "model.x0 needs at least 2 entries, got {}",
                m.x0.len()
            ));
        }
        if !(m.dt > 0.0) {
            return bad(format!("model.dt = {} must be positive", m.dt));
        }
        if !(m.horizon >= 0.0) {
            return bad(format!("model.horizon = {} must be >= 0", m.horizon));
        }
        if m.record_every == 0 {
            return bad("model.record_every must be >= 1".into());
        }
        if m.n0 == 0 {
            return bad("model.n0 must be >= 1".into());
        }
        let e = &self.experiment;
        if e.replicates == 0 {
            return bad("experiment.replicates must be >= 1".into());
        }
        if !(0.0..1.0).contains(&e.burn_in_fraction) {
            return bad(format!(
                "experiment.burn_in_fraction = {} outside [0, 1)",
                e.burn_in_fraction
            ));
        }
        Ok(())
    }
}

/// First key path present in `raw` but absent from `typed`.
fn unknown_key(raw: &Value, typed: &Value, path: String) -> Option<String> {
    match (raw, typed) {
        (Value::Object(r), Value::Object(t)) => r.iter().find_map(|(key, rv)| {
            let sub = if path.is_empty() {
                key.clone()
            } else {
                format!("{path}.{key}")
            };
            match t.get(key) {
                Some(tv) => unknown_key(rv, tv, sub),
                None if rv.is_null() => None,
                None => Some(sub),
            }
        }),
        (Value::Array(r), Value::Array(t)) => r
            .iter()
            .zip(t)
            .enumerate()
            .find_map(|(i, (rv, tv))| unknown_key(rv, tv, format!("{path}[{i}]"))),
        _ => None,
    }
}
