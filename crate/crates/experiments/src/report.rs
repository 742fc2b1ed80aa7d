//! Experiment reports: metrics plus pass/fail checks that cite their tolerance.

use serde::Serialize;
use serde_json::Value;

/// Where a tolerance comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// A statistical threshold chosen by the harness (standard-error bands, CIs).
    Harness,
    /// A value implied by a proved statement (an exact identity or a sure event).
    Theory,
}

/// A point estimate with its uncertainty.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
    pub samples: usize,
}

/// A pass/fail judgment against a declared tolerance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub expected: f64,
    /// Human-readable acceptance rule, e.g. `|observed - expected| <= 4 SE`.
    pub tolerance: String,
    /// Half-width or bound used by the rule.
    pub bound: f64,
    pub provenance: Provenance,
}

/// Seed and stream layout needed to reproduce a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeedBlock {
    pub seed: u64,
    /// Replicate `i` of sub-run `s` uses stream `(s << 40) | i`.
    pub stream_layout: &'static str,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub seed: SeedBlock,
    pub replicates: usize,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub metrics: Vec<Metric>,
    pub notes: Vec<String>,
    /// Experiment-specific structured output.
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
    /// The configuration the report was produced from.
    pub config: Value,
}

impl ExperimentReport {
    pub fn new(experiment: &str, seed: u64, replicates: usize, config: Value) -> Self {
        Self {
            experiment: experiment.into(),
            seed: SeedBlock {
                seed,
                stream_layout: "(sub_run << 40) | replicate",
            },
            replicates,
            passed: true,
            checks: Vec::new(),
            metrics: Vec::new(),
            notes: Vec::new(),
            details: Value::Null,
            config,
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64, se: Option<f64>, samples: usize) {
        self.metrics.push(Metric {
            name: name.into(),
            value,
            se,
            samples,
        });
    }

    pub fn check(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    /// `|observed - expected| <= z * se + slack`.
    pub fn check_within(
        &mut self,
        name: impl Into<String>,
        observed: f64,
        expected: f64,
        se: f64,
        z: f64,
        slack: f64,
        provenance: Provenance,
    ) {
        let bound = z * se + slack;
        let tolerance = if slack > 0.0 {
            format!("|observed - expected| <= {z} SE + {slack}")
        } else {
            format!("|observed - expected| <= {z} SE")
        };
        self.check(Check {
            name: name.into(),
            passed: (observed - expected).abs() <= bound,
            observed,
            expected,
            tolerance,
            bound,
            provenance,
        });
    }

    /// `observed < bound`.
    pub fn check_below(
        &mut self,
        name: impl Into<String>,
        observed: f64,
        bound: f64,
        tolerance: impl Into<String>,
        provenance: Provenance,
    ) {
        self.check(Check {
            name: name.into(),
            passed: observed < bound,
            observed,
            expected: bound,
            tolerance: tolerance.into(),
            bound,
            provenance,
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
