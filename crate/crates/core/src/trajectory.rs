//! Recorded paths and their CSV export.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::simplex::SimplexPoint;

/// States with matching times (generation indices or rescaled time).
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<SimplexPoint<f64>>,
}

impl Trajectory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, x: SimplexPoint<f64>) {
        self.times.push(t);
        self.states.push(x);
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[SimplexPoint<f64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<&SimplexPoint<f64>> {
        self.states.last()
    }
}

/// Writes `t,x_1,...,x_K,replicate` rows, one per recorded state.
pub fn write_trajectories_csv<W: Write>(out: W, paths: &[(u64, &Trajectory)]) -> Result<()> {
    let k = paths
        .iter()
        .find_map(|(_, t)| t.states.first().map(|s| s.k()))
        .unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=k).map(|i| format!("x_{i}")));
    header.push("replicate".into());
    w.write_record(&header)?;
    for (rep, traj) in paths {
        for (t, s) in traj.times.iter().zip(&traj.states) {
            if s.k() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: s.k(),
                });
            }
            let mut row = vec![t.to_string()];
            row.extend(s.as_slice().iter().map(|v| v.to_string()));
            row.push(rep.to_string());
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Piecewise-constant path of the ancestral block count.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AncestralPath {
    pub times: Vec<f64>,
    pub states: Vec<u64>,
}

impl AncestralPath {
    /// State at time `t` (the last jump at or before `t`).
    pub fn state_at(&self, t: f64) -> u64 {
        let i = self.times.partition_point(|&s| s <= t);
        self.states[i.saturating_sub(1)]
    }
}

/// Writes `t,n,replicate` rows.
pub fn write_ancestral_csv<W: Write>(out: W, paths: &[(u64, &AncestralPath)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "n", "replicate"])?;
    for (rep, p) in paths {
        for (t, n) in p.times.iter().zip(&p.states) {
            w.write_record([t.to_string(), n.to_string(), rep.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
