//! Law Q_N of the number of potential parents.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `Q_N({1}) = 1 - rho`, `Q_N({k}) = rho * tail(k)` for `k >= 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffspringLaw {
    rho: f64,
    /// `(sample size, probability)`, sizes `>= 2`, sorted and distinct.
    tail: Vec<(usize, f64)>,
}

impl OffspringLaw {
    pub fn new(rho: f64, tail: Vec<(usize, f64)>) -> Result<Self> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::InvalidParameter(format!(
                "rho = {rho} outside [0, 1]"
            )));
        }
        let tail = normalize_tail(tail)?;
        Ok(Self { rho, tail })
    }

    /// `(1 - rho) δ_1 + rho δ_size`.
    pub fn two_point(rho: f64, size: usize) -> Result<Self> {
        Self::new(rho, vec![(size, 1.0)])
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn tail(&self) -> &[(usize, f64)] {
        &self.tail
    }

    /// Q_N({k}).
    pub fn prob(&self, k: usize) -> f64 {
        if k == 1 {
            return 1.0 - self.rho;
        }
        self.tail
            .iter()
            .find(|(s, _)| *s == k)
            .map_or(0.0, |(_, p)| self.rho * p)
    }

    /// Support of Q_N with probabilities, size 1 first.
    pub fn classes(&self) -> Vec<(usize, f64)> {
        let mut out = Vec::with_capacity(self.tail.len() + 1);
        if self.rho < 1.0 {
            out.push((1, 1.0 - self.rho));
        }
        if self.rho > 0.0 {
            out.extend(self.tail.iter().map(|&(k, p)| (k, self.rho * p)));
        }
        out
    }

    /// β = E[K - 1 | K > 1].
    pub fn beta(&self) -> f64 {
        tail_beta(&self.tail)
    }

    pub fn max_size(&self) -> usize {
        self.tail.last().map_or(1, |t| t.0)
    }

    /// Extra potential parents `(k - 1, prob)`, the branching increments of the dual.
    pub fn increments(&self) -> Vec<(usize, f64)> {
        self.tail.iter().map(|&(k, p)| (k - 1, p)).collect()
    }

    pub fn sample_tail<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut u: f64 = rng.random();
        for &(k, p) in &self.tail {
            if u < p {
                return k;
            }
            u -= p;
        }
        self.tail[self.tail.len() - 1].0
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        if rng.random::<f64>() < self.rho {
            self.sample_tail(rng)
        } else {
            1
        }
    }
}

/// Validates and normalizes a sample-size tail.
pub fn normalize_tail(mut tail: Vec<(usize, f64)>) -> Result<Vec<(usize, f64)>> {
    if tail.is_empty() {
        return Err(Error::InvalidParameter("empty offspring tail".into()));
    }
    tail.sort_by_key(|t| t.0);
    for w in tail.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::InvalidParameter(format!(
                "duplicate sample size {}",
                w[0].0
            )));
        }
    }
    let mut total = 0.0;
    for &(k, p) in &tail {
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "tail sample size {k} must be >= 2"
            )));
        }
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tail probability {p} invalid"
            )));
        }
        total += p;
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "tail probabilities sum to {total}"
        )));
    }
    tail.retain(|t| t.1 > 0.0);
    for t in tail.iter_mut() {
        t.1 /= total;
    }
    Ok(tail)
}

pub fn tail_beta(tail: &[(usize, f64)]) -> f64 {
    tail.iter().map(|&(k, p)| (k - 1) as f64 * p).sum()
}
