//! Points of the face `x_1 + ... + x_K = 1` of the K-simplex.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Frequency vector over `K >= 2` allele types.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SimplexPoint<T> {
    freqs: Vec<T>,
}

impl<T: Scalar> SimplexPoint<T> {
    /// Validates coordinates in `[0, 1]` summing to one.
    ///
    /// Coordinates within the scalar tolerance of the bounds are snapped onto them.
    pub fn new(mut freqs: Vec<T>) -> Result<Self> {
        let tol = T::simplex_tol();
        if freqs.len() < 2 {
            return Err(Error::InvalidSimplex(format!(
                "need at least 2 types, got {}",
                freqs.len()
            )));
        }
        let mut sum = T::zero();
        for (i, v) in freqs.iter_mut().enumerate() {
            if !v.is_finite() || *v < -tol || *v > T::one() + tol {
                return Err(Error::InvalidSimplex(format!("coordinate {i} = {v}")));
            }
            *v = v.max(T::zero()).min(T::one());
            sum += *v;
        }
        if (sum - T::one()).abs() > tol {
            return Err(Error::InvalidSimplex(format!("coordinates sum to {sum}")));
        }
        Ok(Self { freqs })
    }

    /// Normalizes nonnegative weights onto the simplex.
    pub fn from_weights(weights: Vec<T>) -> Result<Self> {
        let sum = weights.iter().fold(T::zero(), |a, &b| a + b);
        if weights.iter().any(|w| !w.is_finite() || *w < T::zero()) || sum <= T::zero() {
            return Err(Error::InvalidSimplex(
                "weights must be nonnegative with positive sum".into(),
            ));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn vertex(k: usize, i: usize) -> Result<Self> {
        if i >= k {
            return Err(Error::InvalidSimplex(format!(
                "vertex {i} out of range for K = {k}"
            )));
        }
        let mut freqs = vec![T::zero(); k];
        freqs[i] = T::one();
        Self::new(freqs)
    }

    pub fn uniform(k: usize) -> Result<Self> {
        Self::new(vec![T::one() / T::from_count(k.max(1)); k])
    }

    /// Clamps negative coordinates to zero and renormalizes.
    pub fn project(mut raw: Vec<T>) -> Result<Self> {
        project_in_place(&mut raw)?;
        Ok(Self { freqs: raw })
    }

    /// Wraps a vector already known to lie on the simplex.
    pub(crate) fn from_vec_unchecked(freqs: Vec<T>) -> Self {
        debug_assert!(Self::new(freqs.clone()).is_ok(), "{freqs:?}");
        Self { freqs }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.freqs.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.freqs
    }

    #[inline]
    pub fn get(&self, i: usize) -> T {
        self.freqs[i]
    }

    pub fn into_vec(self) -> Vec<T> {
        self.freqs
    }

    /// `x_1 + ... + x_m` (the first `m` coordinates).
    pub fn prefix_sum(&self, m: usize) -> T {
        self.freqs[..m].iter().fold(T::zero(), |a, &b| a + b)
    }

    /// Indices of alleles with positive frequency.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.freqs
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > T::zero())
            .map(|(i, _)| i)
    }

    /// The allele that has fixed, if the point is a vertex.
    pub fn fixed_allele(&self) -> Option<usize> {
        let mut it = self.support();
        match (it.next(), it.next()) {
            (Some(i), None) => Some(i),
            _ => None,
        }
    }

    /// Largest label present.
    pub fn max_present_label(&self) -> usize {
        self.support()
            .last()
            .expect("simplex point has nonempty support")
    }

    /// Moves coordinate `i` to position `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                got: perm.len(),
            });
        }
        let mut out = vec![T::zero(); self.k()];
        let mut seen = vec![false; self.k()];
        for (i, &p) in perm.iter().enumerate() {
            if p >= self.k() || seen[p] {
                return Err(Error::InvalidParameter(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
            out[p] = self.freqs[i];
        }
        Ok(Self { freqs: out })
    }
}

impl SimplexPoint<f64> {
    /// Largest-remainder apportionment of `n` individuals.
    pub fn round_to_counts(&self, n: u64) -> Vec<u64> {
        let nf = n as f64;
        let mut counts: Vec<u64> = self.freqs.iter().map(|x| (x * nf).floor() as u64).collect();
        let assigned: u64 = counts.iter().sum();
        let mut order: Vec<usize> = (0..self.k()).collect();
        let rem = |i: usize| self.freqs[i] * nf - (self.freqs[i] * nf).floor();
        // stable: ties go to the lower label
        order.sort_by(|&a, &b| rem(b).partial_cmp(&rem(a)).unwrap().then(a.cmp(&b)));
        for &i in order.iter().take(n.saturating_sub(assigned) as usize) {
            counts[i] += 1;
        }
        counts
    }

    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::InvalidSimplex("all counts are zero".into()));
        }
        Self::new(counts.iter().map(|&c| c as f64 / n as f64).collect())
    }
}

/// In-place version of [`SimplexPoint::project`].
pub fn project_in_place<T: Scalar>(raw: &mut [T]) -> Result<()> {
    let mut sum = T::zero();
    for v in raw.iter_mut() {
        if !v.is_finite() {
            return Err(Error::InvalidSimplex("non-finite coordinate".into()));
        }
        if *v < T::zero() {
            *v = T::zero();
        }
        sum += *v;
    }
    if sum <= T::zero() {
        return Err(Error::InvalidSimplex(
            "projection of a nonpositive vector".into(),
        ));
    }
    for v in raw.iter_mut() {
        *v = (*v / sum).min(T::one());
    }
    Ok(())
}
