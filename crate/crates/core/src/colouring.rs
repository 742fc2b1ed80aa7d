//! Colouring rules: the offspring's type as a function of its potential parents' types.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bernstein::{BernsteinTable, PolynomialMap};
use crate::error::{Error, Result};
use crate::multiindex::{composition_count, compositions, multinomial_coefficient};
use crate::offspring::OffspringLaw;
use crate::simplex::SimplexPoint;

/// Samples larger than this are handled by Monte Carlo in [`offspring_type_prob`].
pub const K_MAX_EXACT: usize = 12;
/// Monte Carlo budget per sample-size class beyond [`K_MAX_EXACT`].
pub const MC_SAMPLES: usize = 1_000_000;

/// Config-level description of a rule; labels are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleKind {
    /// The offspring copies a uniformly chosen potential parent.
    Neutral,
    /// The largest label in the sample wins.
    Transitive,
    /// Transitive winner, then with probability `mutation_prob` a type drawn from
    /// row `winner` of `kernel`.
    TransitiveWithMutation {
        mutation_prob: f64,
        kernel: Vec<Vec<f64>>,
    },
    /// Pairwise contests: type `i` beats `j` with probability `p[i][j]`.
    Logistic { p: Vec<Vec<f64>> },
    /// `(winner, loser)` edges; uniform among the undominated present types.
    PartialOrder { beats: Vec<(usize, usize)> },
    /// A type of minimal count within the sample wins, ties uniform.
    NegFreqDep,
    /// A type of maximal count within the sample wins, ties uniform.
    PosFreqDep,
    /// `c_z = α_z` for samples of the table's degree; exactly one of the fields.
    Bernstein {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<BernsteinTable<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        polynomial: Option<PolynomialMap<f64>>,
    },
}

/// Multiplicity of each type among the sampled potential parents.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SampleCounts {
    counts: Vec<u32>,
    total: u32,
}

impl SampleCounts {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        let total = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptySample);
        }
        Ok(Self { counts, total })
    }

    /// Counts of an ordered sample of types (order is forgotten).
    pub fn from_types(k: usize, types: &[usize]) -> Result<Self> {
        let mut counts = vec![0; k];
        for &t in types {
            if t >= k {
                return Err(Error::InvalidParameter(format!(
                    "type {t} out of range for K = {k}"
                )));
            }
            counts[t] += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u32 {
        self.total
    }
}

#[derive(Clone, Debug)]
enum Compiled {
    Neutral,
    Transitive,
    Mutation {
        u: f64,
        kernel: Vec<f64>,
    },
    Logistic {
        p: Vec<f64>,
    },
    PartialOrder {
        beats: Vec<bool>,
    },
    NegFreqDep,
    PosFreqDep,
    Bernstein {
        table: BernsteinTable<f64>,
        mutation_free: bool,
    },
}

/// A validated colouring rule over `K` types.
#[derive(Clone, Debug)]
pub struct ColouringRule {
    k: usize,
    kind: RuleKind,
    compiled: Compiled,
}

impl PartialEq for ColouringRule {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && self.kind == other.kind
    }
}

fn check_square(m: &[Vec<f64>], k: usize, what: &str) -> Result<Vec<f64>> {
    if m.len() != k || m.iter().any(|r| r.len() != k) {
        return Err(Error::InvalidParameter(format!("{what} must be {k}x{k}")));
    }
    let flat: Vec<f64> = m.iter().flatten().copied().collect();
    if flat.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(Error::InvalidParameter(format!(
            "{what} entries must lie in [0, 1]"
        )));
    }
    Ok(flat)
}

impl ColouringRule {
    pub fn new(k: usize, kind: RuleKind) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter(format!("K = {k} must be >= 2")));
        }
        let compiled = match &kind {
            RuleKind::Neutral => Compiled::Neutral,
            RuleKind::Transitive => Compiled::Transitive,
            RuleKind::TransitiveWithMutation {
                mutation_prob,
                kernel,
            } => {
                if !(0.0..=1.0).contains(mutation_prob) {
                    return Err(Error::InvalidParameter(format!(
                        "mutation probability {mutation_prob} outside [0, 1]"
                    )));
                }
                let flat = check_square(kernel, k, "mutation kernel")?;
                for (i, row) in kernel.iter().enumerate() {
                    let s: f64 = row.iter().sum();
                    if (s - 1.0).abs() > 1e-12 {
                        return Err(Error::InvalidParameter(format!(
                            "mutation kernel row {i} sums to {s}"
                        )));
                    }
                }
                Compiled::Mutation {
                    u: *mutation_prob,
                    kernel: flat,
                }
            }
            RuleKind::Logistic { p } => {
                let flat = check_square(p, k, "logistic matrix")?;
                for i in 0..k {
                    if (p[i][i] - 0.5).abs() > 1e-12 {
                        return Err(Error::InvalidParameter(format!("p[{i}][{i}] must be 1/2")));
                    }
                    for j in 0..i {
                        if (p[i][j] + p[j][i] - 1.0).abs() > 1e-12 {
                            return Err(Error::InvalidParameter(format!(
                                "p[{i}][{j}] + p[{j}][{i}] must be 1"
                            )));
                        }
                    }
                }
                Compiled::Logistic { p: flat }
            }
            RuleKind::PartialOrder { beats } => Compiled::PartialOrder {
                beats: beats_matrix(k, beats)?,
            },
            RuleKind::NegFreqDep => Compiled::NegFreqDep,
            RuleKind::PosFreqDep => Compiled::PosFreqDep,
            RuleKind::Bernstein { table, polynomial } => {
                let table = match (table, polynomial) {
                    (Some(t), None) => t.clone(),
                    (None, Some(g)) => BernsteinTable::from_polynomial(g, 2)?,
                    _ => {
                        return Err(Error::InvalidParameter(
                            "bernstein rule needs exactly one of `table` or `polynomial`".into(),
                        ))
                    }
                };
                if table.k() != k {
                    return Err(Error::DimensionMismatch {
                        expected: k,
                        got: table.k(),
                    });
                }
                // a degree-1 table would contradict c_z = δ_z on singletons
                let table = table.elevate_to(2);
                Compiled::Bernstein {
                    mutation_free: table.is_mutation_free(),
                    table,
                }
            }
        };
        Ok(Self { k, kind, compiled })
    }

    /// Rock-paper-scissors on three types: 1 beats 0, 2 beats 1, 0 beats 2.
    pub fn rps() -> Self {
        Self::new(
            3,
            RuleKind::PartialOrder {
                beats: vec![(1, 0), (2, 1), (0, 2)],
            },
        )
        .expect("valid cycle")
    }

    /// Bernstein rule for a polynomial self-map of the simplex.
    pub fn bernstein(g: &PolynomialMap<f64>) -> Result<Self> {
        Self::new(
            g.k,
            RuleKind::Bernstein {
                table: None,
                polynomial: Some(g.clone()),
            },
        )
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> &RuleKind {
        &self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            RuleKind::Neutral => "neutral",
            RuleKind::Transitive => "transitive",
            RuleKind::TransitiveWithMutation { .. } => "transitive_with_mutation",
            RuleKind::Logistic { .. } => "logistic",
            RuleKind::PartialOrder { .. } => "partial_order",
            RuleKind::NegFreqDep => "neg_freq_dep",
            RuleKind::PosFreqDep => "pos_freq_dep",
            RuleKind::Bernstein { .. } => "bernstein",
        }
    }

    /// The table actually used by a Bernstein rule (degree at least 2).
    pub fn bernstein_table(&self) -> Option<&BernsteinTable<f64>> {
        match &self.compiled {
            Compiled::Bernstein { table, .. } => Some(table),
            _ => None,
        }
    }

    /// `(i, j)` entry: `i` beats `j`, for partial orders.
    pub fn beats(&self) -> Option<&[bool]> {
        match &self.compiled {
            Compiled::PartialOrder { beats } => Some(beats),
            _ => None,
        }
    }

    /// Absent types are never produced.
    pub fn is_mutation_free(&self) -> bool {
        match &self.compiled {
            Compiled::Mutation { u, kernel } => {
                *u == 0.0 || (0..self.k).all(|i| kernel[i * self.k + i] == 1.0)
            }
            Compiled::Bernstein { mutation_free, .. } => *mutation_free,
            _ => true,
        }
    }

    /// Whether samples of this size have a defined colouring.
    pub fn supports_size(&self, size: usize) -> bool {
        match &self.compiled {
            Compiled::Logistic { .. } => size <= 2,
            Compiled::Bernstein { table, .. } => size == 1 || size == table.degree() as usize,
            _ => size >= 1,
        }
    }

    pub fn colour_distribution(&self, s: &SampleCounts) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.k];
        self.colour_into(s.counts(), &mut out)?;
        Ok(out)
    }

    /// Writes `c_z` into `out`; `counts` must have length `K`.
    pub fn colour_into(&self, counts: &[u32], out: &mut [f64]) -> Result<()> {
        let k = self.k;
        if counts.len() != k || out.len() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: counts.len().min(out.len()),
            });
        }
        let total: u32 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptySample);
        }
        out.iter_mut().for_each(|v| *v = 0.0);
        let unsupported = || Error::UnsupportedSampleSize {
            rule: self.name(),
            size: total as usize,
        };
        match &self.compiled {
            Compiled::Neutral => {
                let t = total as f64;
                for (o, &c) in out.iter_mut().zip(counts) {
                    *o = c as f64 / t;
                }
            }
            Compiled::Transitive => {
                out[max_present(counts)] = 1.0;
            }
            Compiled::Mutation { u, kernel } => {
                let w = max_present(counts);
                for (j, o) in out.iter_mut().enumerate() {
                    *o = u * kernel[w * k + j];
                }
                out[w] += 1.0 - u;
            }
            Compiled::Logistic { p } => {
                if total > 2 {
                    return Err(unsupported());
                }
                let mut present = counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(i, _)| i);
                let i = present.next().unwrap();
                match present.next() {
                    None => out[i] = 1.0,
                    Some(j) => {
                        out[i] = p[i * k + j];
                        out[j] = p[j * k + i];
                    }
                }
            }
            Compiled::PartialOrder { beats } => {
                let present = |i: usize| counts[i] > 0;
                let mut n_max = 0;
                for i in (0..k).filter(|&i| present(i)) {
                    if !(0..k).any(|j| present(j) && beats[j * k + i]) {
                        out[i] = 1.0;
                        n_max += 1;
                    }
                }
                if n_max == 0 {
                    // every present type is beaten (a full cycle): uniform over present
                    for i in (0..k).filter(|&i| present(i)) {
                        out[i] = 1.0;
                        n_max += 1;
                    }
                }
                let w = 1.0 / n_max as f64;
                out.iter_mut().for_each(|v| *v *= w);
            }
            Compiled::NegFreqDep => {
                let m = *counts.iter().filter(|&&c| c > 0).min().unwrap();
                uniform_where(counts, out, |c| c == m);
            }
            Compiled::PosFreqDep => {
                let m = *counts.iter().max().unwrap();
                uniform_where(counts, out, |c| c == m);
            }
            Compiled::Bernstein { table, .. } => {
                if total == 1 {
                    out[max_present(counts)] = 1.0;
                } else {
                    let row = table.coefficients(counts).ok_or_else(unsupported)?;
                    out.copy_from_slice(row);
                }
            }
        }
        Ok(())
    }

    /// Precomputes `c_z` for all samples of one size.
    pub fn enumerate_class(&self, size: usize) -> Result<EnumeratedClass> {
        EnumeratedClass::new(self, size)
    }
}

fn beats_matrix(k: usize, edges: &[(usize, usize)]) -> Result<Vec<bool>> {
    let mut m = vec![false; k * k];
    for &(w, l) in edges {
        if w >= k || l >= k {
            return Err(Error::InvalidParameter(format!(
                "edge ({w}, {l}) out of range for K = {k}"
            )));
        }
        if w == l || m[l * k + w] {
            return Err(Error::InvalidParameter(format!(
                "beats relation not antisymmetric at ({w}, {l})"
            )));
        }
        m[w * k + l] = true;
    }
    Ok(m)
}

#[inline]
fn max_present(counts: &[u32]) -> usize {
    counts
        .iter()
        .rposition(|&c| c > 0)
        .expect("nonempty sample")
}

#[inline]
fn uniform_where(counts: &[u32], out: &mut [f64], pick: impl Fn(u32) -> bool) {
    let mut n = 0;
    for (o, &c) in out.iter_mut().zip(counts) {
        if c > 0 && pick(c) {
            *o = 1.0;
            n += 1;
        }
    }
    let w = 1.0 / n as f64;
    out.iter_mut().for_each(|v| *v *= w);
}

/// All samples of one size with their multinomial coefficients and colourings.
#[derive(Clone, Debug)]
pub struct EnumeratedClass {
    k: usize,
    size: usize,
    samples: Vec<Vec<u32>>,
    coefficients: Vec<f64>,
    /// Row-major colour distributions, one row per sample.
    colours: Vec<f64>,
}

impl EnumeratedClass {
    fn new(rule: &ColouringRule, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptySample);
        }
        if !rule.supports_size(size) {
            return Err(Error::UnsupportedSampleSize {
                rule: rule.name(),
                size,
            });
        }
        let k = rule.k();
        let samples = compositions(k, size as u32);
        let mut colours = vec![0.0; samples.len() * k];
        for (r, z) in samples.iter().enumerate() {
            rule.colour_into(z, &mut colours[r * k..(r + 1) * k])?;
        }
        let coefficients = samples.iter().map(|z| multinomial_coefficient(z)).collect();
        Ok(Self {
            k,
            size,
            samples,
            coefficients,
            colours,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `p_k(x) = Σ_z multinom(k; z) x^z c_z`, added to `out` with weight `w`.
    pub fn add_type_prob(&self, x: &[f64], w: f64, out: &mut [f64]) {
        let k = self.k;
        for (r, z) in self.samples.iter().enumerate() {
            let mut pz = self.coefficients[r];
            for (&zi, &xi) in z.iter().zip(x) {
                if zi > 0 {
                    pz *= xi.powi(zi as i32);
                }
            }
            if pz == 0.0 {
                continue;
            }
            let row = &self.colours[r * k..(r + 1) * k];
            for (o, &c) in out.iter_mut().zip(row) {
                *o += w * pz * c;
            }
        }
    }
}

/// Draws the type counts of `size` i.i.d. categorical(x) potential parents.
#[inline]
pub fn sample_counts<R: Rng + ?Sized>(size: usize, x: &[f64], rng: &mut R, counts: &mut [u32]) {
    counts.iter_mut().for_each(|c| *c = 0);
    for _ in 0..size {
        counts[crate::sampling::categorical(x, rng)] += 1;
    }
}

/// `p^N(x)` with per-coordinate standard errors (zero when computed exactly).
#[derive(Clone, Debug, PartialEq)]
pub struct TypeProbability {
    pub p: Vec<f64>,
    pub se: Vec<f64>,
    pub exact: bool,
}

/// Whether a class is small enough to enumerate.
pub fn is_enumerable(k: usize, size: usize) -> bool {
    size <= K_MAX_EXACT && composition_count(k, size as u32) <= 2e5
}

/// The offspring type law `p^N_i(x) = P(f(v) = i)` under `rule` and `Q`.
pub fn offspring_type_prob<R: Rng + ?Sized>(
    rule: &ColouringRule,
    q: &OffspringLaw,
    x: &SimplexPoint<f64>,
    rng: &mut R,
) -> Result<TypeProbability> {
    let k = rule.k();
    if x.k() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: x.k(),
        });
    }
    let xs = x.as_slice();
    let mut p = vec![0.0; k];
    let mut var = vec![0.0; k];
    let mut exact = true;
    let mut counts = vec![0u32; k];
    let mut c = vec![0.0; k];
    for (size, w) in q.classes() {
        if is_enumerable(k, size) {
            rule.enumerate_class(size)?.add_type_prob(xs, w, &mut p);
            continue;
        }
        exact = false;
        let mut sum = vec![0.0; k];
        let mut sum2 = vec![0.0; k];
        for _ in 0..MC_SAMPLES {
            sample_counts(size, xs, rng, &mut counts);
            rule.colour_into(&counts, &mut c)?;
            for i in 0..k {
                sum[i] += c[i];
                sum2[i] += c[i] * c[i];
            }
        }
        let n = MC_SAMPLES as f64;
        for i in 0..k {
            let m = sum[i] / n;
            p[i] += w * m;
            var[i] += w * w * (sum2[i] / n - m * m).max(0.0) / (n - 1.0);
        }
    }
    Ok(TypeProbability {
        p,
        se: var.into_iter().map(f64::sqrt).collect(),
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use proptest::prelude::*;

    fn colour(rule: &ColouringRule, z: &[u32]) -> Vec<f64> {
        rule.colour_distribution(&SampleCounts::new(z.to_vec()).unwrap())
            .unwrap()
    }

    /// Counts of an ordered, 1-based sample.
    fn counts_of(k: usize, sample: &[usize]) -> Vec<u32> {
        let v: Vec<usize> = sample.iter().map(|t| t - 1).collect();
        SampleCounts::from_types(k, &v).unwrap().counts().to_vec()
    }

    fn rule(k: usize, kind: RuleKind) -> ColouringRule {
        ColouringRule::new(k, kind).unwrap()
    }

    #[test]
    fn documented_colourings() {
        let tr = rule(3, RuleKind::Transitive);
        assert_eq!(colour(&tr, &counts_of(3, &[1, 3, 2])), vec![0.0, 0.0, 1.0]);
        assert_eq!(colour(&tr, &counts_of(3, &[2])), vec![0.0, 1.0, 0.0]);

        let neg = rule(3, RuleKind::NegFreqDep);
        assert_eq!(colour(&neg, &counts_of(3, &[1, 1, 2])), vec![0.0, 1.0, 0.0]);
        for v in colour(&neg, &counts_of(3, &[1, 2, 3])) {
            assert!((v - 1.0 / 3.0).abs() < 1e-15);
        }
        let pos = rule(3, RuleKind::PosFreqDep);
        assert_eq!(colour(&pos, &counts_of(3, &[1, 1, 2])), vec![1.0, 0.0, 0.0]);

        let logi = rule(
            2,
            RuleKind::Logistic {
                p: vec![vec![0.5, 0.7], vec![0.3, 0.5]],
            },
        );
        assert_eq!(colour(&logi, &counts_of(2, &[1, 2])), vec![0.7, 0.3]);

        let rps = ColouringRule::rps();
        assert_eq!(colour(&rps, &counts_of(3, &[1, 3])), vec![1.0, 0.0, 0.0]);
        assert_eq!(colour(&rps, &counts_of(3, &[1, 2])), vec![0.0, 1.0, 0.0]);
        assert_eq!(colour(&rps, &counts_of(3, &[2, 3])), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn singletons_are_copied() {
        let kinds = vec![
            RuleKind::Neutral,
            RuleKind::Transitive,
            RuleKind::Logistic {
                p: vec![
                    vec![0.5, 0.9, 0.1],
                    vec![0.1, 0.5, 0.4],
                    vec![0.9, 0.6, 0.5],
                ],
            },
            RuleKind::PartialOrder {
                beats: vec![(0, 1)],
            },
            RuleKind::NegFreqDep,
            RuleKind::PosFreqDep,
            RuleKind::Bernstein {
                table: None,
                polynomial: Some(PolynomialMap::transitive(3, 3)),
            },
        ];
        for kind in kinds {
            let r = rule(3, kind);
            for i in 0..3 {
                let mut z = vec![0; 3];
                z[i] = 1;
                let mut e = vec![0.0; 3];
                e[i] = 1.0;
                assert_eq!(colour(&r, &z), e, "{}", r.name());
            }
        }
    }

    #[test]
    fn empty_and_unsupported_samples() {
        let r = rule(2, RuleKind::Neutral);
        assert!(matches!(
            SampleCounts::new(vec![0, 0]),
            Err(Error::EmptySample)
        ));
        let mut out = [0.0; 2];
        assert!(matches!(
            r.colour_into(&[0, 0], &mut out),
            Err(Error::EmptySample)
        ));
        let logi = rule(
            2,
            RuleKind::Logistic {
                p: vec![vec![0.5, 1.0], vec![0.0, 0.5]],
            },
        );
        assert!(matches!(
            logi.colour_into(&[2, 1], &mut out),
            Err(Error::UnsupportedSampleSize { size: 3, .. })
        ));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ColouringRule::new(
            2,
            RuleKind::Logistic {
                p: vec![vec![0.5, 0.7], vec![0.7, 0.5]]
            }
        )
        .is_err());
        assert!(ColouringRule::new(
            3,
            RuleKind::PartialOrder {
                beats: vec![(0, 1), (1, 0)]
            }
        )
        .is_err());
        assert!(ColouringRule::new(
            2,
            RuleKind::TransitiveWithMutation {
                mutation_prob: 0.1,
                kernel: vec![vec![0.5, 0.4], vec![0.0, 1.0]]
            }
        )
        .is_err());
    }

    #[test]
    fn mutation_rule() {
        let r = rule(
            2,
            RuleKind::TransitiveWithMutation {
                mutation_prob: 0.1,
                kernel: vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            },
        );
        assert!(!r.is_mutation_free());
        let c = colour(&r, &[1, 1]);
        assert!((c[0] - 0.1).abs() < 1e-15 && (c[1] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn transitive_pair_type_prob() {
        let mut rng = RngStream::new(0, 0);
        let rho = 0.3;
        let q = OffspringLaw::two_point(rho, 2).unwrap();
        let x = SimplexPoint::new(vec![0.5, 0.5]).unwrap();
        let tp = offspring_type_prob(&rule(2, RuleKind::Transitive), &q, &x, &mut rng).unwrap();
        // brute force over the four ordered pairs: type 1 wins only (1, 1)
        let brute = (1.0 - rho) * 0.5 + rho * 0.25;
        assert!((tp.p[0] - brute).abs() < 1e-15);
        assert!((tp.p[0] - (0.5 - 0.25 * rho)).abs() < 1e-15);
        assert!(tp.exact);
    }

    #[test]
    fn monomorphic_and_neutral_type_prob() {
        let mut rng = RngStream::new(0, 0);
        let q = OffspringLaw::new(0.4, vec![(2, 0.5), (5, 0.5)]).unwrap();
        let x = SimplexPoint::new(vec![0.1, 0.6, 0.3]).unwrap();
        let tp = offspring_type_prob(&rule(3, RuleKind::Neutral), &q, &x, &mut rng).unwrap();
        for (a, b) in tp.p.iter().zip(x.as_slice()) {
            assert!((a - b).abs() < 1e-14);
        }
        let e = SimplexPoint::vertex(3, 1).unwrap();
        for kind in [
            RuleKind::Transitive,
            RuleKind::NegFreqDep,
            RuleKind::PosFreqDep,
        ] {
            let tp = offspring_type_prob(&rule(3, kind), &q, &e, &mut rng).unwrap();
            assert_eq!(tp.p, vec![0.0, 1.0, 0.0]);
        }
    }

    #[test]
    fn monte_carlo_beyond_k_max() {
        let mut rng = RngStream::new(3, 0);
        let q = OffspringLaw::new(1.0, vec![(14, 1.0)]).unwrap();
        let x = SimplexPoint::new(vec![0.7, 0.3]).unwrap();
        let tp = offspring_type_prob(&rule(2, RuleKind::Transitive), &q, &x, &mut rng).unwrap();
        assert!(!tp.exact);
        let p1 = 0.7f64.powi(14);
        assert!((tp.p[0] - p1).abs() < 4.0 * tp.se[0] + 1e-12);
    }

    proptest! {
        #[test]
        fn exchangeable_and_supported(types in proptest::collection::vec(0usize..4, 1..7), seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            let mut rng = RngStream::new(seed, 0);
            let mut shuffled = types.clone();
            shuffled.shuffle(&mut rng);
            let a = SampleCounts::from_types(4, &types).unwrap();
            let b = SampleCounts::from_types(4, &shuffled).unwrap();
            let rules = [
                rule(4, RuleKind::Neutral),
                rule(4, RuleKind::Transitive),
                rule(4, RuleKind::PartialOrder { beats: vec![(1, 0), (2, 1), (0, 2), (3, 0)] }),
                rule(4, RuleKind::NegFreqDep),
                rule(4, RuleKind::PosFreqDep),
            ];
            for r in &rules {
                let ca = r.colour_distribution(&a).unwrap();
                prop_assert_eq!(&ca, &r.colour_distribution(&b).unwrap());
                prop_assert!((ca.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                for (i, &v) in ca.iter().enumerate() {
                    if a.counts()[i] == 0 {
                        prop_assert_eq!(v, 0.0);
                    }
                }
            }
        }
    }
}
