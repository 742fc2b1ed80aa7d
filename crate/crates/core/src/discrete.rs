//! Exact generation-by-generation simulation of the frequency process.
//!
//! Parents are picked uniformly with replacement, so in an ordinary generation
//! the offspring types are i.i.d. with law `p^N(x) = Σ_k Q(k) p_k(x)` and the
//! next counts are `Multinomial(N, p^N(x))`. Individuals are never materialized.

use rand::Rng;

use crate::colouring::{is_enumerable, sample_counts, ColouringRule, EnumeratedClass};
use crate::error::{Error, Result};
use crate::lambda::JumpLaw;
use crate::offspring::OffspringLaw;
use crate::sampling::{binomial, categorical, multinomial_into};
use crate::schedule::ScalingSchedule;
use crate::simplex::SimplexPoint;
use crate::trajectory::Trajectory;

#[derive(Clone, Debug)]
enum ClassEval {
    Exact(EnumeratedClass),
    /// Too many samples to enumerate: each offspring is simulated.
    PerIndividual(usize),
}

/// Population of `N` individuals with a colouring rule, `Q_N`, and extreme events.
#[derive(Clone, Debug)]
pub struct DiscreteModel {
    n: u64,
    kappa: f64,
    q: OffspringLaw,
    rule: ColouringRule,
    gamma: f64,
    event_law: Option<JumpLaw>,
    classes: Vec<(f64, ClassEval)>,
}

/// Estimate of `κ (p^N(x) - x) / ρ_N` with per-coordinate standard errors.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftEstimate {
    pub mean: Vec<f64>,
    pub se: Vec<f64>,
    pub samples: usize,
}

impl DiscreteModel {
    /// Model without extreme events.
    pub fn new(n: u64, q: OffspringLaw, rule: ColouringRule, kappa: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("N = {n} must be >= 2")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa = {kappa} must be positive"
            )));
        }
        let mut classes = Vec::new();
        for (size, w) in q.classes() {
            if !rule.supports_size(size) {
                return Err(Error::UnsupportedSampleSize {
                    rule: rule.name(),
                    size,
                });
            }
            let eval = if is_enumerable(rule.k(), size) {
                ClassEval::Exact(rule.enumerate_class(size)?)
            } else {
                ClassEval::PerIndividual(size)
            };
            classes.push((w, eval));
        }
        Ok(Self {
            n,
            kappa,
            q,
            rule,
            gamma: 0.0,
            event_law: None,
            classes,
        })
    }

    /// Model driven by a scaling schedule (offspring law, γ_N and Λ̂^α_N).
    pub fn from_schedule(schedule: &ScalingSchedule, rule: ColouringRule) -> Result<Self> {
        let m = Self::new(schedule.n, schedule.offspring.clone(), rule, schedule.kappa)?;
        m.with_extreme_events(schedule.gamma, schedule.event_law().clone())
    }

    /// Extreme events with probability `gamma` per generation, sizes from `law`.
    pub fn with_extreme_events(mut self, gamma: f64, law: JumpLaw) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma = {gamma} outside [0, 1]"
            )));
        }
        if gamma > 0.0 && law.is_empty() {
            return Err(Error::InvalidParameter(
                "gamma > 0 needs a nonempty event-size law".into(),
            ));
        }
        self.gamma = gamma;
        self.event_law = (gamma > 0.0).then_some(law);
        Ok(self)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.rule.k()
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn rho(&self) -> f64 {
        self.q.rho()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rule(&self) -> &ColouringRule {
        &self.rule
    }

    pub fn offspring(&self) -> &OffspringLaw {
        &self.q
    }

    /// Generations per unit of rescaled time.
    pub fn generations_for(&self, t: f64) -> u64 {
        (self.kappa * t / self.q.rho() + 1e-9).floor() as u64
    }

    /// `p^N(x)` for the enumerable classes plus, for the others, their weights.
    fn type_law(&self, x: &[f64], p: &mut [f64]) -> Vec<(usize, f64)> {
        p.iter_mut().for_each(|v| *v = 0.0);
        let mut rest = Vec::new();
        for (w, eval) in &self.classes {
            match eval {
                ClassEval::Exact(c) => c.add_type_prob(x, *w, p),
                ClassEval::PerIndividual(size) => rest.push((*size, *w)),
            }
        }
        rest
    }

    /// One ordinary generation on counts summing to `N`.
    pub fn step_ordinary<R: Rng + ?Sized>(&self, counts: &[u64], rng: &mut R) -> Result<Vec<u64>> {
        let k = self.k();
        let x: Vec<f64> = counts.iter().map(|&c| c as f64 / self.n as f64).collect();
        let mut p = vec![0.0; k];
        let rest = self.type_law(&x, &mut p);
        let mut out = vec![0u64; k];
        if rest.is_empty() {
            multinomial_into(self.n, &p, rng, &mut out);
            return Ok(out);
        }
        // split offspring between the enumerated classes and the simulated ones
        let exact_mass: f64 = p.iter().sum();
        let mut weights = vec![exact_mass];
        weights.extend(rest.iter().map(|r| r.1));
        let mut split = vec![0u64; weights.len()];
        multinomial_into(self.n, &weights, rng, &mut split);
        if exact_mass > 0.0 {
            let cond: Vec<f64> = p.iter().map(|v| v / exact_mass).collect();
            multinomial_into(split[0], &cond, rng, &mut out);
        }
        let mut z = vec![0u32; k];
        let mut c = vec![0.0; k];
        for (&(size, _), &m) in rest.iter().zip(&split[1..]) {
            for _ in 0..m {
                sample_counts(size, &x, rng, &mut z);
                self.rule.colour_into(&z, &mut c)?;
                out[categorical(&c, rng)] += 1;
            }
        }
        Ok(out)
    }

    /// An extreme event of size `z`: a `Binomial(N, z)` block copies one parent of
    /// type `J ~ x`; the other offspring pick parents uniformly.
    pub fn step_extreme<R: Rng + ?Sized>(&self, counts: &[u64], z: f64, rng: &mut R) -> Vec<u64> {
        let x: Vec<f64> = counts.iter().map(|&c| c as f64 / self.n as f64).collect();
        let j = categorical(&x, rng);
        let b = binomial(self.n, z, rng);
        let mut out = vec![0u64; counts.len()];
        out[j] += b;
        multinomial_into(self.n - b, &x, rng, &mut out);
        out
    }

    /// One generation on integer counts.
    pub fn step_counts<R: Rng + ?Sized>(&self, counts: &[u64], rng: &mut R) -> Result<Vec<u64>> {
        if let Some(law) = &self.event_law {
            if rng.random::<f64>() < self.gamma {
                let z = law.sample(rng);
                return Ok(self.step_extreme(counts, z, rng));
            }
        }
        self.step_ordinary(counts, rng)
    }

    /// One generation from `x`, first rounded to multiples of `1/N`.
    pub fn step_generation<R: Rng + ?Sized>(
        &self,
        x: &SimplexPoint<f64>,
        rng: &mut R,
    ) -> Result<SimplexPoint<f64>> {
        self.check_dim(x)?;
        let counts = self.step_counts(&x.round_to_counts(self.n), rng)?;
        SimplexPoint::from_counts(&counts)
    }

    fn check_dim(&self, x: &SimplexPoint<f64>) -> Result<()> {
        if x.k() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                got: x.k(),
            });
        }
        Ok(())
    }

    /// `κ (p^N(x) - x) / ρ_N` computed by enumeration of every class.
    pub fn exact_drift(&self, x: &SimplexPoint<f64>) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let k = self.k();
        let mut p = vec![0.0; k];
        for &(size, w) in self.q.tail() {
            if !is_enumerable(k, size) {
                return Err(Error::InvalidParameter(format!(
                    "sample size {size} too large to enumerate for K = {k}"
                )));
            }
            self.rule
                .enumerate_class(size)?
                .add_type_prob(x.as_slice(), w, &mut p);
        }
        Ok(p.iter()
            .zip(x.as_slice())
            .map(|(pi, xi)| self.kappa * (pi - xi))
            .collect())
    }
}

/// Monte Carlo estimate of `κ (p^N(x) - x) / ρ_N` from `replicates` offspring.
///
/// The singleton class contributes exactly `x` and cancels; each sample draws a
/// size from the tail, the potential parents' types, and records
/// `c_z - z / size`, whose mean is `p_tail(x) - x` (the neutral colouring
/// `z / size` acts as a control variate).
pub fn empirical_drift<R: Rng + ?Sized>(
    m: &DiscreteModel,
    x: &SimplexPoint<f64>,
    replicates: usize,
    rng: &mut R,
) -> Result<DriftEstimate> {
    m.check_dim(x)?;
    if replicates < 2 {
        return Err(Error::InvalidParameter(
            "empirical_drift needs at least 2 replicates".into(),
        ));
    }
    let k = m.k();
    let xs = x.as_slice();
    let mut z = vec![0u32; k];
    let mut c = vec![0.0; k];
    let mut sum = vec![0.0; k];
    let mut sum2 = vec![0.0; k];
    for _ in 0..replicates {
        let size = m.q.sample_tail(rng);
        sample_counts(size, xs, rng, &mut z);
        m.rule.colour_into(&z, &mut c)?;
        let inv = 1.0 / size as f64;
        for i in 0..k {
            let d = c[i] - z[i] as f64 * inv;
            sum[i] += d;
            sum2[i] += d * d;
        }
    }
    let r = replicates as f64;
    let mut mean = vec![0.0; k];
    let mut se = vec![0.0; k];
    for i in 0..k {
        let mu = sum[i] / r;
        let var = ((sum2[i] - r * mu * mu) / (r - 1.0)).max(0.0);
        mean[i] = m.kappa * mu;
        se[i] = m.kappa * (var / r).sqrt();
    }
    Ok(DriftEstimate {
        mean,
        se,
        samples: replicates,
    })
}

/// Iterates [`DiscreteModel::step_generation`] for `generations` steps, recording
/// every `record_every`-th state (and the last). Times are generation indices.
pub fn simulate_discrete<R: Rng + ?Sized>(
    m: &DiscreteModel,
    x0: &SimplexPoint<f64>,
    generations: u64,
    record_every: u64,
    rng: &mut R,
) -> Result<Trajectory> {
    m.check_dim(x0)?;
    if record_every == 0 {
        return Err(Error::InvalidParameter("record_every must be >= 1".into()));
    }
    let absorbing = m.rule.is_mutation_free();
    let mut counts = x0.round_to_counts(m.n);
    let mut traj = Trajectory::new();
    traj.push(0.0, SimplexPoint::from_counts(&counts)?);
    let mut g = 0;
    while g < generations {
        if absorbing && counts.iter().filter(|&&c| c > 0).count() == 1 {
            let state = SimplexPoint::from_counts(&counts)?;
            let mut t = (g / record_every + 1) * record_every;
            while t < generations {
                traj.push(t as f64, state.clone());
                t += record_every;
            }
            traj.push(generations as f64, state);
            return Ok(traj);
        }
        counts = m.step_counts(&counts, rng)?;
        g += 1;
        if g % record_every == 0 || g == generations {
            traj.push(g as f64, SimplexPoint::from_counts(&counts)?);
        }
    }
    Ok(traj)
}

/// Counts after `generations` steps, without recording.
pub fn final_counts<R: Rng + ?Sized>(
    m: &DiscreteModel,
    x0: &SimplexPoint<f64>,
    generations: u64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    m.check_dim(x0)?;
    let absorbing = m.rule.is_mutation_free();
    let mut counts = x0.round_to_counts(m.n);
    for _ in 0..generations {
        if absorbing && counts.iter().filter(|&&c| c > 0).count() == 1 {
            break;
        }
        counts = m.step_counts(&counts, rng)?;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::RuleKind;
    use crate::lambda::LambdaMeasure;
    use crate::rng::RngStream;

    fn model(k: usize, kind: RuleKind, rho: f64, size: usize, kappa: f64) -> DiscreteModel {
        let q = OffspringLaw::two_point(rho, size).unwrap();
        DiscreteModel::new(100, q, ColouringRule::new(k, kind).unwrap(), kappa).unwrap()
    }

    #[test]
    fn monomorphic_absorbing_and_short_trajectories() {
        let mut rng = RngStream::new(1, 0);
        let m = model(3, RuleKind::Transitive, 0.5, 2, 1.0);
        let e = SimplexPoint::vertex(3, 2).unwrap();
        assert_eq!(m.step_generation(&e, &mut rng).unwrap(), e);
        let t = simulate_discrete(&m, &e, 25, 10, &mut rng).unwrap();
        assert_eq!(t.times(), &[0.0, 10.0, 20.0, 25.0]);
        assert!(t.states().iter().all(|s| *s == e));
        let x = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        let t0 = simulate_discrete(&m, &x, 0, 1, &mut rng).unwrap();
        assert_eq!(t0.len(), 1);
        assert_eq!(t0.states()[0], x);
    }

    #[test]
    fn neutral_step_mean() {
        let mut rng = RngStream::new(2, 0);
        let m = model(3, RuleKind::Transitive, 0.0, 2, 1.0);
        let x = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        let reps = 100_000;
        let mut acc = [0.0; 3];
        for _ in 0..reps {
            let y = m.step_generation(&x, &mut rng).unwrap();
            for i in 0..3 {
                acc[i] += y.get(i);
            }
        }
        for i in 0..3 {
            let xi = x.get(i);
            let se = (xi * (1.0 - xi) / 100.0 / reps as f64).sqrt();
            assert!((acc[i] / reps as f64 - xi).abs() < 4.0 * se);
        }
    }

    #[test]
    fn forced_full_extreme_event() {
        let mut rng = RngStream::new(3, 0);
        let m = model(3, RuleKind::Neutral, 0.1, 2, 1.0);
        let counts = [20, 30, 50];
        let mut hits = [0u32; 3];
        for _ in 0..10_000 {
            let out = m.step_extreme(&counts, 1.0, &mut rng);
            let j = out
                .iter()
                .position(|&c| c == 100)
                .expect("block takes everything");
            hits[j] += 1;
        }
        for (i, &h) in hits.iter().enumerate() {
            let p = counts[i] as f64 / 100.0;
            assert!((h as f64 / 1e4 - p).abs() < 4.0 * (p * (1.0 - p) / 1e4).sqrt());
        }
    }

    #[test]
    fn absent_alleles_stay_absent() {
        let mut rng = RngStream::new(4, 0);
        let l = LambdaMeasure::PointMass { z0: 0.5, mass: 1.0 };
        let m = model(3, RuleKind::NegFreqDep, 0.5, 3, 1.0)
            .with_extreme_events(0.3, JumpLaw::new(&l, 0.1).unwrap())
            .unwrap();
        let mut x = SimplexPoint::new(vec![0.4, 0.0, 0.6]).unwrap();
        for _ in 0..200 {
            x = m.step_generation(&x, &mut rng).unwrap();
            assert_eq!(x.get(1), 0.0);
            let c = x.round_to_counts(100);
            assert_eq!(c.iter().sum::<u64>(), 100);
        }
    }

    #[test]
    fn drift_estimates() {
        let mut rng = RngStream::new(5, 0);
        let x = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        let neutral = model(3, RuleKind::Neutral, 0.2, 3, 1.0);
        let d = empirical_drift(&neutral, &x, 1000, &mut rng).unwrap();
        assert!(d.mean.iter().all(|&v| v == 0.0));
        assert_eq!(neutral.exact_drift(&x).unwrap(), vec![0.0; 3]);

        let tr = model(2, RuleKind::Transitive, 0.01, 2, 1.0);
        let h = SimplexPoint::uniform(2).unwrap();
        let d = empirical_drift(&tr, &h, 200_000, &mut rng).unwrap();
        assert!((d.mean[0] + 0.25).abs() < 4.0 * d.se[0]);
        assert!((tr.exact_drift(&h).unwrap()[0] + 0.25).abs() < 1e-15);

        let rps = DiscreteModel::new(
            100,
            OffspringLaw::two_point(0.01, 2).unwrap(),
            ColouringRule::rps(),
            1.0,
        )
        .unwrap();
        let y = SimplexPoint::new(vec![0.5, 0.25, 0.25]).unwrap();
        let d = empirical_drift(&rps, &y, 200_000, &mut rng).unwrap();
        for (i, want) in [0.0, 0.0625, -0.0625].iter().enumerate() {
            assert!((d.mean[i] - want).abs() < 4.0 * d.se[i] + 1e-15);
        }
    }

    #[test]
    fn per_individual_path_matches_law() {
        // K = 2, size 20 exceeds the enumeration limit
        let mut rng = RngStream::new(6, 0);
        let q = OffspringLaw::two_point(1.0, 20).unwrap();
        let m = DiscreteModel::new(
            50,
            q,
            ColouringRule::new(2, RuleKind::Transitive).unwrap(),
            1.0,
        )
        .unwrap();
        let counts = [45u64, 5];
        let p1 = 0.9f64.powi(20);
        let reps = 20_000;
        let mean: f64 = (0..reps)
            .map(|_| m.step_ordinary(&counts, &mut rng).unwrap()[0] as f64)
            .sum::<f64>()
            / reps as f64;
        let se = (50.0 * p1 * (1.0 - p1) / reps as f64).sqrt();
        assert!((mean - 50.0 * p1).abs() < 4.0 * se);
    }
}
