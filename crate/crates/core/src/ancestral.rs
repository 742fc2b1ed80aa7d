//! The dual block-counting process `D_t` and transitive fixation probabilities.
//!
//! Moves from state `n`: `n -> n + i` at rate `n κ w_i` (branching, `w` the law of
//! extra potential parents), `n -> n - 1` at rate `σ C(n, 2)`, and
//! `n -> n - k + 1` at rate `C(n, k) λ_{nk}` for `2 <= k <= n`.

use std::sync::OnceLock;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lambda::{KappaStar, LambdaMeasure};
use crate::offspring::normalize_tail;
use crate::selection::DriftFunction;
use crate::simplex::SimplexPoint;
use crate::trajectory::AncestralPath;

/// Paths stop with [`Error::RateExplosion`] above this state.
pub const EXPLOSION_GUARD: u64 = 10_000_000;
const RATE_CACHE: usize = 4096;
const BATCHES: usize = 20;

#[derive(Debug)]
pub struct AncestralModel {
    kappa: f64,
    sigma: f64,
    /// `(i, w_i)`: increments `i >= 1` with probabilities.
    increments: Vec<(u64, f64)>,
    lambda: LambdaMeasure,
    n_cap: u64,
    cache: Vec<OnceLock<Vec<(u64, f64)>>>,
}

impl Clone for AncestralModel {
    fn clone(&self) -> Self {
        Self::build(
            self.kappa,
            self.sigma,
            self.increments.clone(),
            self.lambda.clone(),
            self.n_cap,
        )
    }
}

/// Recurrence class of the dual.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `κ = 0`: absorbed at one block.
    NoSelection,
    /// `σ > 0` or `κ < κ*`.
    Recurrent,
    /// `σ = 0` and `κ >= κ*`.
    Transient,
}

impl AncestralModel {
    /// `increments` are `(i, w_i)` with `i >= 1`, summing to one.
    pub fn new(
        kappa: f64,
        sigma: f64,
        increments: Vec<(u64, f64)>,
        lambda: LambdaMeasure,
    ) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa = {kappa} must be >= 0"
            )));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma = {sigma} must be >= 0"
            )));
        }
        lambda.validate()?;
        // reuse the sample-size validation: increment i is sample size i + 1
        let tail = normalize_tail(
            increments
                .iter()
                .map(|&(i, w)| (i as usize + 1, w))
                .collect(),
        )?;
        let increments = tail.into_iter().map(|(s, w)| (s as u64 - 1, w)).collect();
        Ok(Self::build(kappa, sigma, increments, lambda, 10_000))
    }

    fn build(
        kappa: f64,
        sigma: f64,
        increments: Vec<(u64, f64)>,
        lambda: LambdaMeasure,
        n_cap: u64,
    ) -> Self {
        Self {
            kappa,
            sigma,
            increments,
            lambda,
            n_cap,
            cache: (0..=RATE_CACHE).map(|_| OnceLock::new()).collect(),
        }
    }

    /// The dual of a transitive drift `κ Σ_k π_k [...]`.
    pub fn from_transitive(
        drift: &DriftFunction<f64>,
        sigma: f64,
        lambda: LambdaMeasure,
    ) -> Result<Self> {
        match drift {
            DriftFunction::Transitive { kappa, pi } => Self::new(
                *kappa,
                sigma,
                pi.iter().map(|&(k, p)| (k as u64, p)).collect(),
                lambda,
            ),
            other => Err(Error::NonTransitiveDrift(other.name().into())),
        }
    }

    /// State cap of the transience detector.
    pub fn with_n_cap(mut self, n_cap: u64) -> Self {
        self.n_cap = n_cap;
        self
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> &LambdaMeasure {
        &self.lambda
    }

    pub fn increments(&self) -> &[(u64, f64)] {
        &self.increments
    }

    pub fn n_cap(&self) -> u64 {
        self.n_cap
    }

    /// Mean increment `β`.
    pub fn beta(&self) -> f64 {
        self.increments.iter().map(|&(i, w)| i as f64 * w).sum()
    }

    pub fn kappa_star(&self) -> Result<KappaStar> {
        self.lambda.kappa_star(self.beta())
    }

    pub fn regime(&self) -> Result<Regime> {
        if self.kappa == 0.0 {
            return Ok(Regime::NoSelection);
        }
        if self.sigma > 0.0 {
            return Ok(Regime::Recurrent);
        }
        Ok(match self.kappa_star()? {
            KappaStar::Infinite => Regime::Recurrent,
            KappaStar::Finite(ks) if self.kappa < ks => Regime::Recurrent,
            KappaStar::Finite(_) => Regime::Transient,
        })
    }

    fn compute_rates(&self, n: u64) -> Vec<(u64, f64)> {
        let mut out: Vec<(u64, f64)> = Vec::new();
        let mut add = |target: u64, rate: f64| {
            if rate > 0.0 {
                match out.iter_mut().find(|e| e.0 == target) {
                    Some(e) => e.1 += rate,
                    None => out.push((target, rate)),
                }
            }
        };
        if n >= 2 {
            for (idx, r) in self.lambda.collision_rates(n).into_iter().enumerate() {
                let k = idx as u64 + 2;
                add(n - k + 1, r);
            }
            add(n - 1, self.sigma * (n * (n - 1) / 2) as f64);
        }
        for &(i, w) in &self.increments {
            add(n + i, n as f64 * self.kappa * w);
        }
        out.sort_by_key(|e| e.0);
        out
    }

    /// Every move out of `n` with its rate; zero rates are omitted and equal
    /// targets merged.
    pub fn rates(&self, n: u64) -> Vec<(u64, f64)> {
        self.rates_ref(n, |r| r.to_vec())
    }

    fn rates_ref<T>(&self, n: u64, f: impl FnOnce(&[(u64, f64)]) -> T) -> T {
        if (n as usize) < self.cache.len() {
            f(self.cache[n as usize].get_or_init(|| self.compute_rates(n)))
        } else {
            f(&self.compute_rates(n))
        }
    }

    /// One Gillespie move: `(holding time, next state)`, or `None` if absorbing.
    fn jump<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Option<(f64, u64)> {
        self.rates_ref(n, |rates| {
            let total: f64 = rates.iter().map(|r| r.1).sum();
            if total <= 0.0 {
                return None;
            }
            let hold = -(1.0 - rng.random::<f64>()).ln() / total;
            let mut u = rng.random::<f64>() * total;
            for &(t, r) in rates {
                if u < r {
                    return Some((hold, t));
                }
                u -= r;
            }
            Some((hold, rates[rates.len() - 1].0))
        })
    }
}

/// Gillespie path on `[0, horizon]`.
pub fn simulate_ancestral<R: Rng + ?Sized>(
    m: &AncestralModel,
    n0: u64,
    horizon: f64,
    rng: &mut R,
) -> Result<AncestralPath> {
    if n0 == 0 {
        return Err(Error::InvalidParameter("n0 must be >= 1".into()));
    }
    let mut path = AncestralPath {
        times: vec![0.0],
        states: vec![n0],
    };
    let (mut t, mut n) = (0.0, n0);
    while let Some((hold, next)) = m.jump(n, rng) {
        t += hold;
        if t > horizon {
            break;
        }
        if next > EXPLOSION_GUARD {
            return Err(Error::RateExplosion {
                limit: EXPLOSION_GUARD,
                time: t,
            });
        }
        n = next;
        path.times.push(t);
        path.states.push(n);
    }
    Ok(path)
}

/// States at the given nondecreasing times, without storing the path.
pub fn ancestral_states_at<R: Rng + ?Sized>(
    m: &AncestralModel,
    n0: u64,
    times: &[f64],
    rng: &mut R,
) -> Result<Vec<u64>> {
    let mut out = Vec::with_capacity(times.len());
    let (mut t, mut n) = (0.0, n0);
    let mut pending = m.jump(n, rng);
    for &target in times {
        while let Some((hold, next)) = pending {
            if t + hold > target {
                break;
            }
            t += hold;
            if next > EXPLOSION_GUARD {
                return Err(Error::RateExplosion {
                    limit: EXPLOSION_GUARD,
                    time: t,
                });
            }
            n = next;
            pending = m.jump(n, rng);
        }
        // memorylessness: the residual holding time after `target` is still exponential
        if let Some((hold, next)) = pending {
            pending = Some((t + hold - target, next));
            t = target;
        }
        out.push(n);
    }
    Ok(out)
}

/// Occupation-time estimate of the stationary law `ν` on `1..=n_max`.
#[derive(Clone, Debug, Serialize)]
pub struct StationaryEstimate {
    /// `occupation[n - 1] = ν(n)`.
    pub occupation: Vec<f64>,
    /// Batch-means standard errors.
    pub se: Vec<f64>,
    pub total_time: f64,
    pub burn_in: f64,
    #[serde(skip)]
    batches: Vec<Vec<f64>>,
}

impl StationaryEstimate {
    pub fn n_max(&self) -> u64 {
        self.occupation.len() as u64
    }

    /// `φ_ν(s) = Σ_n ν(n) s^n` with its batch-means standard error.
    pub fn pgf(&self, s: f64) -> (f64, f64) {
        let value = pgf(&self.occupation, s);
        let b = self.batches.len() as f64;
        let vals: Vec<f64> = self.batches.iter().map(|nu| pgf(nu, s)).collect();
        let mean = vals.iter().sum::<f64>() / b;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (b - 1.0);
        (value, (var / b).sqrt())
    }
}

/// `Σ_n nu[n - 1] s^n`.
pub fn pgf(nu: &[f64], s: f64) -> f64 {
    let mut acc = 0.0;
    let mut p = s;
    for &v in nu {
        acc += v * p;
        p *= s;
        if p == 0.0 {
            break;
        }
    }
    acc
}

/// Runs the dual for `total_time` from `n0` and records time-weighted occupation
/// after `burn_in`. Fails with [`Error::Transient`] if the state exceeds the cap.
pub fn stationary_and_pgf<R: Rng + ?Sized>(
    m: &AncestralModel,
    n0: u64,
    total_time: f64,
    burn_in: f64,
    rng: &mut R,
) -> Result<StationaryEstimate> {
    if !(burn_in >= 0.0 && total_time > burn_in) {
        return Err(Error::InvalidParameter(
            "need 0 <= burn_in < total_time".into(),
        ));
    }
    if n0 == 0 {
        return Err(Error::InvalidParameter("n0 must be >= 1".into()));
    }
    let width = (total_time - burn_in) / BATCHES as f64;
    let mut batches: Vec<Vec<f64>> = vec![Vec::new(); BATCHES];
    let credit = |from: f64, to: f64, n: u64, batches: &mut Vec<Vec<f64>>| {
        let (mut a, b) = (from.max(burn_in), to.min(total_time));
        while a < b {
            let idx = (((a - burn_in) / width) as usize).min(BATCHES - 1);
            let end = (burn_in + (idx + 1) as f64 * width).min(b);
            let end = if idx == BATCHES - 1 { b } else { end };
            let row = &mut batches[idx];
            if row.len() < n as usize {
                row.resize(n as usize, 0.0);
            }
            row[n as usize - 1] += end - a;
            a = end;
        }
    };
    let (mut t, mut n) = (0.0, n0);
    while t < total_time {
        match m.jump(n, rng) {
            None => {
                credit(t, total_time, n, &mut batches);
                break;
            }
            Some((hold, next)) => {
                credit(t, t + hold, n, &mut batches);
                t += hold;
                if next > m.n_cap {
                    return Err(Error::Transient {
                        state: next,
                        cap: m.n_cap,
                        time: t,
                    });
                }
                n = next;
            }
        }
    }
    let n_max = batches.iter().map(|b| b.len()).max().unwrap_or(1);
    for b in batches.iter_mut() {
        b.resize(n_max, 0.0);
        b.iter_mut().for_each(|v| *v /= width);
    }
    let bf = BATCHES as f64;
    let mut occupation = vec![0.0; n_max];
    let mut se = vec![0.0; n_max];
    for i in 0..n_max {
        let mean = batches.iter().map(|b| b[i]).sum::<f64>() / bf;
        let var = batches.iter().map(|b| (b[i] - mean).powi(2)).sum::<f64>() / (bf - 1.0);
        occupation[i] = mean;
        se[i] = (var / bf).sqrt();
    }
    Ok(StationaryEstimate {
        occupation,
        se,
        total_time,
        burn_in,
        batches,
    })
}

/// Stationary law of the chain restricted to `1..=n_max` (moves above `n_max`
/// dropped), by state reduction from the top (Grassmann-Taksar-Heyman).
pub fn stationary_truncated(m: &AncestralModel, n_max: u64) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be >= 1".into()));
    }
    if m.kappa == 0.0 || n_max == 1 {
        let mut nu = vec![0.0; n_max as usize];
        nu[0] = 1.0;
        return Ok(nu);
    }
    let size = n_max as usize;
    let band = m.increments.iter().map(|e| e.0).max().unwrap_or(1) as usize;
    // row i (state i + 1) covers targets 0..min(size, i + band + 1)
    let mut q: Vec<Vec<f64>> = (0..size)
        .map(|i| {
            let mut row = vec![0.0; (i + band + 1).min(size)];
            for (t, r) in m.rates(i as u64 + 1) {
                let j = t as usize - 1;
                if j < row.len() && j != i {
                    row[j] += r;
                }
            }
            row
        })
        .collect();
    let mut down = vec![0.0; size];
    for n in (1..size).rev() {
        let (lower, upper) = q.split_at_mut(n);
        let row_n = &upper[0];
        let s: f64 = row_n[..n].iter().sum();
        if s <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "state {} has no downward moves; the chain is not irreducible",
                n + 1
            )));
        }
        down[n] = s;
        for (i, row_i) in lower.iter_mut().enumerate().skip(n.saturating_sub(band)) {
            let a = row_i.get(n).copied().unwrap_or(0.0);
            if a == 0.0 {
                continue;
            }
            let f = a / s;
            for j in 0..n {
                if j != i {
                    row_i[j] += f * row_n[j];
                }
            }
        }
    }
    let mut nu = vec![0.0; size];
    nu[0] = 1.0;
    for n in 1..size {
        let mut num = 0.0;
        for i in n.saturating_sub(band)..n {
            num += nu[i] * q[i].get(n).copied().unwrap_or(0.0);
        }
        nu[n] = num / down[n];
    }
    let total: f64 = nu.iter().sum();
    nu.iter_mut().for_each(|v| *v /= total);
    Ok(nu)
}

/// `P(allele i fixes) = φ(x_1 + ... + x_i) - φ(x_1 + ... + x_{i-1})`.
pub fn fixation_from_pgf(x0: &SimplexPoint<f64>, phi: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(x0.k());
    let mut cum = 0.0;
    let mut prev = phi(0.0);
    for (i, &xi) in x0.as_slice().iter().enumerate() {
        cum += xi;
        let cur = if i + 1 == x0.k() {
            phi(1.0)
        } else {
            phi(cum.min(1.0))
        };
        out.push(cur - prev);
        prev = cur;
    }
    out
}

/// Fixation probabilities predicted by the dual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixationPrediction {
    pub probs: Vec<f64>,
    pub regime: Regime,
    /// Truncation used for `ν` in the recurrent case.
    pub n_max: Option<u64>,
}

const N_MAX_START: u64 = 256;
const N_MAX_LIMIT: u64 = 4096;

/// Transitive-drift fixation law from `x0`: pgf increments when the dual is
/// recurrent, the largest present label when it is transient.
pub fn fixation_probabilities(
    m: &AncestralModel,
    drift: &DriftFunction<f64>,
    x0: &SimplexPoint<f64>,
) -> Result<FixationPrediction> {
    let DriftFunction::Transitive { kappa, pi } = drift else {
        return Err(Error::NonTransitiveDrift(drift.name().into()));
    };
    let same_pi = pi.len() == m.increments.len()
        && pi.iter().all(|&(k, p)| {
            m.increments
                .iter()
                .any(|&(i, w)| i == k as u64 && (w - p).abs() < 1e-12)
        });
    if *kappa != m.kappa || !same_pi {
        return Err(Error::InvalidParameter(
            "drift and ancestral model disagree on kappa or pi".into(),
        ));
    }
    let regime = m.regime()?;
    match regime {
        Regime::NoSelection => Ok(FixationPrediction {
            probs: x0.as_slice().to_vec(),
            regime,
            n_max: None,
        }),
        Regime::Transient => {
            let mut probs = vec![0.0; x0.k()];
            probs[x0.max_present_label()] = 1.0;
            Ok(FixationPrediction {
                probs,
                regime,
                n_max: None,
            })
        }
        Regime::Recurrent => {
            let mut n_max = N_MAX_START;
            let nu = stationary_truncated(m, n_max)?;
            let mut probs = fixation_from_pgf(x0, |s| pgf(&nu, s));
            loop {
                let next = n_max * 2;
                let nu = stationary_truncated(m, next)?;
                let cand = fixation_from_pgf(x0, |s| pgf(&nu, s));
                let diff = cand
                    .iter()
                    .zip(&probs)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                probs = cand;
                n_max = next;
                if diff < 1e-10 || n_max >= N_MAX_LIMIT {
                    break;
                }
            }
            Ok(FixationPrediction {
                probs,
                regime,
                n_max: Some(n_max),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn model(kappa: f64, sigma: f64, lambda: LambdaMeasure) -> AncestralModel {
        AncestralModel::new(kappa, sigma, vec![(1, 1.0)], lambda).unwrap()
    }

    #[test]
    fn documented_rates() {
        let m = model(0.7, 1.0, LambdaMeasure::PointMass { z0: 0.5, mass: 1.0 });
        assert_eq!(m.rates(1), vec![(2, 0.7)]);
        assert_eq!(
            model(0.0, 1.0, LambdaMeasure::Zero).rates(2),
            vec![(1, 1.0)]
        );
        let m = model(0.0, 0.0, LambdaMeasure::PointMass { z0: 1.0, mass: 1.0 });
        assert_eq!(m.rates(3), vec![(1, 1.0)]);
    }

    #[test]
    fn rates_match_generator_terms() {
        let l = LambdaMeasure::Beta {
            a: 2.0,
            b: 3.0,
            mass: 0.5,
        };
        let m = AncestralModel::new(1.3, 0.4, vec![(1, 0.25), (3, 0.75)], l.clone()).unwrap();
        let n = 6;
        let rates = m.rates(n);
        let get = |t: u64| rates.iter().find(|e| e.0 == t).map_or(0.0, |e| e.1);
        assert!((get(7) - 6.0 * 1.3 * 0.25).abs() < 1e-12);
        assert!((get(9) - 6.0 * 1.3 * 0.75).abs() < 1e-12);
        let k2 = crate::special::binomial(6, 2) * l.lambda_nk(6, 2).unwrap();
        assert!((get(5) - (0.4 * 15.0 + k2)).abs() < 1e-12);
        let k6 = l.lambda_nk(6, 6).unwrap();
        assert!((get(1) - k6).abs() < 1e-12);
    }

    #[test]
    fn pure_death_paths() {
        let m = model(0.0, 1.0, LambdaMeasure::PointMass { z0: 0.3, mass: 1.0 });
        let mut rng = RngStream::new(1, 0);
        for _ in 0..200 {
            let p = simulate_ancestral(&m, 12, 50.0, &mut rng).unwrap();
            assert!(p.states.windows(2).all(|w| w[1] < w[0]));
            assert_eq!(*p.states.last().unwrap(), 1);
        }
    }

    #[test]
    fn kingman_absorption_time() {
        let m = model(0.0, 1.0, LambdaMeasure::Zero);
        let mut rng = RngStream::new(2, 0);
        let times: Vec<f64> = (0..10_000)
            .map(|_| {
                *simulate_ancestral(&m, 10, 1e9, &mut rng)
                    .unwrap()
                    .times
                    .last()
                    .unwrap()
            })
            .collect();
        let (mean, se) = crate::stats::mean_se(&times);
        assert!((mean - 1.8).abs() < 4.0 * se, "{mean} ± {se}");
    }

    #[test]
    fn regimes_and_detector() {
        let l = LambdaMeasure::PointMass { z0: 0.5, mass: 1.0 };
        assert_eq!(
            model(0.0, 0.0, l.clone()).regime().unwrap(),
            Regime::NoSelection
        );
        assert_eq!(
            model(1.0, 0.0, l.clone()).regime().unwrap(),
            Regime::Recurrent
        );
        assert_eq!(
            model(4.0, 0.0, l.clone()).regime().unwrap(),
            Regime::Transient
        );
        assert_eq!(
            model(4.0, 1.0, l.clone()).regime().unwrap(),
            Regime::Recurrent
        );
        let m = model(6.0, 0.0, l).with_n_cap(2_000);
        let err = stationary_and_pgf(&m, 1, 1e6, 0.0, &mut RngStream::new(3, 0)).unwrap_err();
        assert!(matches!(err, Error::Transient { .. }));
    }

    #[test]
    fn absorbed_stationary_law() {
        let m = model(0.0, 1.0, LambdaMeasure::Zero);
        let est = stationary_and_pgf(&m, 5, 100.0, 10.0, &mut RngStream::new(4, 0)).unwrap();
        assert!((est.pgf(0.3).0 - 0.3).abs() < 1e-12);
        assert!((est.pgf(1.0).0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn truncated_solve_matches_explicit_three_state_chain() {
        // increments of 1, truncated at 3: birth-death on {1, 2, 3}
        let m = model(0.05, 1.0, LambdaMeasure::Zero);
        let nu = stationary_truncated(&m, 3).unwrap();
        // balance: ν1·κ = ν2·σ, ν2·2κ = ν3·3σ
        let (k, s) = (0.05, 1.0);
        let r2 = k / s;
        let r3 = r2 * 2.0 * k / (3.0 * s);
        let z = 1.0 + r2 + r3;
        for (a, b) in nu.iter().zip([1.0 / z, r2 / z, r3 / z]) {
            assert!((a - b).abs() < 1e-14);
        }
        let est = stationary_and_pgf(&m, 1, 2e4, 2e3, &mut RngStream::new(5, 0)).unwrap();
        for i in 0..2 {
            assert!((est.occupation[i] - nu[i]).abs() < 4.0 * est.se[i] + 1e-4);
        }
    }

    #[test]
    fn truncated_solve_matches_poisson_law() {
        // σ > 0, Λ = 0, unit increments: ν(n) ∝ θ^n / n!, θ = 2κ/σ
        let (kappa, sigma) = (1.5, 1.0);
        let m = model(kappa, sigma, LambdaMeasure::Zero);
        let nu = stationary_truncated(&m, 60).unwrap();
        let theta = 2.0 * kappa / sigma;
        let phi = |s: f64| ((theta * s).exp() - 1.0) / (theta.exp() - 1.0);
        for s in [0.1, 0.4, 0.8, 1.0] {
            assert!((pgf(&nu, s) - phi(s)).abs() < 1e-12);
        }
        let x0 = SimplexPoint::new(vec![0.3, 0.7]).unwrap();
        let drift = DriftFunction::Transitive {
            kappa,
            pi: vec![(1, 1.0)],
        };
        let pred = fixation_probabilities(&m, &drift, &x0).unwrap();
        assert!((pred.probs[0] - phi(0.3)).abs() < 1e-10);
        assert!((pred.probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fixation_dichotomy() {
        let l = LambdaMeasure::PointMass { z0: 0.5, mass: 1.0 };
        let drift = DriftFunction::Transitive {
            kappa: 4.0,
            pi: vec![(1, 1.0)],
        };
        let m = AncestralModel::from_transitive(&drift, 0.0, l.clone()).unwrap();
        let x0 = SimplexPoint::new(vec![0.9, 0.1, 0.0]).unwrap();
        let p = fixation_probabilities(&m, &drift, &x0).unwrap();
        assert_eq!(p.probs, vec![0.0, 1.0, 0.0]);
        assert_eq!(p.regime, Regime::Transient);

        let neutral = DriftFunction::Transitive {
            kappa: 0.0,
            pi: vec![(1, 1.0)],
        };
        let m0 = AncestralModel::from_transitive(&neutral, 1.0, l.clone()).unwrap();
        assert_eq!(
            fixation_probabilities(&m0, &neutral, &x0).unwrap().probs,
            x0.as_slice()
        );

        let weak = DriftFunction::Transitive {
            kappa: 1.0,
            pi: vec![(1, 1.0)],
        };
        let m1 = AncestralModel::from_transitive(&weak, 0.0, l).unwrap();
        let p1 =
            fixation_probabilities(&m1, &weak, &SimplexPoint::new(vec![0.3, 0.3, 0.4]).unwrap())
                .unwrap();
        assert!((p1.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(p1.probs.iter().all(|&v| v >= 0.0));

        assert!(matches!(
            fixation_probabilities(&m1, &DriftFunction::Rps { kappa: 1.0 }, &x0),
            Err(Error::NonTransitiveDrift(_))
        ));
    }

    #[test]
    fn states_at_matches_path() {
        let m = model(0.5, 1.0, LambdaMeasure::PointMass { z0: 0.5, mass: 1.0 });
        let times = [0.5, 1.0];
        let mut acc_a = [0.0; 2];
        let mut acc_b = [0.0; 2];
        let reps = 20_000;
        let mut rng = RngStream::new(6, 0);
        for _ in 0..reps {
            let s = ancestral_states_at(&m, 2, &times, &mut rng).unwrap();
            let p = simulate_ancestral(&m, 2, 1.0, &mut rng).unwrap();
            for i in 0..2 {
                acc_a[i] += s[i] as f64;
                acc_b[i] += p.state_at(times[i]) as f64;
            }
        }
        for i in 0..2 {
            let (a, b) = (acc_a[i] / reps as f64, acc_b[i] / reps as f64);
            assert!((a - b).abs() < 0.05 * b, "{a} vs {b}");
        }
    }
}
