//! Finite measures Λ on `(0, 1]` driving extreme reproductive events and the
//! jump part of the limit process.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{binomial, ln_beta, ln_binomial, ln_one_minus};

const QUAD_TOL: f64 = 1e-13;

/// Λ variants. Atoms must lie in `(0, 1]`: the Kingman component is carried
/// separately by `sigma`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaMeasure {
    Zero,
    PointMass {
        z0: f64,
        mass: f64,
    },
    /// `mass` times the Beta(a, b) probability law.
    Beta {
        a: f64,
        b: f64,
        mass: f64,
    },
    /// `mass` times Lebesgue measure on `[0, 1]`.
    Uniform {
        mass: f64,
    },
    /// `(z_i, w_i)` pairs.
    FiniteAtoms {
        atoms: Vec<(f64, f64)>,
    },
}

/// κ* = (1/β) ∫ |log(1 - y)| Λ(dy) / y², or the divergence marker.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaStar {
    Finite(f64),
    Infinite,
}

impl KappaStar {
    pub fn is_finite(&self) -> bool {
        matches!(self, KappaStar::Finite(_))
    }

    /// `f64::INFINITY` for the divergent case.
    pub fn value(&self) -> f64 {
        match *self {
            KappaStar::Finite(v) => v,
            KappaStar::Infinite => f64::INFINITY,
        }
    }

    /// The quantity with `log(1 - y)` kept signed, i.e. `-value()`.
    pub fn signed(&self) -> f64 {
        -self.value()
    }
}

impl LambdaMeasure {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            LambdaMeasure::Zero => Ok(()),
            LambdaMeasure::PointMass { z0, mass } => {
                if !(z0 > 0.0 && z0 <= 1.0) {
                    return bad(format!("point mass location {z0} outside (0, 1]"));
                }
                if !(mass > 0.0 && mass.is_finite()) {
                    return bad(format!("point mass weight {mass} must be positive"));
                }
                Ok(())
            }
            LambdaMeasure::Beta { a, b, mass } => {
                if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                    return bad(format!("Beta parameters ({a}, {b}) must be positive"));
                }
                if !(mass > 0.0 && mass.is_finite()) {
                    return bad(format!("Beta mass {mass} must be positive"));
                }
                Ok(())
            }
            LambdaMeasure::Uniform { mass } => {
                if !(mass > 0.0 && mass.is_finite()) {
                    return bad(format!("uniform mass {mass} must be positive"));
                }
                Ok(())
            }
            LambdaMeasure::FiniteAtoms { ref atoms } => {
                if atoms.is_empty() {
                    return bad("finite_atoms needs at least one atom (use zero)".into());
                }
                for &(z, w) in atoms {
                    if !(z > 0.0 && z <= 1.0) || !(w > 0.0 && w.is_finite()) {
                        return bad(format!("atom ({z}, {w}) invalid"));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LambdaMeasure::Zero)
    }

    /// Λ([0, 1]).
    pub fn total_mass(&self) -> f64 {
        match *self {
            LambdaMeasure::Zero => 0.0,
            LambdaMeasure::PointMass { mass, .. }
            | LambdaMeasure::Beta { mass, .. }
            | LambdaMeasure::Uniform { mass } => mass,
            LambdaMeasure::FiniteAtoms { ref atoms } => atoms.iter().map(|a| a.1).sum(),
        }
    }

    /// Atoms `(z, w)` of a purely atomic measure.
    fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match *self {
            LambdaMeasure::Zero => Some(Vec::new()),
            LambdaMeasure::PointMass { z0, mass } => Some(vec![(z0, mass)]),
            LambdaMeasure::FiniteAtoms { ref atoms } => Some(atoms.clone()),
            _ => None,
        }
    }

    /// Beta shape and mass for the absolutely continuous variants.
    fn beta_params(&self) -> Option<(f64, f64, f64)> {
        match *self {
            LambdaMeasure::Beta { a, b, mass } => Some((a, b, mass)),
            LambdaMeasure::Uniform { mass } => Some((1.0, 1.0, mass)),
            _ => None,
        }
    }

    /// ∫_{[lo, 1]} f(y, 1 - y) Λ(dy), by atom sums or quadrature.
    pub fn integrate<F>(&self, f: F, lo: f64) -> f64
    where
        F: Fn(f64, f64) -> f64,
    {
        if let Some(atoms) = self.atoms() {
            return atoms
                .iter()
                .filter(|(z, _)| *z >= lo)
                .map(|&(z, w)| w * f(z, 1.0 - z))
                .sum();
        }
        let (a, b, mass) = self.beta_params().expect("continuous variant");
        let norm = mass * (-ln_beta(a, b)).exp();
        norm * quadrature::integrate(
            |y, _, omy| f(y, omy) * y.powf(a - 1.0) * omy.powf(b - 1.0),
            lo.max(0.0),
            1.0,
            QUAD_TOL,
        )
    }

    /// λ_{nk} = ∫ y^{k-2} (1 - y)^{n-k} Λ(dy), closed form.
    pub fn lambda_nk(&self, n: u64, k: u64) -> Result<f64> {
        check_nk(n, k)?;
        Ok(match *self {
            LambdaMeasure::Zero => 0.0,
            LambdaMeasure::PointMass { z0, mass } => mass * atom_kernel(z0, n, k),
            LambdaMeasure::FiniteAtoms { ref atoms } => {
                atoms.iter().map(|&(z, w)| w * atom_kernel(z, n, k)).sum()
            }
            LambdaMeasure::Uniform { mass } => mass / ((n - 1) as f64 * binomial(n - 2, k - 2)),
            LambdaMeasure::Beta { a, b, mass } => {
                mass * (ln_beta(a + (k - 2) as f64, b + (n - k) as f64) - ln_beta(a, b)).exp()
            }
        })
    }

    /// λ_{nk} evaluated through [`LambdaMeasure::integrate`].
    pub fn lambda_nk_quadrature(&self, n: u64, k: u64) -> Result<f64> {
        check_nk(n, k)?;
        let (pk, pn) = ((k - 2) as i32, (n - k) as i32);
        Ok(self.integrate(|y, omy| y.powi(pk) * omy.powi(pn), 0.0))
    }

    /// Rates `C(n, k) λ_{nk}` of `n -> n - k + 1`, for `k = 2..=n` (index `k - 2`).
    pub fn collision_rates(&self, n: u64) -> Vec<f64> {
        if n < 2 {
            return Vec::new();
        }
        let ks = 2..=n;
        match *self {
            LambdaMeasure::Zero => vec![0.0; (n - 1) as usize],
            LambdaMeasure::Uniform { mass } => {
                ks.map(|k| mass * n as f64 / (k * (k - 1)) as f64).collect()
            }
            LambdaMeasure::Beta { a, b, mass } => {
                let lb = ln_beta(a, b);
                ks.map(|k| {
                    mass * (ln_binomial(n, k) + ln_beta(a + (k - 2) as f64, b + (n - k) as f64)
                        - lb)
                        .exp()
                })
                .collect()
            }
            LambdaMeasure::PointMass { .. } | LambdaMeasure::FiniteAtoms { .. } => {
                let atoms = self.atoms().unwrap();
                ks.map(|k| {
                    atoms
                        .iter()
                        .map(|&(z, w)| w * binomial_pmf(n, k, z) / (z * z))
                        .sum()
                })
                .collect()
            }
        }
    }

    /// Mass at `y = 1`.
    pub fn atom_at_one(&self) -> f64 {
        self.atoms()
            .map(|a| a.iter().filter(|(z, _)| *z == 1.0).map(|a| a.1).sum())
            .unwrap_or(0.0)
    }

    /// κ* with `|log(1 - y)|`; divergent when Λ has an atom at one or when a
    /// Beta density has `a <= 1` (integrand ~ y^{a-2} at the origin).
    pub fn kappa_star(&self, beta: f64) -> Result<KappaStar> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta = {beta} must be positive"
            )));
        }
        if self.atom_at_one() > 0.0 {
            return Ok(KappaStar::Infinite);
        }
        if let Some((a, _, _)) = self.beta_params() {
            if a <= 1.0 {
                return Ok(KappaStar::Infinite);
            }
        }
        let integral = self.integrate(|y, omy| -ln_one_minus(y, omy) / (y * y), 0.0);
        Ok(KappaStar::Finite(integral / beta))
    }

    /// ∫_{[eps, 1]} Λ(dz) / z².
    pub fn truncated_rate(&self, eps: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.integrate(|z, _| 1.0 / (z * z), eps)
    }

    /// Λ([0, eps)), the mass whose jumps a truncation at `eps` drops.
    pub fn mass_below(&self, eps: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        self.total_mass() - self.integrate(|_, _| 1.0, eps)
    }
}

fn check_nk(n: u64, k: u64) -> Result<()> {
    if k < 2 || k > n {
        return Err(Error::CollisionIndex { n, k });
    }
    Ok(())
}

#[inline]
fn atom_kernel(z: f64, n: u64, k: u64) -> f64 {
    z.powi((k - 2) as i32) * (1.0 - z).powi((n - k) as i32)
}

fn binomial_pmf(n: u64, k: u64, z: f64) -> f64 {
    if z >= 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_binomial(n, k) + k as f64 * z.ln() + (n - k) as f64 * (-z).ln_1p()).exp()
}

/// The normalized law of Λ(dz)/z² restricted to `[eps, 1]`, with its total rate.
#[derive(Clone, Debug)]
pub struct JumpLaw {
    rate: f64,
    threshold: f64,
    sampler: Sampler,
}

#[derive(Clone, Debug)]
enum Sampler {
    Empty,
    Atoms { zs: Vec<f64>, cum: Vec<f64> },
    Continuous(PiecewiseBeta),
}

impl JumpLaw {
    pub fn new(lambda: &LambdaMeasure, eps: f64) -> Result<Self> {
        lambda.validate()?;
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "jump threshold {eps} outside (0, 1)"
            )));
        }
        let rate = lambda.truncated_rate(eps);
        let sampler = if rate <= 0.0 {
            Sampler::Empty
        } else if let Some(atoms) = lambda.atoms() {
            let mut zs = Vec::new();
            let mut cum = Vec::new();
            let mut acc = 0.0;
            for (z, w) in atoms.into_iter().filter(|(z, _)| *z >= eps) {
                acc += w / (z * z);
                zs.push(z);
                cum.push(acc);
            }
            Sampler::Atoms { zs, cum }
        } else {
            let (a, b, _) = lambda.beta_params().unwrap();
            Sampler::Continuous(PiecewiseBeta::new(a, b, eps))
        };
        Ok(Self {
            rate,
            threshold: eps,
            sampler,
        })
    }

    /// ∫_{[eps, 1]} Λ(dz)/z².
    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn is_empty(&self) -> bool {
        matches!(self.sampler, Sampler::Empty)
    }

    /// Draws an event size `z`. Panics on an empty law.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.sampler {
            Sampler::Empty => panic!("sampling from an empty jump law"),
            Sampler::Atoms { zs, cum } => {
                let u = rng.random::<f64>() * cum[cum.len() - 1];
                let i = cum.partition_point(|&c| c <= u).min(zs.len() - 1);
                zs[i]
            }
            Sampler::Continuous(p) => p.sample(rng),
        }
    }
}

/// Exact sampler for the density ∝ z^{a-3} (1 - z)^{b-1} on `[lo, 1]`.
///
/// The interval is split at `max(lo, 1/2)`; the left piece uses a power-law
/// proposal in `z`, the right piece a power-law proposal in `1 - z`, each
/// corrected by rejection with a bounded ratio.
#[derive(Clone, Debug)]
struct PiecewiseBeta {
    a: f64,
    b: f64,
    lo: f64,
    split: f64,
    p_left: f64,
    left_bound: f64,
    right_bound: f64,
}

impl PiecewiseBeta {
    fn new(a: f64, b: f64, lo: f64) -> Self {
        let split = lo.max(0.5);
        let dens = |z: f64, omz: f64| z.powf(a - 3.0) * omz.powf(b - 1.0);
        let left = if split > lo {
            quadrature::integrate(|z, _, _| dens(z, 1.0 - z), lo, split, QUAD_TOL)
        } else {
            0.0
        };
        let right = quadrature::integrate(|z, _, omz| dens(z, omz), split, 1.0, QUAD_TOL);
        let left_bound = if b >= 1.0 {
            (1.0 - lo).powf(b - 1.0)
        } else {
            (1.0 - split).powf(b - 1.0)
        };
        let right_bound = if a >= 3.0 { 1.0 } else { split.powf(a - 3.0) };
        Self {
            a,
            b,
            lo,
            split,
            p_left: left / (left + right),
            left_bound,
            right_bound,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // pick the piece once; rejection retries stay within it
        if rng.random::<f64>() < self.p_left {
            self.sample_left(rng)
        } else {
            self.sample_right(rng)
        }
    }

    /// Proposal `z^{a-3}` on `[lo, split]`, accepted with `(1 - z)^{b-1} / bound`.
    fn sample_left<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = self.a - 2.0;
        loop {
            let u: f64 = rng.random();
            let z = if p.abs() < 1e-12 {
                self.lo * (self.split / self.lo).powf(u)
            } else {
                let (l, s) = (self.lo.powf(p), self.split.powf(p));
                (l + u * (s - l)).powf(1.0 / p)
            };
            let z = z.clamp(self.lo, self.split);
            if rng.random::<f64>() * self.left_bound <= (1.0 - z).powf(self.b - 1.0) {
                return z;
            }
        }
    }

    /// Proposal `(1 - z)^{b-1}` on `[split, 1]`, accepted with `z^{a-3} / bound`.
    fn sample_right<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let u: f64 = 1.0 - rng.random::<f64>();
            let z = 1.0 - (1.0 - self.split) * u.powf(1.0 / self.b);
            if z < self.split || z >= 1.0 {
                continue;
            }
            if rng.random::<f64>() * self.right_bound <= z.powf(self.a - 3.0) {
                return z;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use approx::assert_relative_eq;

    #[test]
    fn total_masses() {
        assert_eq!(LambdaMeasure::Zero.total_mass(), 0.0);
        assert_eq!(
            LambdaMeasure::PointMass { z0: 0.5, mass: 2.0 }.total_mass(),
            2.0
        );
        let atoms = LambdaMeasure::FiniteAtoms {
            atoms: vec![(0.2, 0.3), (0.9, 0.7)],
        };
        assert_relative_eq!(atoms.total_mass(), 1.0);
        assert_eq!(
            LambdaMeasure::Beta {
                a: 2.0,
                b: 2.0,
                mass: 3.0
            }
            .total_mass(),
            3.0
        );
    }

    #[test]
    fn lambda_nk_examples() {
        let pm1 = LambdaMeasure::PointMass { z0: 1.0, mass: 1.0 };
        assert_eq!(pm1.lambda_nk(3, 3).unwrap(), 1.0);
        assert_eq!(pm1.lambda_nk(3, 2).unwrap(), 0.0);
        let u = LambdaMeasure::Uniform { mass: 1.0 };
        assert_relative_eq!(u.lambda_nk(4, 2).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert!(u.lambda_nk(4, 1).is_err());
        assert!(u.lambda_nk(4, 5).is_err());
    }

    #[test]
    fn kappa_star_examples() {
        let pm = LambdaMeasure::PointMass { z0: 0.5, mass: 1.0 };
        assert_relative_eq!(
            pm.kappa_star(1.0).unwrap().value(),
            4.0 * 2f64.ln(),
            max_relative = 1e-14
        );
        assert_eq!(
            LambdaMeasure::Zero.kappa_star(1.0).unwrap(),
            KappaStar::Finite(0.0)
        );
        assert_eq!(
            LambdaMeasure::PointMass { z0: 1.0, mass: 1.0 }
                .kappa_star(1.0)
                .unwrap(),
            KappaStar::Infinite
        );
        assert_eq!(
            LambdaMeasure::Uniform { mass: 1.0 }
                .kappa_star(1.0)
                .unwrap(),
            KappaStar::Infinite
        );
        assert!(pm.kappa_star(1.0).unwrap().signed() < 0.0);
    }

    #[test]
    fn kappa_star_beta_matches_series() {
        // a = 3, b = 1: ∫ -log(1-y) * 3 y^2 / y^2 dy = 3
        let l = LambdaMeasure::Beta {
            a: 3.0,
            b: 1.0,
            mass: 1.0,
        };
        assert_relative_eq!(
            l.kappa_star(1.0).unwrap().value(),
            3.0,
            max_relative = 1e-11
        );
    }

    #[test]
    fn collision_rates_match_lambda_nk() {
        for l in [
            LambdaMeasure::PointMass { z0: 0.3, mass: 1.5 },
            LambdaMeasure::Beta {
                a: 0.7,
                b: 1.8,
                mass: 2.0,
            },
            LambdaMeasure::Uniform { mass: 0.5 },
        ] {
            let rates = l.collision_rates(9);
            for k in 2..=9u64 {
                let direct = binomial(9, k) * l.lambda_nk(9, k).unwrap();
                assert_relative_eq!(rates[(k - 2) as usize], direct, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn truncated_rate_and_mass_below() {
        let pm = LambdaMeasure::PointMass { z0: 0.5, mass: 1.0 };
        assert_eq!(pm.truncated_rate(0.1), 4.0);
        assert_eq!(pm.truncated_rate(0.6), 0.0);
        let u = LambdaMeasure::Uniform { mass: 1.0 };
        assert_relative_eq!(u.truncated_rate(0.1), 9.0, max_relative = 1e-12);
        assert_relative_eq!(u.mass_below(0.1), 0.1, max_relative = 1e-10);
    }

    fn ks_against_cdf(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = samples.len() as f64;
        samples
            .iter()
            .enumerate()
            .map(|(i, &s)| {
                let f = cdf(s);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn continuous_jump_sampler_matches_cdf() {
        for (a, b) in [(1.0, 1.0), (0.5, 0.6), (2.0, 3.0), (4.0, 0.5)] {
            let l = LambdaMeasure::Beta { a, b, mass: 1.0 };
            let eps = 0.05;
            let law = JumpLaw::new(&l, eps).unwrap();
            let mut rng = RngStream::new(99, 0);
            let mut s: Vec<f64> = (0..40_000).map(|_| law.sample(&mut rng)).collect();
            assert!(s.iter().all(|&z| z >= eps && z <= 1.0));
            let total = l.truncated_rate(eps);
            let cdf = |z: f64| (total - l.truncated_rate(z)) / total;
            let d = ks_against_cdf(&mut s, cdf);
            // 1.95 / sqrt(n) is the 0.1% KS critical value
            assert!(d < 1.95 / 200.0, "a={a} b={b} D={d}");
        }
    }

    #[test]
    fn atom_jump_sampler_weights() {
        let l = LambdaMeasure::FiniteAtoms {
            atoms: vec![(0.5, 1.0), (0.25, 1.0), (0.01, 5.0)],
        };
        let law = JumpLaw::new(&l, 0.1).unwrap();
        assert_relative_eq!(law.rate(), 4.0 + 16.0);
        let mut rng = RngStream::new(1, 1);
        let n = 100_000;
        let hits = (0..n).filter(|_| law.sample(&mut rng) == 0.5).count() as f64 / n as f64;
        assert!((hits - 0.2).abs() < 4.0 * (0.2f64 * 0.8 / n as f64).sqrt());
    }

    #[test]
    fn serde_shape() {
        let l: LambdaMeasure =
            serde_json::from_str(r#"{"kind":"point_mass","z0":0.5,"mass":1.0}"#).unwrap();
        assert_eq!(l, LambdaMeasure::PointMass { z0: 0.5, mass: 1.0 });
        assert!(serde_json::from_str::<LambdaMeasure>(
            r#"{"kind":"beta","a":1,"b":1,"mass":1,"c":0}"#
        )
        .is_err());
        let a: LambdaMeasure =
            serde_json::from_str(r#"{"kind":"finite_atoms","atoms":[[0.2,0.3],[0.9,0.7]]}"#)
                .unwrap();
        assert_relative_eq!(a.total_mass(), 1.0);
    }
}
