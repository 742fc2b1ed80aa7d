//! Scaling schedules tying N to rho_N, gamma_N and the truncated Λ.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lambda::{JumpLaw, LambdaMeasure};
use crate::offspring::OffspringLaw;

/// Inputs of [`make_schedule`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScheduleParams {
    pub n: u64,
    pub alpha: f64,
    pub kappa: f64,
    pub sigma: f64,
    /// Exponent of `rho_N = N^{-b}` when `sigma = 0`; defaults to `(2 alpha + 1) / 2`.
    pub b: Option<f64>,
}

impl ScheduleParams {
    pub fn new(n: u64, alpha: f64, kappa: f64, sigma: f64) -> Self {
        Self {
            n,
            alpha,
            kappa,
            sigma,
            b: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingSchedule {
    pub n: u64,
    pub alpha: f64,
    pub kappa: f64,
    pub sigma: f64,
    /// The exponent actually used when `sigma = 0`.
    pub b: Option<f64>,
    pub rho: f64,
    pub gamma: f64,
    /// Set when `gamma_N` had to be clamped to 1.
    pub gamma_clamped: bool,
    /// `N^{-alpha}`, the smallest extreme-event size kept.
    pub truncation: f64,
    /// Λ^α_N([0, 1]) = ∫_{z >= N^{-alpha}} Λ(dz)/z².
    pub truncated_mass: f64,
    pub offspring: OffspringLaw,
    #[serde(skip)]
    jump_law: JumpLaw,
}

impl ScalingSchedule {
    /// Λ̂^α_N, the normalized extreme-event size law.
    pub fn event_law(&self) -> &JumpLaw {
        &self.jump_law
    }

    /// Generations per unit of rescaled time, `kappa / rho_N`.
    pub fn generations_per_unit_time(&self) -> f64 {
        self.kappa / self.rho
    }

    /// `floor(kappa t / rho_N)`.
    pub fn generations_for(&self, t: f64) -> u64 {
        (self.kappa * t / self.rho + 1e-9).floor() as u64
    }
}

/// Builds the schedule; `tail` is the sample-size law conditional on `K > 1`.
pub fn make_schedule(
    params: &ScheduleParams,
    lambda: &LambdaMeasure,
    tail: &[(usize, f64)],
) -> Result<ScalingSchedule> {
    let ScheduleParams {
        n,
        alpha,
        kappa,
        sigma,
        b,
    } = *params;
    lambda.validate()?;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("N = {n} must be >= 2")));
    }
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside (0, 1/2)"
        )));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "kappa = {kappa} must be positive"
        )));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "sigma = {sigma} must be >= 0"
        )));
    }
    let nf = n as f64;
    let (rho, b_used, rho_min) = if sigma > 0.0 {
        if b.is_some() {
            return Err(Error::InvalidParameter(
                "exponent b only applies when sigma = 0".into(),
            ));
        }
        let rho = kappa / (sigma * nf);
        (rho, None, rho)
    } else {
        let b = b.unwrap_or((2.0 * alpha + 1.0) / 2.0);
        if !(b > 2.0 * alpha && b < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "b = {b} outside (2 alpha, 1)"
            )));
        }
        (nf.powf(-b), Some(b), 1.0 / nf)
    };
    if rho > 1.0 {
        return Err(Error::InvalidParameter(format!(
            "rho_N = {rho} exceeds 1 (N too small for kappa / sigma)"
        )));
    }
    let truncation = nf.powf(-alpha);
    let truncated_mass = lambda.truncated_rate(truncation);
    let raw_gamma = truncated_mass * rho / kappa;
    let (gamma, gamma_clamped) = if raw_gamma > 1.0 {
        let best = truncated_mass * rho_min / kappa;
        if best > 1.0 {
            return Err(Error::InfeasibleSchedule { n, gamma: best });
        }
        (1.0, true)
    } else {
        (raw_gamma, false)
    };
    let offspring = OffspringLaw::new(rho, tail.to_vec())?;
    let jump_law = JumpLaw::new(lambda, truncation.min(1.0 - f64::EPSILON))?;
    Ok(ScalingSchedule {
        n,
        alpha,
        kappa,
        sigma,
        b: b_used,
        rho,
        gamma,
        gamma_clamped,
        truncation,
        truncated_mass,
        offspring,
        jump_law,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const TAIL: [(usize, f64); 1] = [(2, 1.0)];

    #[test]
    fn no_extreme_events() {
        let s = make_schedule(
            &ScheduleParams::new(10_000, 0.25, 1.0, 1.0),
            &LambdaMeasure::Zero,
            &TAIL,
        )
        .unwrap();
        assert_eq!(s.gamma, 0.0);
        assert_relative_eq!(s.rho, 1e-4);
    }

    #[test]
    fn point_mass_schedule() {
        let l = LambdaMeasure::PointMass { z0: 0.5, mass: 1.0 };
        let s = make_schedule(&ScheduleParams::new(10_000, 0.25, 1.0, 1.0), &l, &TAIL).unwrap();
        assert_relative_eq!(s.rho, 1e-4);
        assert_relative_eq!(s.truncation, 0.1, max_relative = 1e-12);
        assert_eq!(s.truncated_mass, 4.0);
        assert_relative_eq!(s.gamma, 4e-4, max_relative = 1e-12);
        assert!(!s.gamma_clamped);
    }

    #[test]
    fn b_rule() {
        let mut p = ScheduleParams::new(100, 0.25, 1.0, 0.0);
        p.b = Some(0.75);
        let s = make_schedule(&p, &LambdaMeasure::Zero, &TAIL).unwrap();
        assert_relative_eq!(s.rho, 100f64.powf(-0.75), max_relative = 1e-14);
        assert_relative_eq!(s.rho, 0.0316, max_relative = 1e-2);
        // N rho_N -> infinity and rho_N N^{2 alpha} -> 0 along a grid
        let mut prev = (0.0, f64::INFINITY);
        for n in [1e2, 1e4, 1e6, 1e8] {
            let s = make_schedule(
                &ScheduleParams {
                    n: n as u64,
                    ..p.clone()
                },
                &LambdaMeasure::Zero,
                &TAIL,
            )
            .unwrap();
            let (up, down) = (n * s.rho, s.rho * n.powf(0.5));
            assert!(up > prev.0 && down < prev.1);
            prev = (up, down);
        }
        let d = make_schedule(
            &ScheduleParams::new(100, 0.25, 1.0, 0.0),
            &LambdaMeasure::Zero,
            &TAIL,
        )
        .unwrap();
        assert_eq!(d.b, Some(0.75));
    }

    #[test]
    fn infeasible_when_gamma_too_large() {
        let l = LambdaMeasure::PointMass {
            z0: 0.5,
            mass: 100.0,
        };
        let err = make_schedule(&ScheduleParams::new(100, 0.25, 1.0, 1.0), &l, &TAIL).unwrap_err();
        assert!(matches!(err, Error::InfeasibleSchedule { .. }));
        // sigma = 0 admits a smaller rho: clamp instead of failing
        let l = LambdaMeasure::PointMass {
            z0: 0.5,
            mass: 10.0,
        };
        let s = make_schedule(&ScheduleParams::new(100, 0.25, 1.0, 0.0), &l, &TAIL).unwrap();
        assert!(s.gamma_clamped);
        assert_eq!(s.gamma, 1.0);
    }

    #[test]
    fn truncated_mass_nondecreasing_in_n() {
        let l = LambdaMeasure::Beta {
            a: 1.5,
            b: 2.0,
            mass: 1.0,
        };
        let mut prev = 0.0;
        for n in [10u64, 100, 1_000, 10_000, 100_000] {
            let s = make_schedule(&ScheduleParams::new(n, 0.25, 1.0, 0.0), &l, &TAIL);
            let m = match s {
                Ok(s) => s.truncated_mass,
                Err(_) => l.truncated_rate((n as f64).powf(-0.25)),
            };
            assert!(m >= prev);
            prev = m;
        }
    }
}
