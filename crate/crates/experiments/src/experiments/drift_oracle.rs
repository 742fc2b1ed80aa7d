use lwf_core::{
    empirical_drift, paired, ColouringRule, DiscreteModel, Drift, OffspringLaw, Polynomial,
    RuleKind, Simplex, Term,
};
use rand::Rng;
use serde_json::json;

use super::{drift, new_report, rule, RunOutput};
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::report::{Check, Provenance};
use crate::runner::replicates;

/// Standard errors allowed between estimate and closed form.
const Z: f64 = 4.0;

/// A colouring rule, its sample-size tail and the closed-form drift it should produce.
#[derive(Clone, Debug)]
pub struct Pairing {
    pub label: String,
    pub rule: ColouringRule,
    pub tail: Vec<(usize, f64)>,
    pub drift: Drift,
}

impl Pairing {
    fn new(label: &str, rule: ColouringRule, tail: Vec<(usize, f64)>, kappa: f64) -> Result<Self> {
        let drift = paired(&rule, kappa, &tail).ok_or_else(|| {
            HarnessError::Config(format!("rule `{}` has no closed-form drift", rule.name()))
        })?;
        Ok(Self {
            label: label.into(),
            rule,
            tail,
            drift,
        })
    }
}

fn term(coef: f64, exps: &[u32]) -> Term<f64> {
    Term {
        coef,
        exps: exps.to_vec(),
    }
}

/// Every closed-form drift family, plus two polynomial maps.
pub fn builtin_pairings(kappa: f64) -> Result<Vec<Pairing>> {
    let logistic = vec![
        vec![0.5, 0.2, 0.9],
        vec![0.8, 0.5, 0.35],
        vec![0.1, 0.65, 0.5],
    ];
    // g_1 = 0.1 + 0.8 x_1^2 on two types, written homogeneously; it mutates
    let mutating = Polynomial::new(
        2,
        vec![
            vec![term(0.9, &[2, 0]), term(0.2, &[1, 1]), term(0.1, &[0, 2])],
            vec![term(0.1, &[2, 0]), term(1.8, &[1, 1]), term(0.9, &[0, 2])],
        ],
    )?;
    let r = |k: usize, kind: RuleKind| ColouringRule::new(k, kind);
    Ok(vec![
        Pairing::new("neutral", r(3, RuleKind::Neutral)?, vec![(2, 1.0)], kappa)?,
        Pairing::new(
            "transitive",
            r(3, RuleKind::Transitive)?,
            vec![(2, 0.6), (3, 0.4)],
            kappa,
        )?,
        Pairing::new(
            "logistic",
            r(3, RuleKind::Logistic { p: logistic })?,
            vec![(2, 1.0)],
            kappa,
        )?,
        Pairing {
            label: "rps".into(),
            rule: ColouringRule::rps(),
            tail: vec![(2, 1.0)],
            drift: Drift::Rps { kappa },
        },
        Pairing::new(
            "food web",
            r(
                4,
                RuleKind::PartialOrder {
                    beats: vec![(1, 0), (2, 0), (3, 1), (3, 2), (0, 3)],
                },
            )?,
            vec![(2, 1.0)],
            kappa,
        )?,
        Pairing::new(
            "negative frequency dependence",
            r(3, RuleKind::NegFreqDep)?,
            vec![(3, 1.0)],
            kappa,
        )?,
        Pairing::new(
            "positive frequency dependence",
            r(3, RuleKind::PosFreqDep)?,
            vec![(3, 1.0)],
            kappa,
        )?,
        Pairing::new(
            "polynomial: transitive cube",
            ColouringRule::bernstein(&Polynomial::transitive(3, 3))?,
            vec![(3, 1.0)],
            kappa,
        )?,
        Pairing::new(
            "polynomial: mutating quadratic",
            ColouringRule::bernstein(&mutating)?,
            vec![(2, 1.0)],
            kappa,
        )?,
    ])
}

/// Monte Carlo one-generation drift against the closed forms at random interior points.
pub fn run_drift_oracle(cfg: &Config) -> Result<RunOutput> {
    let (m, e) = (&cfg.model, &cfg.experiment);
    if e.points == 0 || e.samples < 2 {
        return Err(HarnessError::Config(
            "drift-oracle needs points >= 1 and samples >= 2".into(),
        ));
    }
    let pairings = match &cfg.rule {
        Some(_) => vec![Pairing {
            label: "configured".into(),
            rule: rule(cfg)?,
            tail: m.tail.clone(),
            drift: drift(cfg)?,
        }],
        None => builtin_pairings(m.kappa)?,
    };
    let mut report = new_report(cfg, "drift-oracle");
    let mut details = Vec::new();
    for (pi, p) in pairings.iter().enumerate() {
        let k = p.rule.k();
        let q = OffspringLaw::new(0.5, p.tail.clone())?;
        let model = DiscreteModel::new(m.n, q, p.rule.clone(), m.kappa)?;
        let points = replicates(e.seed, 2 * pi as u64, e.points, |_, rng| {
            let w: Vec<f64> = (0..k).map(|_| 0.1 + rng.random::<f64>()).collect();
            Ok::<_, HarnessError>(Simplex::from_weights(w)?)
        })?;
        let estimates = replicates(e.seed, 2 * pi as u64 + 1, e.points, |i, rng| {
            empirical_drift(&model, &points[i as usize], e.samples, rng)
        })?;
        let mut worst: f64 = 0.0;
        let mut rows = Vec::with_capacity(e.points);
        for (x, est) in points.iter().zip(&estimates) {
            let mu = p.drift.eval(x.as_slice());
            for i in 0..k {
                let diff = (est.mean[i] - mu[i]).abs();
                let z = if diff == 0.0 { 0.0 } else { diff / est.se[i] };
                worst = worst.max(z);
            }
            rows.push(
                json!({ "x": x.as_slice(), "estimate": est.mean, "se": est.se, "closed_form": mu }),
            );
        }
        report.metric(
            format!("{}: max |estimate - closed form| / SE", p.label),
            worst,
            None,
            e.points * e.samples,
        );
        report.check(Check {
            name: format!("{} matches {}", p.label, p.drift.name()),
            passed: worst <= Z,
            observed: worst,
            expected: 0.0,
            tolerance: format!(
                "|estimate - closed form| <= {Z} SE at every coordinate of {} points",
                e.points
            ),
            bound: Z,
            provenance: Provenance::Harness,
        });
        details.push(
            json!({ "pairing": p.label, "rule": p.rule.name(), "tail": p.tail, "points": rows }),
        );
    }
    report.note(
        "the estimator averages kappa * (c_z - z / |z|), whose mean is kappa (p^N(x) - x) / rho_N for every N, \
         so there is no N-dependent discrepancy to track",
    );
    report.details = json!(details);
    Ok(report.into())
}
