use lwf_core::stats::mean_se;
use lwf_core::SdeIntegrator;
use serde_json::json;

use super::{drift, new_report, sde_config, x0, RunOutput};
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::report::{Check, Provenance};
use crate::runner::replicates;

/// Minimum fraction of replicates whose extinctions are all separated.
const MIN_FRACTION: f64 = 0.99;

/// Pure-diffusion replicates run to fixation; alleles should die out one at a time.
pub fn run_successive_extinction(cfg: &Config) -> Result<RunOutput> {
    let (m, e) = (&cfg.model, &cfg.experiment);
    if !cfg.lambda.is_zero() || m.sigma <= 0.0 {
        return Err(HarnessError::Config(
            "successive-extinction needs a pure diffusion: lambda = zero and sigma > 0".into(),
        ));
    }
    let mut report = new_report(cfg, "successive-extinction");
    let (drift, x0) = (drift(cfg)?, x0(cfg)?);
    let present = x0.support().count();
    let sde = SdeIntegrator::new(sde_config(cfg, drift))?;
    let r = e.replicates;
    let runs = replicates(e.seed, 0, r, |_, rng| {
        sde.run_to_fixation(&x0, m.max_time, rng)
    })?;

    let mut fixed = 0;
    let mut successive = 0;
    let mut gaps = Vec::new();
    for run in &runs {
        if run.allele.is_some() {
            fixed += 1;
        }
        let mut t: Vec<f64> = run.extinctions.iter().map(|x| x.time).collect();
        t.sort_by(f64::total_cmp);
        let separated = t.windows(2).all(|w| w[1] - w[0] > m.dt);
        if run.allele.is_some() && t.len() == present - 1 && separated {
            successive += 1;
        }
        gaps.extend(t.windows(2).map(|w| w[1] - w[0]));
    }
    let clamps: u64 = runs.iter().map(|run| run.clamps).sum();
    let frac = successive as f64 / r as f64;
    report.metric(
        "fraction with separated extinctions",
        frac,
        Some((frac * (1.0 - frac) / r as f64).sqrt()),
        r,
    );
    if !gaps.is_empty() {
        let (g, g_se) = mean_se(&gaps);
        report.metric("mean gap between extinctions", g, Some(g_se), gaps.len());
    }
    report.metric("clamped coordinates", clamps as f64, None, r);
    report.check(Check {
        name: "every replicate fixes".into(),
        passed: fixed == r,
        observed: fixed as f64,
        expected: r as f64,
        tolerance: format!("all {r} replicates fixed before t = {}", m.max_time),
        bound: 0.0,
        provenance: Provenance::Theory,
    });
    report.check(Check {
        name: format!(
            "{} distinct extinction times separated by more than dt",
            present - 1
        ),
        passed: frac >= MIN_FRACTION,
        observed: frac,
        expected: MIN_FRACTION,
        tolerance: format!("fraction >= {MIN_FRACTION}"),
        bound: MIN_FRACTION,
        provenance: Provenance::Harness,
    });
    report.note(format!(
        "extinction times are resolved to the step dt = {}; coordinates below tol_ext = {} are clamped",
        m.dt, m.tol_ext
    ));
    report.details = json!({ "fixed": fixed, "successive": successive });
    Ok(report.into())
}
