use lwf_core::stats::{mean_se, Z99};
use lwf_core::{
    fixation_probabilities, stationary_and_pgf, AncestralModel, Drift, Regime, RngStream,
    SdeIntegrator,
};
use serde_json::json;

use super::{drift, new_report, sde_config, x0, RunOutput};
use crate::config::Config;
use crate::error::Result;
use crate::report::{Check, Provenance};
use crate::runner::{replicates, stream_id};

/// SDE replicates run to fixation, compared with the fixation law predicted by
/// the ancestral process (or the initial frequencies in the neutral case).
pub fn run_fixation(cfg: &Config) -> Result<RunOutput> {
    let (m, e) = (&cfg.model, &cfg.experiment);
    let mut report = new_report(cfg, "fixation");
    let (drift, x0) = (drift(cfg)?, x0(cfg)?);
    let k = m.k();
    let r = e.replicates;
    let sde = SdeIntegrator::new(sde_config(cfg, drift.clone()))?;
    if let Some(w) = sde.warning() {
        report.note(w);
    }
    let runs = replicates(e.seed, 0, r, |_, rng| {
        sde.run_to_fixation(&x0, m.max_time, rng)
    })?;

    let mut wins = vec![0usize; k];
    let mut unfixed = 0;
    let mut times = Vec::with_capacity(r);
    for run in &runs {
        match run.allele {
            Some(i) => {
                wins[i] += 1;
                times.push(run.time);
            }
            None => unfixed += 1,
        }
    }
    let clamps: u64 = runs.iter().map(|run| run.clamps).sum();
    let rf = r as f64;
    let p_hat: Vec<f64> = wins.iter().map(|&w| w as f64 / rf).collect();
    let se_hat: Vec<f64> = p_hat.iter().map(|&p| (p * (1.0 - p) / rf).sqrt()).collect();
    for i in 0..k {
        report.metric(format!("fixation[{i}]"), p_hat[i], Some(se_hat[i]), r);
    }
    let (t_mean, t_se) = mean_se(&times);
    report.metric("fixation time", t_mean, Some(t_se), times.len());
    report.metric("clamped coordinates", clamps as f64, None, r);
    report.check(Check {
        name: "every replicate fixes".into(),
        passed: unfixed == 0,
        observed: (r - unfixed) as f64,
        expected: rf,
        tolerance: format!("all {r} replicates fixed before t = {}", m.max_time),
        bound: 0.0,
        provenance: Provenance::Theory,
    });

    let mut details = json!({ "wins": wins, "unfixed": unfixed });
    match &drift {
        Drift::Neutral => {
            details["branch"] = json!("neutral");
            for i in 0..k {
                let p = x0.get(i);
                report.check_within(
                    format!("fixation[{i}] in 99% binomial CI of x0"),
                    p_hat[i],
                    p,
                    (p * (1.0 - p) / rf).sqrt(),
                    Z99,
                    0.0,
                    Provenance::Harness,
                );
            }
        }
        Drift::Transitive { .. } => {
            let am = AncestralModel::from_transitive(&drift, m.sigma, cfg.lambda.clone())?;
            let pred = fixation_probabilities(&am, &drift, &x0)?;
            details["branch"] = json!(pred.regime);
            details["kappa_star"] = json!(am.kappa_star()?.value());
            match pred.regime {
                Regime::Transient => {
                    let top = x0.max_present_label();
                    report.check(Check {
                        name: format!("maximal present label {top} fixes"),
                        passed: wins[top] == r,
                        observed: wins[top] as f64,
                        expected: rf,
                        tolerance: format!("allele {top} fixes in all {r} replicates"),
                        bound: 0.0,
                        provenance: Provenance::Theory,
                    });
                }
                Regime::NoSelection | Regime::Recurrent => {
                    for i in 0..k {
                        report.metric(
                            format!("predicted[{i}] (truncated chain)"),
                            pred.probs[i],
                            None,
                            0,
                        );
                    }
                    details["n_max"] = json!(pred.n_max);
                    if e.stationary_time > 0.0 {
                        let burn_in = e.burn_in_fraction * e.stationary_time;
                        let mut rng = RngStream::new(e.seed, stream_id(1, 0));
                        let est =
                            stationary_and_pgf(&am, m.n0, e.stationary_time, burn_in, &mut rng)?;
                        let mut cum = 0.0;
                        let mut prev = est.pgf(0.0);
                        for i in 0..k {
                            cum += x0.get(i);
                            let cur = if i + 1 == k {
                                est.pgf(1.0)
                            } else {
                                est.pgf(cum.min(1.0))
                            };
                            let (mc, mc_se) =
                                (cur.0 - prev.0, (cur.1 * cur.1 + prev.1 * prev.1).sqrt());
                            prev = cur;
                            report.metric(
                                format!("predicted[{i}] (stationary Monte Carlo)"),
                                mc,
                                Some(mc_se),
                                0,
                            );
                            let se = (se_hat[i] * se_hat[i] + mc_se * mc_se).sqrt();
                            report.check_within(
                                format!("fixation[{i}] vs pgf increment"),
                                p_hat[i],
                                mc,
                                se,
                                4.0,
                                0.0,
                                Provenance::Harness,
                            );
                        }
                        details["stationary"] = json!({
                            "total_time": est.total_time,
                            "burn_in": est.burn_in,
                            "n_max": est.n_max(),
                        });
                    } else {
                        for i in 0..k {
                            report.check_within(
                                format!("fixation[{i}] vs pgf increment"),
                                p_hat[i],
                                pred.probs[i],
                                se_hat[i],
                                4.0,
                                0.0,
                                Provenance::Harness,
                            );
                        }
                    }
                }
            }
        }
        other => {
            report.note(format!(
                "no fixation law is available for drift `{}`",
                other.name()
            ));
        }
    }
    if m.tol_ext > 0.0 {
        report.note(format!(
            "coordinates below {} are clamped to zero",
            m.tol_ext
        ));
    }
    report.details = details;
    Ok(report.into())
}
