use lwf_core::stats::ks_two_sample;
use lwf_core::{final_counts, make_schedule, DiscreteModel, ScheduleParams, SdeIntegrator};
use serde_json::json;

use super::{drift, new_report, rule, sde_config, x0, RunOutput};
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::report::Provenance;
use crate::runner::replicates;

/// Asymptotic 95% KS critical constant.
const KS_C: f64 = 1.36;

/// KS distance between the rescaled discrete marginal at `horizon` and the SDE
/// marginal, over the configured population sizes.
pub fn run_convergence(cfg: &Config) -> Result<RunOutput> {
    let (m, e) = (&cfg.model, &cfg.experiment);
    if e.n_grid.len() < 3 {
        return Err(HarnessError::Config(format!(
            "experiment.n_grid needs at least 3 sizes, got {}",
            e.n_grid.len()
        )));
    }
    let mut report = new_report(cfg, "convergence");
    let (rule, drift, x0) = (rule(cfg)?, drift(cfg)?, x0(cfg)?);
    let t = m.horizon;
    let r = e.replicates;
    let sde = SdeIntegrator::new(sde_config(cfg, drift))?;
    let sde_states = replicates(e.seed, 0, r, |_, rng| {
        Ok::<_, HarnessError>(sde.states_at(&x0, &[t], rng)?.remove(0).into_vec())
    })?;

    let mut ks = Vec::with_capacity(e.n_grid.len());
    let mut details = Vec::new();
    for (j, &n) in e.n_grid.iter().enumerate() {
        let mut params = ScheduleParams::new(n, cfg.schedule.alpha, m.kappa, m.sigma);
        params.b = cfg.schedule.b;
        let schedule = make_schedule(&params, &cfg.lambda, &m.tail)?;
        let model = DiscreteModel::from_schedule(&schedule, rule.clone())?;
        let generations = schedule.generations_for(t);
        let disc = replicates(e.seed, 1 + j as u64, r, |_, rng| {
            let c = final_counts(&model, &x0, generations, rng)?;
            Ok::<_, HarnessError>(c.iter().map(|&v| v as f64 / n as f64).collect::<Vec<f64>>())
        })?;
        let d = (0..m.k())
            .map(|i| {
                let a: Vec<f64> = disc.iter().map(|x| x[i]).collect();
                let b: Vec<f64> = sde_states.iter().map(|x| x[i]).collect();
                ks_two_sample(&a, &b)
            })
            .fold(0.0, f64::max);
        report.metric(format!("ks[N={n}]"), d, None, r);
        details.push(json!({
            "n": n,
            "generations": generations,
            "rho": schedule.rho,
            "gamma": schedule.gamma,
            "ks": d,
        }));
        ks.push(d);
    }

    let band = 2.0 * KS_C / (r as f64).sqrt();
    for (j, w) in ks.windows(2).enumerate() {
        let (a, b) = (e.n_grid[j], e.n_grid[j + 1]);
        report.check_below(
            format!("ks nonincreasing N={a} -> N={b}"),
            w[1] - w[0],
            band,
            format!("ks[N={b}] - ks[N={a}] < 2 * {KS_C} / sqrt(R)"),
            Provenance::Harness,
        );
    }
    report.check_below(
        format!("final ks[N={}]", e.n_grid[e.n_grid.len() - 1]),
        ks[ks.len() - 1],
        band,
        format!("ks < 2 * {KS_C} / sqrt(R)"),
        Provenance::Harness,
    );
    report.note("KS distance is the maximum over coordinates of the two-sample statistic");
    report.details = json!({ "grid": details, "sde_dt": m.dt });
    Ok(report.into())
}
