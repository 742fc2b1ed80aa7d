use lwf_core::stats::mean_se;
use lwf_core::{
    ancestral_states_at, AncestralModel, Drift, LambdaMeasure, SdeConfig, SdeIntegrator, Simplex,
};
use serde_json::json;

use super::{drift, new_report, RunOutput};
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::report::{Check, ExperimentReport, Provenance};
use crate::runner::replicates;

/// Relative tolerance of the moment-ODE cell.
const ODE_REL_TOL: f64 = 0.05;

/// Moment duality `E[X_1(t)^n] = E[x^{D_t}]` between the weakest allele's
/// frequency and the ancestral process, in three kinds of cells.
pub fn run_duality(cfg: &Config) -> Result<RunOutput> {
    let (m, e) = (&cfg.model, &cfg.experiment);
    if e.times.is_empty() || e.xs.is_empty() || e.n0s.is_empty() {
        return Err(HarnessError::Config(
            "experiment.times, xs and n0s must be nonempty".into(),
        ));
    }
    if e.times.iter().any(|&t| !(t >= 0.0)) || e.xs.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
        return Err(HarnessError::Config(
            "duality times must be >= 0 and xs in [0, 1]".into(),
        ));
    }
    if e.n0s.contains(&0) {
        return Err(HarnessError::Config("experiment.n0s must be >= 1".into()));
    }
    let mut report = new_report(cfg, "duality");
    let mut times = e.times.clone();
    times.sort_by(f64::total_cmp);
    let t_max = times[times.len() - 1];
    let x = e.xs[0];
    let mut cells = Vec::new();
    martingale_cell(cfg, x, t_max, &mut report, &mut cells)?;
    moment_ode_cell(cfg, x, t_max, &mut report, &mut cells)?;
    transitive_cells(cfg, &times, &mut report, &mut cells)?;
    report.note(format!("SDE side uses Euler-Maruyama with dt = {}", m.dt));
    report.details = json!({ "cells": cells });
    Ok(report.into())
}

fn two_type_sde(
    cfg: &Config,
    drift: Drift,
    lambda: LambdaMeasure,
    horizon: f64,
) -> Result<SdeIntegrator> {
    let m = &cfg.model;
    let c = SdeConfig::new(2, drift, m.sigma, lambda, m.dt, horizon).with_eps_jump(m.eps_jump);
    Ok(SdeIntegrator::new(c)?)
}

/// Samples of the weakest allele's frequency at each of `times`.
fn sde_samples(
    cfg: &Config,
    sde: &SdeIntegrator,
    x: f64,
    times: &[f64],
    sub_run: u64,
) -> Result<Vec<Vec<f64>>> {
    let x0 = Simplex::new(vec![x, 1.0 - x])?;
    replicates(
        cfg.experiment.seed,
        sub_run,
        cfg.experiment.replicates,
        |_, rng| {
            let s = sde.states_at(&x0, times, rng)?;
            Ok::<_, HarnessError>(s.iter().map(|p| p.get(0)).collect::<Vec<f64>>())
        },
    )
}

/// Samples of `D_t` at each of `times`.
fn dual_samples(
    cfg: &Config,
    am: &AncestralModel,
    n0: u64,
    times: &[f64],
    sub_run: u64,
) -> Result<Vec<Vec<u64>>> {
    replicates(
        cfg.experiment.seed,
        sub_run,
        cfg.experiment.replicates,
        |_, rng| Ok::<_, HarnessError>(ancestral_states_at(am, n0, times, rng)?),
    )
}

fn moment(samples: &[Vec<f64>], j: usize, n: u64) -> (f64, f64) {
    let v: Vec<f64> = samples.iter().map(|s| s[j].powi(n as i32)).collect();
    mean_se(&v)
}

fn dual_moment(samples: &[Vec<u64>], j: usize, x: f64) -> (f64, f64) {
    let v: Vec<f64> = samples.iter().map(|s| x.powi(s[j] as i32)).collect();
    mean_se(&v)
}

/// Neutral, `n0 = 1`: `E[X(t)] = x` and `D_t = 1`.
fn martingale_cell(
    cfg: &Config,
    x: f64,
    t: f64,
    report: &mut ExperimentReport,
    cells: &mut Vec<serde_json::Value>,
) -> Result<()> {
    let sde = two_type_sde(cfg, Drift::Neutral, cfg.lambda.clone(), t)?;
    let fwd = sde_samples(cfg, &sde, x, &[t], 0)?;
    let (a, a_se) = moment(&fwd, 0, 1);
    let am = AncestralModel::new(0.0, cfg.model.sigma, vec![(1, 1.0)], cfg.lambda.clone())?;
    let dual = dual_samples(cfg, &am, 1, &[t], 1)?;
    let (b, _) = dual_moment(&dual, 0, x);
    report.check_within(
        "martingale cell: E[X(t)] = x",
        a,
        x,
        a_se,
        4.0,
        0.0,
        Provenance::Harness,
    );
    report.check(Check {
        name: "martingale cell: E[x^D_t] = x".into(),
        passed: (b - x).abs() <= 1e-12,
        observed: b,
        expected: x,
        tolerance: "|observed - expected| <= 1e-12".into(),
        bound: 1e-12,
        provenance: Provenance::Theory,
    });
    cells.push(
        json!({ "cell": "martingale", "n0": 1, "t": t, "x": x, "sde": [a, a_se], "dual": b }),
    );
    Ok(())
}

/// Neutral pure diffusion, `n0 = 2`: `E[X(t)^2] = x - (x - x^2) e^{-sigma t}`.
fn moment_ode_cell(
    cfg: &Config,
    x: f64,
    t: f64,
    report: &mut ExperimentReport,
    cells: &mut Vec<serde_json::Value>,
) -> Result<()> {
    let sigma = cfg.model.sigma;
    let exact = x - (x - x * x) * (-sigma * t).exp();
    let sde = two_type_sde(cfg, Drift::Neutral, LambdaMeasure::Zero, t)?;
    let fwd = sde_samples(cfg, &sde, x, &[t], 2)?;
    let (a, a_se) = moment(&fwd, 0, 2);
    let am = AncestralModel::new(0.0, sigma, vec![(1, 1.0)], LambdaMeasure::Zero)?;
    let dual = dual_samples(cfg, &am, 2, &[t], 3)?;
    let (b, b_se) = dual_moment(&dual, 0, x);
    for (side, v) in [("E[X(t)^2]", a), ("E[x^D_t]", b)] {
        report.check(Check {
            name: format!("moment-ODE cell: {side}"),
            passed: (v - exact).abs() <= ODE_REL_TOL * exact.abs(),
            observed: v,
            expected: exact,
            tolerance: format!("|observed - expected| <= {ODE_REL_TOL} |expected|"),
            bound: ODE_REL_TOL * exact.abs(),
            provenance: Provenance::Harness,
        });
    }
    cells.push(json!({
        "cell": "moment_ode", "n0": 2, "t": t, "x": x, "exact": exact,
        "sde": [a, a_se], "dual": [b, b_se],
    }));
    Ok(())
}

/// Transitive selection on two types over the `(n0, t, x)` grid.
fn transitive_cells(
    cfg: &Config,
    times: &[f64],
    report: &mut ExperimentReport,
    cells: &mut Vec<serde_json::Value>,
) -> Result<()> {
    let e = &cfg.experiment;
    let drift = drift(cfg)?;
    if !drift.is_transitive() || cfg.model.k() != 2 {
        return Err(HarnessError::Config(
            "duality needs a transitive drift on K = 2 types (model.x0 of length 2)".into(),
        ));
    }
    let am = AncestralModel::from_transitive(&drift, cfg.model.sigma, cfg.lambda.clone())?;
    let sde = two_type_sde(cfg, drift, cfg.lambda.clone(), times[times.len() - 1])?;
    let fwd: Vec<Vec<Vec<f64>>> =
        e.xs.iter()
            .enumerate()
            .map(|(i, &x)| sde_samples(cfg, &sde, x, times, 10 + i as u64))
            .collect::<Result<_>>()?;
    for (ni, &n0) in e.n0s.iter().enumerate() {
        let dual = dual_samples(cfg, &am, n0, times, 100 + ni as u64)?;
        for (j, &t) in times.iter().enumerate() {
            for (i, &x) in e.xs.iter().enumerate() {
                let (a, a_se) = moment(&fwd[i], j, n0);
                let (b, b_se) = dual_moment(&dual, j, x);
                let se = (a_se * a_se + b_se * b_se).sqrt();
                report.check_within(
                    format!("transitive cell n0={n0} t={t} x={x}"),
                    a,
                    b,
                    se,
                    4.0,
                    0.0,
                    Provenance::Harness,
                );
                cells.push(json!({
                    "cell": "transitive", "n0": n0, "t": t, "x": x,
                    "sde": [a, a_se], "dual": [b, b_se],
                }));
            }
        }
    }
    Ok(())
}
