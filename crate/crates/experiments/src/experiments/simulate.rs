use lwf_core::stats::mean_se;
use lwf_core::trajectory::{write_ancestral_csv, write_trajectories_csv};
use lwf_core::{
    make_schedule, simulate_ancestral, simulate_discrete, stationary_and_pgf, AncestralModel,
    DiscreteModel, RngStream, ScheduleParams, SdeIntegrator, Simplex, Trajectory,
};
use serde_json::json;

use super::{drift, new_report, rule, sde_config, x0, RunOutput};
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::report::ExperimentReport;
use crate::runner::{replicates, stream_id};

fn csv_string(write: impl FnOnce(&mut Vec<u8>) -> lwf_core::Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv is utf-8"))
}

fn final_state_metrics(report: &mut ExperimentReport, finals: &[&Simplex]) {
    let k = finals.first().map_or(0, |x| x.k());
    for i in 0..k {
        let v: Vec<f64> = finals.iter().map(|x| x.get(i)).collect();
        let (m, se) = mean_se(&v);
        report.metric(format!("final x[{i}]"), m, Some(se), v.len());
    }
    let fixed = finals.iter().filter(|x| x.fixed_allele().is_some()).count();
    report.metric(
        "fraction fixed",
        fixed as f64 / finals.len() as f64,
        None,
        finals.len(),
    );
}

/// Discrete-model replicates up to rescaled time `model.horizon`.
pub fn run_simulate_discrete(cfg: &Config) -> Result<RunOutput> {
    let (m, e) = (&cfg.model, &cfg.experiment);
    let mut report = new_report(cfg, "simulate-discrete");
    let mut params = ScheduleParams::new(m.n, cfg.schedule.alpha, m.kappa, m.sigma);
    params.b = cfg.schedule.b;
    let schedule = make_schedule(&params, &cfg.lambda, &m.tail)?;
    let model = DiscreteModel::from_schedule(&schedule, rule(cfg)?)?;
    let x0 = x0(cfg)?;
    let generations = schedule.generations_for(m.horizon);
    let per_unit = schedule.generations_per_unit_time();
    let paths = replicates(e.seed, 0, e.replicates, |_, rng| {
        let raw = simulate_discrete(&model, &x0, generations, m.record_every, rng)?;
        let mut t = Trajectory::new();
        for (g, x) in raw.times().iter().zip(raw.states()) {
            t.push(g / per_unit, x.clone());
        }
        Ok::<_, HarnessError>(t)
    })?;
    let finals: Vec<&Simplex> = paths.iter().filter_map(|p| p.last()).collect();
    final_state_metrics(&mut report, &finals);
    if schedule.gamma_clamped {
        report.note("gamma_N was clamped to 1");
    }
    report.note("times are rescaled: t = generation * rho_N / kappa");
    report.details = json!({ "schedule": schedule, "generations": generations });
    let indexed: Vec<(u64, &Trajectory)> = paths
        .iter()
        .enumerate()
        .map(|(i, p)| (i as u64, p))
        .collect();
    let csv = csv_string(|buf| write_trajectories_csv(buf, &indexed))?;
    Ok(RunOutput {
        report,
        csv: Some(csv),
    })
}

/// SDE replicates up to `model.horizon`.
pub fn run_simulate_sde(cfg: &Config) -> Result<RunOutput> {
    let (m, e) = (&cfg.model, &cfg.experiment);
    let mut report = new_report(cfg, "simulate-sde");
    let sde = SdeIntegrator::new(sde_config(cfg, drift(cfg)?))?;
    if let Some(w) = sde.warning() {
        report.note(w);
    }
    let x0 = x0(cfg)?;
    let paths = replicates(e.seed, 0, e.replicates, |_, rng| {
        sde.simulate(&x0, m.record_every, rng)
    })?;
    let finals: Vec<&Simplex> = paths.iter().filter_map(|p| p.trajectory.last()).collect();
    final_state_metrics(&mut report, &finals);
    let total = |f: &dyn Fn(&lwf_core::SdePath) -> u64| paths.iter().map(f).sum::<u64>() as f64;
    report.metric("jumps", total(&|p| p.jumps), None, paths.len());
    report.metric(
        "clamped coordinates",
        total(&|p| p.clamps),
        None,
        paths.len(),
    );
    report.metric(
        "extinctions",
        total(&|p| p.extinctions.len() as u64),
        None,
        paths.len(),
    );
    report.details = json!({
        "jump_rate": sde.jump_rate(),
        "dropped_small_jump_mass": sde.dropped_mass(),
    });
    let indexed: Vec<(u64, &Trajectory)> = paths
        .iter()
        .enumerate()
        .map(|(i, p)| (i as u64, &p.trajectory))
        .collect();
    let csv = csv_string(|buf| write_trajectories_csv(buf, &indexed))?;
    Ok(RunOutput {
        report,
        csv: Some(csv),
    })
}

fn ancestral_model(cfg: &Config) -> Result<AncestralModel> {
    let m = &cfg.model;
    match &cfg.drift {
        Some(d) if d.is_transitive() => Ok(AncestralModel::from_transitive(
            d,
            m.sigma,
            cfg.lambda.clone(),
        )?),
        Some(d) => Err(HarnessError::Config(format!(
            "the ancestral process needs a transitive drift, got `{}`",
            d.name()
        ))),
        None => {
            let increments = m
                .tail
                .iter()
                .map(|&(size, w)| (size as u64 - 1, w))
                .collect();
            Ok(AncestralModel::new(
                m.kappa,
                m.sigma,
                increments,
                cfg.lambda.clone(),
            )?)
        }
    }
}

/// Ancestral-process paths, plus the stationary law when requested.
pub fn run_ancestral(cfg: &Config) -> Result<RunOutput> {
    let (m, e) = (&cfg.model, &cfg.experiment);
    let mut report = new_report(cfg, "ancestral");
    let am = ancestral_model(cfg)?;
    let paths = replicates(e.seed, 0, e.replicates, |_, rng| {
        simulate_ancestral(&am, m.n0, m.horizon, rng)
    })?;
    let ends: Vec<f64> = paths.iter().map(|p| p.state_at(m.horizon) as f64).collect();
    let (mean, se) = mean_se(&ends);
    report.metric(
        format!("D at t = {}", m.horizon),
        mean,
        Some(se),
        ends.len(),
    );
    let mut details = json!({
        "regime": am.regime()?,
        "kappa_star": am.kappa_star()?.value(),
        "beta": am.beta(),
    });
    if e.stationary_time > 0.0 {
        let mut rng = RngStream::new(e.seed, stream_id(1, 0));
        let est = stationary_and_pgf(
            &am,
            m.n0,
            e.stationary_time,
            e.burn_in_fraction * e.stationary_time,
            &mut rng,
        )?;
        for &s in &e.xs {
            let (v, v_se) = est.pgf(s);
            report.metric(format!("pgf({s})"), v, Some(v_se), 0);
        }
        details["stationary"] = json!(est);
    }
    report.details = details;
    let indexed: Vec<(u64, &lwf_core::AncestralPath)> = paths
        .iter()
        .enumerate()
        .map(|(i, p)| (i as u64, p))
        .collect();
    let csv = csv_string(|buf| write_ancestral_csv(buf, &indexed))?;
    Ok(RunOutput {
        report,
        csv: Some(csv),
    })
}
