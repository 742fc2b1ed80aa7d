use lwf_core::stats::{mean_se, ols_slope, pava_nonincreasing, Z99, Z99_ONE_SIDED};
use lwf_core::{Drift, SdeIntegrator, Simplex};
use serde_json::json;

use super::{new_report, sde_config, RunOutput};
use crate::config::Config;
use crate::error::{HarnessError, Result};
use crate::report::{Check, Provenance};
use crate::runner::replicates;

/// Trend of `E[ln(X_1 X_2 X_3)]` under the RPS drift from a near-symmetric start.
///
/// The log-product decreases without bound when there is any noise (`sigma > 0`
/// or a nonzero Λ) and stays put at the interior rest point otherwise.
pub fn run_rps_lyapunov(cfg: &Config) -> Result<RunOutput> {
    let (m, e) = (&cfg.model, &cfg.experiment);
    if m.k() != 3 {
        return Err(HarnessError::Config(format!(
            "rps-lyapunov needs K = 3, got {}",
            m.k()
        )));
    }
    let third = 1.0 / 3.0;
    if !(e.delta >= 0.0 && e.delta < third) {
        return Err(HarnessError::Config(format!(
            "experiment.delta = {} outside [0, 1/3)",
            e.delta
        )));
    }
    if e.time_points < 3 {
        return Err(HarnessError::Config(
            "experiment.time_points must be >= 3".into(),
        ));
    }
    let drift = cfg.drift.clone().unwrap_or(Drift::Rps { kappa: m.kappa });
    let mut report = new_report(cfg, "rps-lyapunov");
    let x0 = Simplex::new(vec![third + e.delta, third, third - e.delta])?;
    let sde = SdeIntegrator::new(sde_config(cfg, drift))?;
    if let Some(w) = sde.warning() {
        report.note(w);
    }
    let horizon = m.horizon;
    let last = (e.time_points - 1) as f64;
    let grid: Vec<f64> = (0..e.time_points)
        .map(|j| horizon * j as f64 / last)
        .collect();
    let r = e.replicates;
    // ln of the product, or None once a coordinate is zero
    let paths = replicates(e.seed, 0, r, |_, rng| {
        let states = sde.states_at(&x0, &grid, rng)?;
        Ok::<_, HarnessError>(
            states
                .iter()
                .map(|x| {
                    let p: f64 = x.as_slice().iter().product();
                    (p > 0.0).then(|| p.ln())
                })
                .collect::<Vec<Option<f64>>>(),
        )
    })?;

    let mut curve = Vec::with_capacity(grid.len());
    let mut weights = Vec::with_capacity(grid.len());
    let mut excluded = 0usize;
    let mut per_time = Vec::new();
    for (j, &t) in grid.iter().enumerate() {
        let vals: Vec<f64> = paths.iter().filter_map(|p| p[j]).collect();
        excluded += r - vals.len();
        let (mean, se) = mean_se(&vals);
        per_time.push(json!({ "t": t, "mean": mean, "se": se, "samples": vals.len() }));
        curve.push(mean);
        weights.push(vals.len() as f64);
    }

    let mut slopes = Vec::with_capacity(r);
    for p in &paths {
        let (ts, ys): (Vec<f64>, Vec<f64>) = grid
            .iter()
            .zip(p)
            .filter_map(|(&t, y)| y.map(|y| (t, y)))
            .unzip();
        if ts.len() >= 2 {
            slopes.push(ols_slope(&ts, &ys));
        }
    }
    let (slope, slope_se) = mean_se(&slopes);
    report.metric(
        "mean per-replicate OLS slope",
        slope,
        Some(slope_se),
        slopes.len(),
    );
    report.metric(
        "excluded (time, replicate) points with a zero coordinate",
        excluded as f64,
        None,
        r * grid.len(),
    );
    let valid: Vec<usize> = (0..grid.len()).filter(|&j| weights[j] > 0.0).collect();
    if valid.len() >= 2 {
        let y: Vec<f64> = valid.iter().map(|&j| curve[j]).collect();
        let w: Vec<f64> = valid.iter().map(|&j| weights[j]).collect();
        let fit = pava_nonincreasing(&y, &w);
        let (a, b) = (valid[0], valid[valid.len() - 1]);
        let iso = (fit[fit.len() - 1] - fit[0]) / (grid[b] - grid[a]);
        report.metric("isotonic slope of the mean curve", iso, None, r);
    }

    let noisy = m.sigma > 0.0 || !cfg.lambda.is_zero();
    if noisy {
        let upper = slope + Z99_ONE_SIDED * slope_se;
        report.check(Check {
            name: "E[ln X1 X2 X3] decreases".into(),
            passed: upper < 0.0,
            observed: upper,
            expected: 0.0,
            tolerance: format!("mean slope + {Z99_ONE_SIDED} SE < 0 (one-sided 99%)"),
            bound: 0.0,
            provenance: Provenance::Harness,
        });
    } else {
        report.check_within(
            "E[ln X1 X2 X3] is flat",
            slope,
            0.0,
            slope_se,
            Z99,
            10.0 * m.dt,
            Provenance::Harness,
        );
    }
    report.details = json!({
        "x0": x0.as_slice(),
        "expect_decrease": noisy,
        "curve": per_time,
    });
    Ok(report.into())
}
