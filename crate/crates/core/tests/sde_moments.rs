use lwf_core::sde::Workspace;
use lwf_core::stats::mean_se;
use lwf_core::{Drift, LambdaMeasure, RngStream, SdeConfig, SdeIntegrator, Simplex};
use rand::Rng;

fn neutral_cfg(sigma: f64, dt: f64, horizon: f64) -> SdeConfig {
    SdeConfig::new(2, Drift::Neutral, sigma, LambdaMeasure::Zero, dt, horizon)
}

#[test]
fn neutral_first_two_moments() {
    // E[X] = x and E[X(1 - X)] = x(1 - x) e^{-σ t} for the neutral diffusion
    let (sigma, t) = (1.0, 0.5);
    let sde = SdeIntegrator::new(neutral_cfg(sigma, 1e-3, t)).unwrap();
    let x0 = Simplex::new(vec![0.3, 0.7]).unwrap();
    let reps = 10_000;
    let mut first = Vec::with_capacity(reps);
    let mut het = Vec::with_capacity(reps);
    for r in 0..reps {
        let mut rng = RngStream::new(11, r as u64);
        let x = sde.states_at(&x0, &[t], &mut rng).unwrap()[0].get(0);
        first.push(x);
        het.push(x * (1.0 - x));
    }
    let (m1, s1) = mean_se(&first);
    assert!((m1 - 0.3).abs() < 4.0 * s1, "E[X] = {m1} ± {s1}");
    let (m2, s2) = mean_se(&het);
    let want = 0.21 * (-sigma * t).exp();
    assert!(
        (m2 - want).abs() < 4.0 * s2 + 5e-3,
        "E[X(1-X)] = {m2} ± {s2}, want {want}"
    );
}

fn random_interior<R: Rng>(k: usize, rng: &mut R) -> Simplex {
    let w: Vec<f64> = (0..k).map(|_| 0.2 + rng.random::<f64>()).collect();
    Simplex::from_weights(w).unwrap()
}

fn drifts() -> Vec<Drift> {
    let p = vec![
        vec![0.5, 0.2, 0.9],
        vec![0.8, 0.5, 0.3],
        vec![0.1, 0.7, 0.5],
    ];
    vec![
        Drift::Neutral,
        Drift::Transitive {
            kappa: 1.5,
            pi: vec![(1, 0.4), (2, 0.6)],
        },
        Drift::Logistic { kappa: 1.0, p },
        Drift::Rps { kappa: 2.0 },
        Drift::FoodWeb {
            kappa: 1.0,
            beats: vec![(1, 0), (2, 0)],
        },
        Drift::NegFreqDep { kappa: 1.0 },
        Drift::PosFreqDep { kappa: 1.0 },
    ]
}

#[test]
fn one_step_moments_match_generator() {
    // (E f(X_dt) - f(x)) / dt against A f for f = x_i and f = x_i x_j
    let (sigma, dt) = (0.8, 1e-3);
    let lambda = LambdaMeasure::FiniteAtoms {
        atoms: vec![(0.3, 0.2), (0.6, 0.1)],
    };
    let lam_mass = 0.3;
    let reps = 100_000;
    let k = 3;
    let mut pts_rng = RngStream::new(5, 0);
    for (d_idx, drift) in drifts().into_iter().enumerate() {
        let kappa = drift.kappa();
        let sde = SdeIntegrator::new(SdeConfig::new(
            k,
            drift.clone(),
            sigma,
            lambda.clone(),
            dt,
            dt,
        ))
        .unwrap();
        for p_idx in 0..10 {
            let x0 = random_interior(k, &mut pts_rng);
            let x = x0.as_slice();
            let mu = drift.eval(x);
            let mut ws = Workspace::new(k);
            let mut rng = RngStream::new(6, (d_idx * 100 + p_idx) as u64);
            let fns: Vec<(usize, usize)> = vec![(0, 0), (1, 1), (0, 1), (1, 2)];
            let mut lin = (0..k).map(|_| Vec::with_capacity(reps)).collect::<Vec<_>>();
            let mut quad = (0..fns.len())
                .map(|_| Vec::with_capacity(reps))
                .collect::<Vec<_>>();
            for _ in 0..reps {
                let mut y = x.to_vec();
                sde.step(&mut y, &mut ws, &mut rng);
                for i in 0..k {
                    lin[i].push((y[i] - x[i]) / dt);
                }
                for (f, &(i, j)) in fns.iter().enumerate() {
                    quad[f].push((y[i] * y[j] - x[i] * x[j]) / dt);
                }
            }
            let slack = 4.0 * dt * (1.0 + kappa) * (1.0 + kappa);
            for i in 0..k {
                let (m, se) = mean_se(&lin[i]);
                assert!(
                    (m - mu[i]).abs() < 4.0 * se + slack,
                    "{}: A x_{i} = {} vs {m} ± {se}",
                    drift.name(),
                    mu[i]
                );
            }
            for (f, &(i, j)) in fns.iter().enumerate() {
                let delta = if i == j { 1.0 } else { 0.0 };
                let want = mu[i] * x[j] + mu[j] * x[i] + (sigma + lam_mass) * x[i] * (delta - x[j]);
                let (m, se) = mean_se(&quad[f]);
                assert!(
                    (m - want).abs() < 4.0 * se + slack,
                    "{}: A x_{i}x_{j} = {want} vs {m} ± {se}",
                    drift.name()
                );
            }
        }
    }
}

#[test]
fn neutral_replicates_fix_and_stay_on_simplex() {
    let sde = SdeIntegrator::new(SdeConfig::new(
        3,
        Drift::Neutral,
        1.0,
        LambdaMeasure::Zero,
        1e-3,
        1.0,
    ))
    .unwrap();
    let x0 = Simplex::new(vec![0.2, 0.3, 0.5]).unwrap();
    for r in 0..200 {
        let mut rng = RngStream::new(21, r);
        let run = sde.run_to_fixation(&x0, 200.0, &mut rng).unwrap();
        assert!(run.allele.is_some());
        let s: f64 = run.final_state.as_slice().iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert_eq!(run.extinctions.len(), 2);
    }
}
