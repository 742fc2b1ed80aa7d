//! Euler-Maruyama integration of the limit jump-diffusion on the simplex.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::lambda::{JumpLaw, LambdaMeasure};
use crate::sampling::categorical;
use crate::scalar::Scalar;
use crate::selection::DriftFunction;
use crate::simplex::{project_in_place, SimplexPoint};
use crate::trajectory::Trajectory;

/// Denominators at or below this are treated as zero in [`zeta`].
pub const ZETA_DENOM_FLOOR: f64 = 1e-14;

/// Lower-triangular `ζ(x)` with `ζ ζᵀ = Σ(x)`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ZetaFactor<T> {
    k: usize,
    data: Vec<T>,
}

impl<T: Scalar> ZetaFactor<T> {
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.k + j]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// `ζ ζᵀ`, row-major.
    pub fn gram(&self) -> Vec<T> {
        let k = self.k;
        let mut out = vec![T::zero(); k * k];
        for i in 0..k {
            for j in 0..=i {
                let mut s = T::zero();
                for l in 0..=j {
                    s += self.get(i, l) * self.get(j, l);
                }
                out[i * k + j] = s;
                out[j * k + i] = s;
            }
        }
        out
    }
}

/// `Σ_ij(x) = x_i (1_{i=j} - x_j)`, row-major.
pub fn covariance<T: Scalar>(x: &[T]) -> Vec<T> {
    let k = x.len();
    let mut out = vec![T::zero(); k * k];
    for i in 0..k {
        for j in 0..k {
            let d = if i == j { T::one() } else { T::zero() };
            out[i * k + j] = x[i] * (d - x[j]);
        }
    }
    out
}

/// Tail sums `tails[j] = x_j + ... + x_{K-1}` (so `tails[0] = |x|`, `tails[K] = 0`).
///
/// On the face `|x| = 1` these equal `1 - x_1 - ... - x_{j}` in 1-based notation,
/// but summing the tail avoids cancellation near the vertices.
fn tail_sums<T: Scalar>(x: &[T], tails: &mut [T]) {
    let k = x.len();
    tails[k] = T::zero();
    for j in (0..k).rev() {
        tails[j] = tails[j + 1] + x[j];
    }
}

/// The explicit factor of the multinomial covariance:
/// `ζ_ii = sqrt(x_i T_{i+1} / T_i)`, `ζ_ij = -x_i sqrt(x_j / (T_j T_{j+1}))` for `i > j`,
/// with `T` the tail sums. The last column vanishes identically.
pub fn zeta<T: Scalar>(x: &[T]) -> ZetaFactor<T> {
    let k = x.len();
    let mut tails = vec![T::zero(); k + 1];
    tail_sums(x, &mut tails);
    let floor = T::lit(ZETA_DENOM_FLOOR);
    let mut data = vec![T::zero(); k * k];
    for j in 0..k {
        let (tj, tj1) = (tails[j], tails[j + 1]);
        if tj > floor {
            data[j * k + j] = (x[j] * tj1 / tj).sqrt();
        }
        let den = tj * tj1;
        if den > floor {
            let c = (x[j] / den).sqrt();
            for i in j + 1..k {
                data[i * k + j] = -x[i] * c;
            }
        }
    }
    ZetaFactor { k, data }
}

/// Parameters of the limit SDE on `K` types.
#[derive(Clone, Debug, PartialEq)]
pub struct SdeConfig {
    pub k: usize,
    pub drift: DriftFunction<f64>,
    pub sigma: f64,
    pub lambda: LambdaMeasure,
    /// Jumps of size below this are dropped (they are mean-zero).
    pub eps_jump: f64,
    pub dt: f64,
    pub horizon: f64,
    /// Coordinates at or below this are set to zero after each step.
    pub tol_ext: f64,
}

impl SdeConfig {
    pub fn new(
        k: usize,
        drift: DriftFunction<f64>,
        sigma: f64,
        lambda: LambdaMeasure,
        dt: f64,
        horizon: f64,
    ) -> Self {
        Self {
            k,
            drift,
            sigma,
            lambda,
            eps_jump: 1e-3,
            dt,
            horizon,
            tol_ext: 0.0,
        }
    }

    pub fn with_eps_jump(mut self, eps: f64) -> Self {
        self.eps_jump = eps;
        self
    }

    pub fn with_tol_ext(mut self, tol: f64) -> Self {
        self.tol_ext = tol;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    /// Number of steps covering `[0, t]`.
    pub fn steps_for(&self, t: f64) -> u64 {
        (t / self.dt).round() as u64
    }
}

/// Extinction of `allele` at `time`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extinction {
    pub time: f64,
    pub allele: usize,
}

/// A simulated path with its boundary events.
#[derive(Clone, Debug, PartialEq)]
pub struct SdePath {
    pub trajectory: Trajectory,
    pub extinctions: Vec<Extinction>,
    /// `(time, allele)` once a single allele remains.
    pub fixation: Option<(f64, usize)>,
    /// Coordinates zeroed by the `tol_ext` clamp.
    pub clamps: u64,
    pub jumps: u64,
}

/// Outcome of [`SdeIntegrator::run_to_fixation`].
#[derive(Clone, Debug, PartialEq)]
pub struct FixationRun {
    pub allele: Option<usize>,
    pub time: f64,
    pub extinctions: Vec<Extinction>,
    pub clamps: u64,
    pub final_state: SimplexPoint<f64>,
}

/// Per-step bookkeeping.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepInfo {
    pub jumps: u32,
    pub clamps: u32,
}

/// Scratch buffers reused across steps.
#[derive(Clone, Debug)]
pub struct Workspace {
    mu: Vec<f64>,
    xi: Vec<f64>,
    tails: Vec<f64>,
}

impl Workspace {
    pub fn new(k: usize) -> Self {
        Self {
            mu: vec![0.0; k],
            xi: vec![0.0; k],
            tails: vec![0.0; k + 1],
        }
    }
}

/// Validated integrator for one [`SdeConfig`].
#[derive(Clone, Debug)]
pub struct SdeIntegrator {
    cfg: SdeConfig,
    jumps: JumpLaw,
    poisson: Option<Poisson<f64>>,
    noise_scale: f64,
    absorbing: bool,
    warning: Option<String>,
}

impl SdeIntegrator {
    pub fn new(cfg: SdeConfig) -> Result<Self> {
        if cfg.k < 2 {
            return Err(Error::InvalidParameter(format!(
                "K = {} must be >= 2",
                cfg.k
            )));
        }
        cfg.drift.validate(cfg.k)?;
        if !(cfg.sigma >= 0.0 && cfg.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma = {} must be >= 0",
                cfg.sigma
            )));
        }
        if !(cfg.dt > 0.0 && cfg.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "dt = {} must be positive",
                cfg.dt
            )));
        }
        if !(cfg.horizon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "horizon = {} must be >= 0",
                cfg.horizon
            )));
        }
        if !(cfg.tol_ext >= 0.0 && cfg.tol_ext < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tol_ext = {} outside [0, 1)",
                cfg.tol_ext
            )));
        }
        let jumps = JumpLaw::new(&cfg.lambda, cfg.eps_jump)?;
        let mean = jumps.rate() * cfg.dt;
        let poisson = if jumps.is_empty() {
            None
        } else {
            Some(Poisson::new(mean).map_err(|e| Error::InvalidParameter(e.to_string()))?)
        };
        let warning = (mean > 0.1).then(|| {
            format!("dt * jump rate = {mean:.3} exceeds 0.1; multiple jumps per step are frequent")
        });
        Ok(Self {
            noise_scale: (cfg.sigma * cfg.dt).sqrt(),
            absorbing: cfg.drift.is_mutation_free(),
            cfg,
            jumps,
            poisson,
            warning,
        })
    }

    pub fn config(&self) -> &SdeConfig {
        &self.cfg
    }

    /// Truncated jump rate `∫_{eps}^1 Λ(dz)/z²`.
    pub fn jump_rate(&self) -> f64 {
        self.jumps.rate()
    }

    /// `Λ([0, eps))`, whose jump variance is dropped by the truncation.
    pub fn dropped_mass(&self) -> f64 {
        self.cfg.lambda.mass_below(self.cfg.eps_jump)
    }

    /// Set when `dt * jump rate > 0.1`.
    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }

    /// One Euler-Maruyama step with projection, then the Poisson jumps, then the
    /// extinction clamp. `x` must lie on the simplex.
    pub fn step<R: Rng + ?Sized>(
        &self,
        x: &mut [f64],
        ws: &mut Workspace,
        rng: &mut R,
    ) -> StepInfo {
        let k = self.cfg.k;
        let dt = self.cfg.dt;
        let mut info = StepInfo::default();
        self.cfg.drift.eval_into(x, &mut ws.mu);
        let diffusing = self.noise_scale > 0.0;
        if diffusing {
            // ζ has a zero last column, so K - 1 normals suffice
            for v in ws.xi[..k - 1].iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            tail_sums(x, &mut ws.tails);
        }
        let tails = &ws.tails;
        let floor = ZETA_DENOM_FLOOR;
        // the noise for row i needs the pre-step x, so fill increments first
        let mut incr = [0.0f64; 16];
        let mut heap;
        let incr: &mut [f64] = if k <= 16 {
            &mut incr[..k]
        } else {
            heap = vec![0.0; k];
            &mut heap
        };
        for i in 0..k {
            let mut d = ws.mu[i] * dt;
            if diffusing && x[i] > 0.0 {
                let mut s = 0.0;
                for j in 0..i.min(k - 1) {
                    let den = tails[j] * tails[j + 1];
                    if den > floor {
                        s -= x[i] * (x[j] / den).sqrt() * ws.xi[j];
                    }
                }
                if i < k - 1 && tails[i] > floor {
                    s += (x[i] * tails[i + 1] / tails[i]).sqrt() * ws.xi[i];
                }
                d += self.noise_scale * s;
            }
            incr[i] = d;
        }
        for i in 0..k {
            x[i] += incr[i];
        }
        project_in_place(x).expect("projection keeps positive mass");

        if let Some(p) = &self.poisson {
            let n = p.sample(rng) as u32;
            for _ in 0..n {
                let z = self.jumps.sample(rng);
                let target = categorical(x, rng);
                for v in x.iter_mut() {
                    *v *= 1.0 - z;
                }
                x[target] += z;
            }
            info.jumps = n;
        }

        if self.cfg.tol_ext > 0.0 {
            let mut clamped = false;
            for v in x.iter_mut() {
                if *v > 0.0 && *v <= self.cfg.tol_ext {
                    *v = 0.0;
                    clamped = true;
                    info.clamps += 1;
                }
            }
            if clamped {
                project_in_place(x).expect("clamp keeps positive mass");
            }
        }
        info
    }

    fn start(&self, x0: &SimplexPoint<f64>) -> Result<Vec<f64>> {
        if x0.k() != self.cfg.k {
            return Err(Error::DimensionMismatch {
                expected: self.cfg.k,
                got: x0.k(),
            });
        }
        Ok(x0.as_slice().to_vec())
    }

    /// Integrates to the horizon, recording every `record_every`-th step (and the last).
    pub fn simulate<R: Rng + ?Sized>(
        &self,
        x0: &SimplexPoint<f64>,
        record_every: u64,
        rng: &mut R,
    ) -> Result<SdePath> {
        if record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be >= 1".into()));
        }
        let mut x = self.start(x0)?;
        let steps = self.cfg.steps_for(self.cfg.horizon);
        let mut ws = Workspace::new(self.cfg.k);
        let mut path = SdePath {
            trajectory: Trajectory::new(),
            extinctions: Vec::new(),
            fixation: x0.fixed_allele().map(|i| (0.0, i)),
            clamps: 0,
            jumps: 0,
        };
        path.trajectory.push(0.0, x0.clone());
        let mut present: Vec<bool> = x.iter().map(|&v| v > 0.0).collect();
        for s in 1..=steps {
            let t = s as f64 * self.cfg.dt;
            if self.absorbing && path.fixation.is_some() {
                if s % record_every == 0 || s == steps {
                    path.trajectory
                        .push(t, SimplexPoint::from_vec_unchecked(x.clone()));
                }
                continue;
            }
            let info = self.step(&mut x, &mut ws, rng);
            path.clamps += info.clamps as u64;
            path.jumps += info.jumps as u64;
            record_extinctions(&x, &mut present, t, &mut path.extinctions);
            if path.fixation.is_none() {
                if let Some(i) = single_allele(&x) {
                    path.fixation = Some((t, i));
                }
            }
            if s % record_every == 0 || s == steps {
                path.trajectory
                    .push(t, SimplexPoint::from_vec_unchecked(x.clone()));
            }
        }
        Ok(path)
    }

    /// Steps until one allele remains or `max_time` elapses.
    pub fn run_to_fixation<R: Rng + ?Sized>(
        &self,
        x0: &SimplexPoint<f64>,
        max_time: f64,
        rng: &mut R,
    ) -> Result<FixationRun> {
        let mut x = self.start(x0)?;
        let mut ws = Workspace::new(self.cfg.k);
        let mut present: Vec<bool> = x.iter().map(|&v| v > 0.0).collect();
        let mut extinctions = Vec::new();
        let mut clamps = 0;
        let max_steps = self.cfg.steps_for(max_time);
        let mut s = 0;
        let mut allele = single_allele(&x);
        while allele.is_none() && s < max_steps {
            s += 1;
            clamps += self.step(&mut x, &mut ws, rng).clamps as u64;
            record_extinctions(&x, &mut present, s as f64 * self.cfg.dt, &mut extinctions);
            allele = single_allele(&x);
        }
        Ok(FixationRun {
            allele,
            time: s as f64 * self.cfg.dt,
            extinctions,
            clamps,
            final_state: SimplexPoint::from_vec_unchecked(x),
        })
    }

    /// States at the given nondecreasing times.
    pub fn states_at<R: Rng + ?Sized>(
        &self,
        x0: &SimplexPoint<f64>,
        times: &[f64],
        rng: &mut R,
    ) -> Result<Vec<SimplexPoint<f64>>> {
        let mut x = self.start(x0)?;
        let mut ws = Workspace::new(self.cfg.k);
        let mut out = Vec::with_capacity(times.len());
        let mut s = 0;
        for &t in times {
            let target = self.cfg.steps_for(t);
            if target < s {
                return Err(Error::InvalidParameter(
                    "times must be nondecreasing".into(),
                ));
            }
            while s < target {
                if self.absorbing && single_allele(&x).is_some() {
                    s = target;
                    break;
                }
                self.step(&mut x, &mut ws, rng);
                s += 1;
            }
            out.push(SimplexPoint::from_vec_unchecked(x.clone()));
        }
        Ok(out)
    }
}

fn single_allele(x: &[f64]) -> Option<usize> {
    let mut it = x.iter().enumerate().filter(|(_, &v)| v > 0.0);
    match (it.next(), it.next()) {
        (Some((i, _)), None) => Some(i),
        _ => None,
    }
}

fn record_extinctions(x: &[f64], present: &mut [bool], t: f64, out: &mut Vec<Extinction>) {
    for (i, (&v, p)) in x.iter().zip(present.iter_mut()).enumerate() {
        if *p && v <= 0.0 {
            *p = false;
            out.push(Extinction { time: t, allele: i });
        }
    }
}
