//! Closed-form limit drifts `μ(x)` per unit of rescaled time.

use serde::{Deserialize, Serialize};

use crate::bernstein::BernsteinTable;
use crate::colouring::{ColouringRule, RuleKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Drift of the limit SDE. Labels are 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "kind",
    rename_all = "snake_case",
    deny_unknown_fields,
    bound = "T: Scalar"
)]
pub enum DriftFunction<T> {
    Neutral,
    /// `pi` is a law over the number of extra potential parents `k >= 1`.
    Transitive {
        kappa: T,
        pi: Vec<(usize, T)>,
    },
    Logistic {
        kappa: T,
        p: Vec<Vec<T>>,
    },
    Rps {
        kappa: T,
    },
    /// `(winner, loser)` edges.
    FoodWeb {
        kappa: T,
        beats: Vec<(usize, usize)>,
    },
    NegFreqDep {
        kappa: T,
    },
    PosFreqDep {
        kappa: T,
    },
    /// `λ (g(x) - x)`.
    FromPolynomial {
        lambda: T,
        table: BernsteinTable<T>,
    },
}

impl<T: Scalar> DriftFunction<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Neutral => "neutral",
            Self::Transitive { .. } => "transitive",
            Self::Logistic { .. } => "logistic",
            Self::Rps { .. } => "rps",
            Self::FoodWeb { .. } => "food_web",
            Self::NegFreqDep { .. } => "neg_freq_dep",
            Self::PosFreqDep { .. } => "pos_freq_dep",
            Self::FromPolynomial { .. } => "from_polynomial",
        }
    }

    /// Selection strength (`λ` for polynomial drifts).
    pub fn kappa(&self) -> T {
        match self {
            Self::Neutral => T::zero(),
            Self::Transitive { kappa, .. }
            | Self::Logistic { kappa, .. }
            | Self::Rps { kappa }
            | Self::FoodWeb { kappa, .. }
            | Self::NegFreqDep { kappa }
            | Self::PosFreqDep { kappa } => *kappa,
            Self::FromPolynomial { lambda, .. } => *lambda,
        }
    }

    pub fn is_transitive(&self) -> bool {
        matches!(self, Self::Transitive { .. })
    }

    /// Checks parameters against the number of types.
    pub fn validate(&self, k: usize) -> Result<()> {
        if !(self.kappa() >= T::zero() && self.kappa().is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{}: strength must be >= 0",
                self.name()
            )));
        }
        match self {
            Self::Transitive { pi, .. } => {
                let total = pi.iter().fold(T::zero(), |a, p| a + p.1);
                if pi.iter().any(|&(k, p)| k == 0 || p < T::zero())
                    || (total - T::one()).abs() > T::simplex_tol()
                {
                    return Err(Error::InvalidParameter(
                        "transitive pi must be a probability vector over k >= 1".into(),
                    ));
                }
            }
            Self::Logistic { p, .. } => {
                if p.len() != k || p.iter().any(|r| r.len() != k) {
                    return Err(Error::InvalidParameter(format!(
                        "logistic matrix must be {k}x{k}"
                    )));
                }
            }
            Self::Rps { .. } if k != 3 => {
                return Err(Error::InvalidParameter("RPS drift needs K = 3".into()));
            }
            Self::FoodWeb { beats, .. } => {
                if beats.iter().any(|&(w, l)| w >= k || l >= k || w == l) {
                    return Err(Error::InvalidParameter("food-web edge out of range".into()));
                }
            }
            Self::FromPolynomial { table, .. } if table.k() != k => {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    got: table.k(),
                });
            }
            _ => {}
        }
        Ok(())
    }

    /// `μ_i(x) = 0` whenever `x_i = 0`.
    pub fn is_mutation_free(&self) -> bool {
        match self {
            Self::FromPolynomial { table, lambda } => {
                *lambda == T::zero() || table.is_mutation_free()
            }
            _ => true,
        }
    }

    /// `β = Σ k π_k` for transitive drifts.
    pub fn beta(&self) -> Option<T> {
        match self {
            Self::Transitive { pi, .. } => Some(
                pi.iter()
                    .fold(T::zero(), |a, &(k, p)| a + T::from_count(k) * p),
            ),
            _ => None,
        }
    }

    pub fn eval(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); x.len()];
        self.eval_into(x, &mut out);
        out
    }

    pub fn eval_into(&self, x: &[T], out: &mut [T]) {
        match self {
            Self::Neutral => out.iter_mut().for_each(|v| *v = T::zero()),
            Self::Transitive { kappa, pi } => mu_transitive_into(*kappa, pi, x, out),
            Self::Logistic { kappa, p } => {
                let k = x.len();
                pairwise_into(*kappa, x, out, |i, j| p[i][j] - p[j][i], k)
            }
            Self::Rps { kappa } => mu_rps_into(*kappa, x, out),
            Self::FoodWeb { kappa, beats } => {
                let k = x.len();
                let mut b = vec![T::zero(); k * k];
                for &(w, l) in beats {
                    b[w * k + l] = T::one();
                    b[l * k + w] = -T::one();
                }
                pairwise_into(*kappa, x, out, |i, j| b[i * k + j], k)
            }
            Self::NegFreqDep { kappa } => mu_negfreq_into(*kappa, x, out),
            Self::PosFreqDep { kappa } => mu_posfreq_into(*kappa, x, out),
            Self::FromPolynomial { lambda, table } => {
                table.eval_into(x, out);
                for (o, &xi) in out.iter_mut().zip(x) {
                    *o = *lambda * (*o - xi);
                }
            }
        }
    }

    /// `s_i(x) = μ_i(x) / (x_i (1 - x_i))` where the denominator is positive.
    pub fn selection_coefficients(&self, x: &[T]) -> Vec<Option<T>> {
        let mu = self.eval(x);
        mu.into_iter()
            .zip(x)
            .map(|(m, &xi)| {
                let d = xi * (T::one() - xi);
                (d > T::zero()).then(|| m / d)
            })
            .collect()
    }
}

/// `μ_i = κ Σ_k π_k [S_i^{k+1} - S_{i-1}^{k+1} - x_i]`, `S_i = x_1 + ... + x_i`.
pub fn mu_transitive<T: Scalar>(kappa: T, pi: &[(usize, T)], x: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); x.len()];
    mu_transitive_into(kappa, pi, x, &mut out);
    out
}

fn mu_transitive_into<T: Scalar>(kappa: T, pi: &[(usize, T)], x: &[T], out: &mut [T]) {
    let mut prev = T::zero();
    for (i, o) in out.iter_mut().enumerate() {
        let cur = prev + x[i];
        let mut acc = T::zero();
        for &(k, p) in pi {
            let e = (k + 1) as i32;
            acc += p * (cur.powi(e) - prev.powi(e) - x[i]);
        }
        *o = kappa * acc;
        prev = cur;
    }
}

/// `μ_i = κ x_i Σ_{j≠i} x_j a(i, j)`; with `a = p_ij - p_ji` this is
/// `κ x_i [1 - x_i - 2 Σ_{j≠i} p_ji x_j]` on the face `|x| = 1`.
fn pairwise_into<T: Scalar>(
    kappa: T,
    x: &[T],
    out: &mut [T],
    a: impl Fn(usize, usize) -> T,
    k: usize,
) {
    for i in 0..k {
        let mut acc = T::zero();
        for j in (0..k).filter(|&j| j != i) {
            acc += x[j] * a(i, j);
        }
        out[i] = kappa * x[i] * acc;
    }
}

pub fn mu_logistic<T: Scalar>(kappa: T, p: &[Vec<T>], x: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); x.len()];
    pairwise_into(kappa, x, &mut out, |i, j| p[i][j] - p[j][i], x.len());
    out
}

/// `μ_i = κ x_i (x_{i-1} - x_{i+1})`, indices cyclic on three types.
pub fn mu_rps<T: Scalar>(kappa: T, x: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); x.len()];
    mu_rps_into(kappa, x, &mut out);
    out
}

fn mu_rps_into<T: Scalar>(kappa: T, x: &[T], out: &mut [T]) {
    for i in 0..3 {
        out[i] = kappa * x[i] * (x[(i + 2) % 3] - x[(i + 1) % 3]);
    }
}

pub fn mu_food_web<T: Scalar>(kappa: T, beats: &[(usize, usize)], x: &[T]) -> Vec<T> {
    DriftFunction::FoodWeb {
        kappa,
        beats: beats.to_vec(),
    }
    .eval(x)
}

/// `μ_i = 2κ x_i [Σ_{j≠i} x_j² - x_i(1 - x_i)]`.
pub fn mu_negfreq<T: Scalar>(kappa: T, x: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); x.len()];
    mu_negfreq_into(kappa, x, &mut out);
    out
}

fn others<T: Scalar>(x: &[T], i: usize) -> (T, T) {
    let (mut s, mut q) = (T::zero(), T::zero());
    for (j, &xj) in x.iter().enumerate() {
        if j != i {
            s += xj;
            q += xj * xj;
        }
    }
    (s, q)
}

fn mu_negfreq_into<T: Scalar>(kappa: T, x: &[T], out: &mut [T]) {
    let two = T::lit(2.0);
    for i in 0..x.len() {
        let (s, q) = others(x, i);
        out[i] = two * kappa * x[i] * (q - x[i] * s);
    }
}

/// `μ_i = κ x_i [(2x_i - 1)(1 - x_i) + Σ_{j≠k; j,k≠i} x_j x_k]`.
pub fn mu_posfreq<T: Scalar>(kappa: T, x: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); x.len()];
    mu_posfreq_into(kappa, x, &mut out);
    out
}

fn mu_posfreq_into<T: Scalar>(kappa: T, x: &[T], out: &mut [T]) {
    for i in 0..x.len() {
        // (2x_i - 1) S + S² - Q with S = 1 - x_i simplifies to x_i S - Q
        let (s, q) = others(x, i);
        out[i] = kappa * x[i] * (x[i] * s - q);
    }
}

/// `λ (g(x) - x)`.
pub fn mu_from_polynomial<T: Scalar>(lambda: T, g: &BernsteinTable<T>, x: &[T]) -> Vec<T> {
    let gx = g.eval(x);
    gx.into_iter()
        .zip(x)
        .map(|(a, &b)| lambda * (a - b))
        .collect()
}

/// The closed-form limit drift matching a colouring rule and a sample-size tail
/// (conditional on more than one potential parent), if one exists.
pub fn paired(
    rule: &ColouringRule,
    kappa: f64,
    tail: &[(usize, f64)],
) -> Option<DriftFunction<f64>> {
    let only = |size: usize| tail.len() == 1 && tail[0].0 == size;
    match rule.kind() {
        RuleKind::Neutral => Some(DriftFunction::Neutral),
        RuleKind::Transitive => Some(DriftFunction::Transitive {
            kappa,
            pi: tail.iter().map(|&(k, p)| (k - 1, p)).collect(),
        }),
        RuleKind::Logistic { p } if only(2) => Some(DriftFunction::Logistic {
            kappa,
            p: p.clone(),
        }),
        RuleKind::PartialOrder { beats } if only(2) => Some(DriftFunction::FoodWeb {
            kappa,
            beats: beats.clone(),
        }),
        RuleKind::NegFreqDep if only(3) => Some(DriftFunction::NegFreqDep { kappa }),
        RuleKind::PosFreqDep if only(3) => Some(DriftFunction::PosFreqDep { kappa }),
        RuleKind::Bernstein { .. } => {
            let table = rule.bernstein_table()?;
            only(table.degree() as usize).then(|| DriftFunction::FromPolynomial {
                lambda: kappa,
                table: table.clone(),
            })
        }
        _ => None,
    }
}
