//! Multidimensional Λ-Wright-Fisher processes with frequency-dependent selection.
//!
//! - [`discrete`]: exact finite-population simulation under a [`ColouringRule`]
//!   with extreme reproductive events;
//! - [`sde`]: the limit jump-diffusion on the simplex;
//! - [`ancestral`]: the dual block-counting process and fixation probabilities;
//! - [`selection`]: closed-form limit drifts.
//!
//! The closed-form parts (simplex points, drifts, `ζ`, Bernstein tables) are generic
//! over [`Scalar`] (`f32` or `f64`); the Monte Carlo engines use `f64`.

pub mod ancestral;
pub mod bernstein;
pub mod colouring;
pub mod discrete;
pub mod error;
pub mod lambda;
pub mod multiindex;
pub mod offspring;
pub mod quadrature;
pub mod rng;
pub mod sampling;
pub mod scalar;
pub mod schedule;
pub mod sde;
pub mod selection;
pub mod simplex;
pub mod special;
pub mod stats;
pub mod trajectory;

pub use ancestral::{
    ancestral_states_at, fixation_from_pgf, fixation_probabilities, simulate_ancestral,
    stationary_and_pgf, stationary_truncated, AncestralModel, FixationPrediction, Regime,
    StationaryEstimate,
};
pub use bernstein::{BernsteinTable, PolynomialMap, Term};
pub use colouring::{offspring_type_prob, ColouringRule, RuleKind, SampleCounts, TypeProbability};
pub use discrete::{
    empirical_drift, final_counts, simulate_discrete, DiscreteModel, DriftEstimate,
};
pub use error::{Error, Result};
pub use lambda::{JumpLaw, KappaStar, LambdaMeasure};
pub use offspring::OffspringLaw;
pub use rng::RngStream;
pub use scalar::Scalar;
pub use schedule::{make_schedule, ScalingSchedule, ScheduleParams};
pub use sde::{covariance, zeta, SdeConfig, SdeIntegrator, SdePath, ZetaFactor};
pub use selection::{
    mu_food_web, mu_from_polynomial, mu_logistic, mu_negfreq, mu_posfreq, mu_rps, mu_transitive,
    paired, DriftFunction,
};
pub use simplex::SimplexPoint;
pub use trajectory::{AncestralPath, Trajectory};

/// `f64` simplex point.
pub type Simplex = SimplexPoint<f64>;
/// `f32` simplex point.
pub type Simplex32 = SimplexPoint<f32>;
/// `f64` drift.
pub type Drift = DriftFunction<f64>;
/// `f32` drift.
pub type Drift32 = DriftFunction<f32>;
/// `f64` Bernstein table.
pub type Bernstein = BernsteinTable<f64>;
/// `f64` polynomial map.
pub type Polynomial = PolynomialMap<f64>;
/// `f64` factor of the multinomial covariance.
pub type Zeta = ZetaFactor<f64>;
