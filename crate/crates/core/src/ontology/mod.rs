//! The robot's ontology: a belief matrix `P(O|T)` over location tuples and
//! the machinery that personalizes it.
//!
//! Each episode the belief is nudged toward where every object was seen with
//! multi-resolution P-learning: the observed tuple gains
//! `β/√N · (1 − P)` and every other tuple loses `β·S(T,T')/√N · (1 − P')`,
//! where the similarity kernel `S` counts how many of (landmark category,
//! room) differ. Entries are floored and rows renormalized after each step.
//! A discounted window of recent per-episode matrices gives the belief used
//! for planning, and a Wilson score interval on the room posterior `P(R|O)`
//! decides when learning can stop.

mod belief;
mod convergence;
mod learning;
mod priors;

use thiserror::Error;

pub use belief::{BeliefMatrix, BeliefSnapshot, ROW_SUM_TOLERANCE};
pub use convergence::{check_termination, kl_divergence, room_posterior, wilson_halfwidth, CiEntry, ConvergenceReport};
pub use learning::{observe_update, similarity, EpisodeHistory};
pub use priors::{empirical_prior, insitu_prior, uniform_prior, EmpiricalCounts, PriorKind, PriorSpec};

/// Learning rate of the P-learning update.
pub const LEARNING_RATE: f64 = 0.1;
/// Discount applied to older episodes when aggregating history.
pub const DISCOUNT: f64 = 0.9;
/// Number of past episodes aggregated besides the newest one.
pub const HISTORY_HORIZON: usize = 5;
/// Lower bound entries are clamped to after an update.
pub const PROBABILITY_FLOOR: f64 = 1e-6;
/// Standard normal quantile for a 95% interval.
pub const Z_95: f64 = 1.96;
/// Largest Wilson half-width accepted for termination.
pub const CI_THRESHOLD: f64 = 0.05;
/// Additive smoothing inside the KL divergence.
pub const KL_EPSILON: f64 = 1e-4;
/// Add-λ smoothing for count-based priors.
pub const SMOOTHING_LAMBDA: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OntologyError {
    #[error("belief needs at least one location tuple")]
    EmptyTuples,
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown location tuple `{0}`")]
    UnknownTuple(String),
    #[error("row for `{object}` is not a distribution (sum {sum})")]
    NotNormalized { object: String, sum: f64 },
    #[error("row for `{0}` carries no probability mass")]
    ZeroMass(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("episode history is empty")]
    EmptyHistory,
}

pub type Result<T> = std::result::Result<T, OntologyError>;
