use thiserror::Error;

/// Errors raised by schedules, samplers and the built-in models.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid ring partition: {0}")]
    InvalidRings(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("rejection sampler exceeded {attempts} attempts at tolerance {epsilon}")]
    RejectionCapExceeded { epsilon: f64, attempts: u64 },
    #[error("chain {chain}: prior density is zero at the current parameter")]
    ZeroPriorAtCurrent { chain: usize },
    #[error("chain state violates its tolerance: distance {distance} >= epsilon {epsilon}")]
    StateOutsideTolerance { distance: f64, epsilon: f64 },
    #[error("distance {0} lies outside the ring partition")]
    DistanceOutsideRings(f64),
    #[error("exchange pair must satisfy i < j, got ({i}, {j})")]
    InvalidExchangePair { i: usize, j: usize },
    #[error("epidemic simulation exceeded {0} events")]
    MaxEventsExceeded(u64),
    #[error("population of {available} cases is smaller than the sample size {requested}")]
    PopulationTooSmall { available: usize, requested: usize },
    #[error("covariance matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("undefined value: {0}")]
    Undefined(String),
    #[error("trace format: {0}")]
    TraceFormat(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
