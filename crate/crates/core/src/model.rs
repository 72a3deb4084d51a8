//! The pluggable generative-model interface and per-chain state.

use std::ops::Deref;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;

/// A point in parameter space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParameterVector(Vec<f64>);

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        Self(values)
    }

    pub fn scalar(value: f64) -> Self {
        Self(vec![value])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ParameterVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for ParameterVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for ParameterVector {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

/// Summary statistics of a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SummaryValue(Vec<f64>);

impl SummaryValue {
    pub fn new(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self(values)
    }
}

impl Deref for SummaryValue {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Everything a generative model must provide to be sampled with ABC.
///
/// Implementations are shared read-only between chain workers, hence the
/// `Sync` bound.
pub trait Model: Sync {
    /// Raw simulated data `z`.
    type Dataset: Clone + Send + Sync + std::fmt::Debug;

    fn name(&self) -> &str;

    /// Names of the parameter coordinates, in order.
    fn parameter_names(&self) -> Vec<String>;

    fn dimension(&self) -> usize {
        self.parameter_names().len()
    }

    fn prior_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ParameterVector;

    /// Log prior density; `f64::NEG_INFINITY` outside the support.
    fn prior_log_density(&self, theta: &ParameterVector) -> f64;

    fn simulate<R: Rng + ?Sized>(&self, theta: &ParameterVector, rng: &mut R)
        -> Result<Self::Dataset>;

    /// `None` marks a dataset that can never be accepted (for example an
    /// epidemic that went extinct); its distance is `+inf`.
    fn summarize(&self, dataset: &Self::Dataset) -> Option<SummaryValue>;

    /// Symmetric, nonnegative, zero on the diagonal.
    fn distance(&self, a: &SummaryValue, b: &SummaryValue) -> f64;

    fn observed_summary(&self) -> &SummaryValue;

    /// Draws from the tempered kernel `q_T(. | theta)`.
    fn propose<R: Rng + ?Sized>(
        &self,
        theta: &ParameterVector,
        temperature: f64,
        rng: &mut R,
    ) -> ParameterVector;

    /// `log q_T(to | from)`.
    fn proposal_log_density(&self, to: &ParameterVector, from: &ParameterVector, temperature: f64)
        -> f64;

    /// Summary and distance to the observation.
    fn discrepancy(&self, dataset: &Self::Dataset) -> (Option<SummaryValue>, f64) {
        match self.summarize(dataset) {
            Some(s) => {
                let d = self.distance(&s, self.observed_summary());
                (Some(s), d)
            }
            None => (None, f64::INFINITY),
        }
    }
}

/// The current `(theta, z)` of one tempered chain, with its cached summary
/// and distance.
///
/// `chain_index` is zero-based; reports label chains from 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState<D> {
    pub theta: ParameterVector,
    pub dataset: D,
    pub summary: SummaryValue,
    pub distance: f64,
    pub chain_index: usize,
}

impl<D> ChainState<D> {
    /// Recomputes the distance from the stored dataset and compares it with
    /// the cached one.
    pub fn distance_is_consistent<M: Model<Dataset = D>>(&self, model: &M) -> bool {
        let (summary, d) = model.discrepancy(&self.dataset);
        summary.as_ref() == Some(&self.summary) && d == self.distance
    }

    /// Swaps the `(theta, z, summary, distance)` payloads of two chains,
    /// leaving each chain's index in place.
    pub fn swap_payloads(a: &mut Self, b: &mut Self) {
        std::mem::swap(&mut a.theta, &mut b.theta);
        std::mem::swap(&mut a.dataset, &mut b.dataset);
        std::mem::swap(&mut a.summary, &mut b.summary);
        std::mem::swap(&mut a.distance, &mut b.distance);
    }
}
