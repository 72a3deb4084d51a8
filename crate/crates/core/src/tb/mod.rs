//! Tuberculosis transmission model: a birth, death and mutation process
//! observed through the genotype clusters of a sample of cases.
//!
//! Parameters are `(alpha, delta, theta_mut)`, the per-case yearly birth,
//! death and mutation rates. A dataset is simulated by growing an epidemic
//! from one case to `stop_size` cases and subsampling `n` of them; an
//! epidemic that dies out first can never be accepted.

mod clusters;
mod epidemic;
mod kernel;

pub use clusters::{stat_g, stat_h, ClusterConfiguration, OBSERVED_CLUSTERS};
pub use epidemic::{
    simulate_epidemic, simulate_epidemic_observed, subsample_cases, subsample_genotype_counts, EpidemicOutcome,
    EpidemicPopulation, EventKind, TbParams,
};
pub use kernel::{default_sigma, KernelPower, TemperedKernel};

use nalgebra::Matrix3;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{Model, ParameterVector, SummaryValue};
use crate::special::{std_normal_cdf, std_normal_pdf};

pub const DEFAULT_STOP_SIZE: usize = 10_000;
pub const DEFAULT_MAX_EVENTS: u64 = 1_000_000_000;
/// Upper bound of the uniform prior on `alpha` and `delta`.
pub const RATE_PRIOR_MAX: f64 = 5.0;
pub const THETA_PRIOR_MEAN: f64 = 0.198;
pub const THETA_PRIOR_SD: f64 = 0.06735;

/// `(1/n) |g - g_obs| + |H - H_obs|` on summaries `(g, H)`.
pub fn tb_distance(s: &SummaryValue, s_obs: &SummaryValue, n: f64) -> f64 {
    (s[0] - s_obs[0]).abs() / n + (s[1] - s_obs[1]).abs()
}

/// Summary `(g, H)` of a configuration.
pub fn tb_summary(config: &ClusterConfiguration) -> SummaryValue {
    SummaryValue::new(vec![stat_g(config) as f64, stat_h(config)])
}

/// Transforms of interest to epidemiologists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// `alpha - delta`.
    pub transmission_rate: f64,
    /// `ln 2 / (alpha - delta)`; `+inf` when `alpha == delta`.
    pub doubling_time: f64,
    /// `alpha / delta`; `+inf` when `delta == 0`.
    pub reproductive_value: f64,
}

pub fn tb_derived_params(p: &TbParams) -> DerivedParams {
    let rate = p.alpha - p.delta;
    DerivedParams {
        transmission_rate: rate,
        doubling_time: if rate == 0.0 { f64::INFINITY } else { std::f64::consts::LN_2 / rate },
        reproductive_value: if p.delta == 0.0 { f64::INFINITY } else { p.alpha / p.delta },
    }
}

impl DerivedParams {
    pub const NAMES: [&'static str; 3] = ["transmission_rate", "doubling_time", "reproductive_value"];

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.transmission_rate, self.doubling_time, self.reproductive_value]
    }
}

/// A simulated dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum TbDataset {
    Sample(ClusterConfiguration),
    Extinct,
}

#[derive(Debug, Clone)]
pub struct TbModel {
    observed: ClusterConfiguration,
    observed_summary: SummaryValue,
    stop_size: usize,
    max_events: u64,
    kernel: TemperedKernel,
}

impl TbModel {
    /// The observed San Francisco sample, `stop_size` 10000 and the
    /// spectral kernel power.
    pub fn new() -> Self {
        Self::with_options(ClusterConfiguration::observed(), DEFAULT_STOP_SIZE, DEFAULT_MAX_EVENTS, KernelPower::Spectral)
            .expect("default settings are valid")
    }

    pub fn with_options(
        observed: ClusterConfiguration,
        stop_size: usize,
        max_events: u64,
        power: KernelPower,
    ) -> Result<Self> {
        if (stop_size as u64) < observed.sample_size() {
            return Err(Error::InvalidArgument(format!(
                "stop size {stop_size} is smaller than the sample size {}",
                observed.sample_size()
            )));
        }
        Ok(Self {
            observed_summary: tb_summary(&observed),
            observed,
            stop_size,
            max_events,
            kernel: TemperedKernel::new(default_sigma(), power)?,
        })
    }

    pub fn with_sigma(mut self, sigma: Matrix3<f64>) -> Result<Self> {
        self.kernel = TemperedKernel::new(sigma, self.kernel.power())?;
        Ok(self)
    }

    /// Validates and caches the kernel factors for these temperatures.
    pub fn prepare_temperatures(mut self, temperatures: &[f64]) -> Result<Self> {
        self.kernel.prepare(temperatures)?;
        Ok(self)
    }

    pub fn observed(&self) -> &ClusterConfiguration {
        &self.observed
    }

    pub fn sample_size(&self) -> usize {
        self.observed.sample_size() as usize
    }

    pub fn stop_size(&self) -> usize {
        self.stop_size
    }

    pub fn kernel(&self) -> &TemperedKernel {
        &self.kernel
    }

    /// Log density of `N(0.198, 0.06735^2)` truncated to `[0, inf)`.
    pub fn theta_prior_log_density(theta: f64) -> f64 {
        if !(theta >= 0.0) {
            return f64::NEG_INFINITY;
        }
        let z = (theta - THETA_PRIOR_MEAN) / THETA_PRIOR_SD;
        let mass = 1.0 - std_normal_cdf(-THETA_PRIOR_MEAN / THETA_PRIOR_SD);
        (std_normal_pdf(z) / (THETA_PRIOR_SD * mass)).ln()
    }
}

impl Default for TbModel {
    fn default() -> Self {
        Self::new()
    }
}

impl Model for TbModel {
    type Dataset = TbDataset;

    fn name(&self) -> &str {
        "tb"
    }

    fn parameter_names(&self) -> Vec<String> {
        vec!["alpha".into(), "delta".into(), "theta_mut".into()]
    }

    fn dimension(&self) -> usize {
        3
    }

    fn prior_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ParameterVector {
        let (a, b): (f64, f64) = (rng.random_range(0.0..RATE_PRIOR_MAX), rng.random_range(0.0..RATE_PRIOR_MAX));
        let theta = loop {
            let z: f64 = rng.sample(StandardNormal);
            let t = THETA_PRIOR_MEAN + THETA_PRIOR_SD * z;
            if t >= 0.0 {
                break t;
            }
        };
        ParameterVector::new(vec![a.max(b), a.min(b), theta])
    }

    fn prior_log_density(&self, phi: &ParameterVector) -> f64 {
        let (alpha, delta) = (phi[0], phi[1]);
        if !(0.0 <= delta && delta < alpha && alpha <= RATE_PRIOR_MAX) {
            return f64::NEG_INFINITY;
        }
        (2.0 / 25.0f64).ln() + Self::theta_prior_log_density(phi[2])
    }

    fn simulate<R: Rng + ?Sized>(&self, phi: &ParameterVector, rng: &mut R) -> Result<TbDataset> {
        let params = TbParams::from_slice(phi);
        match simulate_epidemic(&params, self.stop_size, self.max_events, rng)? {
            EpidemicOutcome::Extinct => Ok(TbDataset::Extinct),
            EpidemicOutcome::Reached(pop) => Ok(TbDataset::Sample(subsample_cases(&pop, self.sample_size(), rng)?)),
        }
    }

    fn summarize(&self, z: &TbDataset) -> Option<SummaryValue> {
        match z {
            TbDataset::Sample(c) => Some(tb_summary(c)),
            TbDataset::Extinct => None,
        }
    }

    fn distance(&self, a: &SummaryValue, b: &SummaryValue) -> f64 {
        tb_distance(a, b, self.sample_size() as f64)
    }

    fn observed_summary(&self) -> &SummaryValue {
        &self.observed_summary
    }

    fn propose<R: Rng + ?Sized>(&self, phi: &ParameterVector, temperature: f64, rng: &mut R) -> ParameterVector {
        ParameterVector::new(self.kernel.sample(phi, temperature, rng))
    }

    fn proposal_log_density(&self, to: &ParameterVector, from: &ParameterVector, temperature: f64) -> f64 {
        self.kernel.log_density(to, from, temperature)
    }
}
