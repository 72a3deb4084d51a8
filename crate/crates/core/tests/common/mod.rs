#![allow(dead_code)]

use std::sync::atomic::{AtomicU64, Ordering};

use abcpt::toy::ToyModel;
use abcpt::{Model, ParameterVector, Result, SummaryValue};
use rand::Rng;

/// Asymptotic Kolmogorov survival function `P(K > lambda)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..200 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    kolmogorov_sf((ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d)
}

/// One-sample Kolmogorov-Smirnov p-value against `cdf`.
pub fn ks_one_sample(x: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut x = x.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let d = x
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let f = cdf(v);
            (f - k as f64 / n).abs().max(((k + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    kolmogorov_sf((n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d)
}

/// The toy model with a simulation counter.
pub struct Counting {
    pub inner: ToyModel,
    pub calls: AtomicU64,
}

impl Counting {
    pub fn new(inner: ToyModel) -> Self {
        Self { inner, calls: AtomicU64::new(0) }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::SeqCst)
    }
}

impl Model for Counting {
    type Dataset = f64;

    fn name(&self) -> &str {
        "counting"
    }

    fn parameter_names(&self) -> Vec<String> {
        self.inner.parameter_names()
    }

    fn prior_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ParameterVector {
        self.inner.prior_sample(rng)
    }

    fn prior_log_density(&self, theta: &ParameterVector) -> f64 {
        self.inner.prior_log_density(theta)
    }

    fn simulate<R: Rng + ?Sized>(&self, theta: &ParameterVector, rng: &mut R) -> Result<f64> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        self.inner.simulate(theta, rng)
    }

    fn summarize(&self, z: &f64) -> Option<SummaryValue> {
        self.inner.summarize(z)
    }

    fn distance(&self, a: &SummaryValue, b: &SummaryValue) -> f64 {
        self.inner.distance(a, b)
    }

    fn observed_summary(&self) -> &SummaryValue {
        self.inner.observed_summary()
    }

    fn propose<R: Rng + ?Sized>(&self, theta: &ParameterVector, t: f64, rng: &mut R) -> ParameterVector {
        self.inner.propose(theta, t, rng)
    }

    fn proposal_log_density(&self, to: &ParameterVector, from: &ParameterVector, t: f64) -> f64 {
        self.inner.proposal_log_density(to, from, t)
    }
}
