//! Gaussian-mixture toy model with a uniform prior and closed-form exact
//! and tolerance-approximate posteriors.
//!
//! `x | theta ~ w1 N(theta, 1) + w2 N(theta, 1/100) + w3 N(theta - 5, 1)`,
//! `theta ~ U(-10, 10)`, `S(x) = x`, `rho(x, z) = |z - x|`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{Model, ParameterVector, SummaryValue};
use crate::quadrature::integrate;
use crate::special::{std_normal_interval, std_normal_pdf};

pub const PRIOR_LOW: f64 = -10.0;
pub const PRIOR_HIGH: f64 = 10.0;

/// Weights of the modified example (with the small mode near 5).
pub const MODIFIED_WEIGHTS: [f64; 3] = [0.45, 0.45, 0.1];
/// Weights of the standard example (no mode near 5).
pub const STANDARD_WEIGHTS: [f64; 3] = [0.5, 0.5, 0.0];

/// `(mean offset from theta, standard deviation)` of each component.
const COMPONENTS: [(f64, f64); 3] = [(0.0, 1.0), (0.0, 0.1), (-5.0, 1.0)];

// Breakpoints that keep adaptive quadrature from missing the narrow spike.
const BREAKS: [f64; 9] = [-10.0, -3.0, -1.0, -0.3, 0.0, 0.3, 1.0, 3.0, 10.0];

#[derive(Debug, Clone)]
pub struct ToyModel {
    weights: [f64; 3],
    kernel_sd: f64,
    observation: f64,
    observed: SummaryValue,
}

impl Default for ToyModel {
    fn default() -> Self {
        Self::new()
    }
}

impl ToyModel {
    /// The modified toy example with `x = 0` and kernel sd 0.15.
    pub fn new() -> Self {
        Self {
            weights: MODIFIED_WEIGHTS,
            kernel_sd: 0.15,
            observation: 0.0,
            observed: SummaryValue::new(vec![0.0]),
        }
    }

    pub fn with_weights(mut self, weights: [f64; 3]) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= 0.0)) || ((weights.iter().sum::<f64>()) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "mixture weights must be nonnegative and sum to 1, got {weights:?}"
            )));
        }
        self.weights = weights;
        Ok(self)
    }

    /// Base kernel standard deviation; chain `i` uses `sd * sqrt(T_i)`.
    pub fn with_kernel_sd(mut self, sd: f64) -> Result<Self> {
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(Error::InvalidArgument(format!("kernel sd must be positive, got {sd}")));
        }
        self.kernel_sd = sd;
        Ok(self)
    }

    pub fn with_observation(mut self, x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(Error::InvalidArgument("observation must be finite".into()));
        }
        self.observation = x;
        self.observed = SummaryValue::new(vec![x]);
        Ok(self)
    }

    pub fn weights(&self) -> [f64; 3] {
        self.weights
    }

    pub fn kernel_sd(&self) -> f64 {
        self.kernel_sd
    }

    pub fn observation(&self) -> f64 {
        self.observation
    }

    /// One draw of `x | theta`.
    pub fn simulate_scalar<R: Rng + ?Sized>(&self, theta: f64, rng: &mut R) -> f64 {
        let (offset, sd) = COMPONENTS[self.pick_component(rng)];
        let z: f64 = rng.sample(StandardNormal);
        theta + offset + sd * z
    }

    fn pick_component<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        if u < self.weights[0] {
            0
        } else if u < self.weights[0] + self.weights[1] {
            1
        } else {
            2
        }
    }

    pub fn in_support(theta: f64) -> bool {
        (PRIOR_LOW..=PRIOR_HIGH).contains(&theta)
    }

    /// Likelihood `f(x | theta)` of the observation.
    pub fn likelihood(&self, theta: f64) -> f64 {
        self.weights
            .iter()
            .zip(COMPONENTS)
            .map(|(w, (off, sd))| w * std_normal_pdf((self.observation - theta - off) / sd) / sd)
            .sum()
    }

    /// `P(|z - x| < eps | theta)`, the probability that one simulation at
    /// `theta` is accepted.
    pub fn hit_probability(&self, theta: f64, epsilon: f64) -> f64 {
        self.weights
            .iter()
            .zip(COMPONENTS)
            .map(|(w, (off, sd))| {
                let centre = self.observation - theta - off;
                w * std_normal_interval((centre - epsilon) / sd, (centre + epsilon) / sd)
            })
            .sum()
    }

    /// The exact posterior `pi(theta | x)`, normalized on the prior support.
    pub fn exact_posterior(&self) -> Result<ExactPosterior> {
        let z = integrate_pieces(|t| self.likelihood(t))?;
        Ok(ExactPosterior {
            model: self.clone(),
            normalizer: z,
        })
    }

    /// The tolerance-`epsilon` posterior `pi_eps(theta | x)`.
    pub fn eps_posterior(&self, epsilon: f64) -> Result<EpsPosterior> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {epsilon}"
            )));
        }
        let z = integrate_pieces(|t| self.hit_probability(t, epsilon))?;
        Ok(EpsPosterior {
            model: self.clone(),
            epsilon,
            normalizer: z,
        })
    }

    /// Acceptance probability of rejection ABC at `epsilon`:
    /// `int pi(theta) P(|z - x| < eps | theta) dtheta`.
    pub fn rejection_acceptance_probability(&self, epsilon: f64) -> Result<f64> {
        Ok(self.eps_posterior(epsilon)?.normalizer / (PRIOR_HIGH - PRIOR_LOW))
    }
}

fn integrate_pieces<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    BREAKS
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], 1e-13, 1e-12))
        .sum()
}

#[derive(Debug, Clone)]
pub struct ExactPosterior {
    model: ToyModel,
    normalizer: f64,
}

impl ExactPosterior {
    pub fn density(&self, theta: f64) -> f64 {
        if ToyModel::in_support(theta) {
            self.model.likelihood(theta) / self.normalizer
        } else {
            0.0
        }
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Posterior probability of `[a, b]`.
    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        let (a, b) = (a.max(PRIOR_LOW), b.min(PRIOR_HIGH));
        if b <= a {
            return Ok(0.0);
        }
        integrate(|t| self.density(t), a, b, 1e-13, 1e-12)
    }
}

#[derive(Debug, Clone)]
pub struct EpsPosterior {
    model: ToyModel,
    epsilon: f64,
    normalizer: f64,
}

impl EpsPosterior {
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `int_{-10}^{10} P(|z - x| < eps | theta) dtheta`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Unnormalized density: the hit probability on the prior support, zero
    /// outside.
    pub fn unnormalized(&self, theta: f64) -> f64 {
        if ToyModel::in_support(theta) {
            self.model.hit_probability(theta, self.epsilon)
        } else {
            0.0
        }
    }

    pub fn density(&self, theta: f64) -> f64 {
        self.unnormalized(theta) / self.normalizer
    }

    /// `P(theta <= t)` under the normalized density.
    pub fn cdf(&self, t: f64) -> Result<f64> {
        let t = t.clamp(PRIOR_LOW, PRIOR_HIGH);
        let mut total = 0.0;
        for w in BREAKS.windows(2) {
            if t <= w[0] {
                break;
            }
            total += integrate(|x| self.density(x), w[0], w[1].min(t), 1e-13, 1e-12)?;
        }
        Ok(total)
    }

    pub fn mass(&self, a: f64, b: f64) -> Result<f64> {
        Ok(self.cdf(b)? - self.cdf(a)?)
    }
}

impl Model for ToyModel {
    type Dataset = f64;

    fn name(&self) -> &str {
        "toy"
    }

    fn parameter_names(&self) -> Vec<String> {
        vec!["theta".into()]
    }

    fn dimension(&self) -> usize {
        1
    }

    fn prior_sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ParameterVector {
        ParameterVector::scalar(rng.random_range(PRIOR_LOW..PRIOR_HIGH))
    }

    fn prior_log_density(&self, theta: &ParameterVector) -> f64 {
        if Self::in_support(theta[0]) {
            -(PRIOR_HIGH - PRIOR_LOW).ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    fn simulate<R: Rng + ?Sized>(&self, theta: &ParameterVector, rng: &mut R) -> Result<f64> {
        Ok(self.simulate_scalar(theta[0], rng))
    }

    fn summarize(&self, z: &f64) -> Option<SummaryValue> {
        Some(SummaryValue::new(vec![*z]))
    }

    fn distance(&self, a: &SummaryValue, b: &SummaryValue) -> f64 {
        (a[0] - b[0]).abs()
    }

    fn observed_summary(&self) -> &SummaryValue {
        &self.observed
    }

    fn discrepancy(&self, z: &f64) -> (Option<SummaryValue>, f64) {
        (Some(SummaryValue::new(vec![*z])), (z - self.observation).abs())
    }

    fn propose<R: Rng + ?Sized>(
        &self,
        theta: &ParameterVector,
        temperature: f64,
        rng: &mut R,
    ) -> ParameterVector {
        let z: f64 = rng.sample(StandardNormal);
        ParameterVector::scalar(theta[0] + self.kernel_sd * temperature.sqrt() * z)
    }

    fn proposal_log_density(&self, to: &ParameterVector, from: &ParameterVector, temperature: f64) -> f64 {
        let sd = self.kernel_sd * temperature.sqrt();
        let u = (to[0] - from[0]) / sd;
        -0.5 * u * u - sd.ln() - 0.5 * (2.0 * PI).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::special::std_normal_cdf;

    #[test]
    fn prior_log_density_values() {
        let m = ToyModel::new();
        assert_eq!(m.prior_log_density(&ParameterVector::scalar(0.0)), (1.0f64 / 20.0).ln());
        assert_eq!(m.prior_log_density(&ParameterVector::scalar(10.5)), f64::NEG_INFINITY);
    }

    #[test]
    fn simulate_mean_and_variance() {
        let m = ToyModel::new();
        let mut rng = stream(11, 0);
        let n = 1_000_000;
        let theta = 1.3;
        let xs: Vec<f64> = (0..n).map(|_| m.simulate_scalar(theta, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let var_true = 2.8045;
        let se_mean = (var_true / n as f64).sqrt();
        assert!((mean - (theta - 0.5)).abs() < 3.0 * se_mean, "mean {mean}");
        // fourth central moment of the mixture for the variance SE
        let m4: f64 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
        let se_var = ((m4 - var_true * var_true) / n as f64).sqrt();
        assert!((var - var_true).abs() < 3.0 * se_var, "var {var} se {se_var}");
    }

    #[test]
    fn component_frequencies() {
        let m = ToyModel::new();
        let mut rng = stream(12, 0);
        let n = 200_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            counts[m.pick_component(&mut rng)] += 1;
        }
        for (c, w) in counts.iter().zip(MODIFIED_WEIGHTS) {
            let p = *c as f64 / n as f64;
            assert!((p - w).abs() < 4.0 * (w * (1.0 - w) / n as f64).sqrt());
        }
    }

    #[test]
    fn exact_posterior_normalizes() {
        let post = ToyModel::new().exact_posterior().unwrap();
        let total = post.mass(-10.0, 10.0).unwrap();
        assert!((total - 1.0).abs() < 1e-8);
        assert_eq!(post.density(-10.5), 0.0);
        assert_eq!(post.density(11.0), 0.0);
    }

    #[test]
    fn exact_posterior_symmetry_up_to_far_mode() {
        let post = ToyModel::new().exact_posterior().unwrap();
        let z = post.normalizer();
        for &t in &[0.1, 0.7, 2.0, 4.5, 9.9] {
            let far = |x: f64| 0.1 * std_normal_pdf(x - 5.0) / z;
            let lhs = post.density(t) - post.density(-t);
            let rhs = far(t) - far(-t);
            assert!((lhs - rhs).abs() < 1e-14, "t = {t}");
        }
    }

    #[test]
    fn mass_near_five_matches_closed_form() {
        let post = ToyModel::new().exact_posterior().unwrap();
        let mass = post.mass(4.0, 6.0).unwrap();
        let z = post.normalizer();
        let closed = (0.1 * (std_normal_cdf(1.0) - std_normal_cdf(-1.0))
            + 0.45 * (std_normal_cdf(6.0) - std_normal_cdf(4.0))
            + 0.45 * (std_normal_cdf(60.0) - std_normal_cdf(40.0)))
            / z;
        assert!((mass - closed).abs() < 1e-10, "{mass} vs {closed}");
        assert!((mass - 0.068_283).abs() < 1e-5);
    }

    #[test]
    fn eps_posterior_normalizes() {
        let m = ToyModel::new();
        for eps in [0.025, 0.1, 0.5, 2.0] {
            let p = m.eps_posterior(eps).unwrap();
            let total = p.cdf(10.0).unwrap();
            assert!((total - 1.0).abs() < 1e-8, "eps {eps}: {total}");
        }
        assert!(m.eps_posterior(0.0).is_err());
        assert!(m.eps_posterior(-1.0).is_err());
    }

    #[test]
    fn eps_formula_matches_closed_form() {
        let m = ToyModel::new();
        let phi = std_normal_cdf;
        for &(t, e) in &[(0.3, 0.025), (-2.0, 0.5), (4.8, 0.1)] {
            let closed = 0.45 * (phi(e - t) + phi(10.0 * (e - t)) - phi(-e - t) - phi(10.0 * (-e - t)))
                + 0.1 * (phi(e - t + 5.0) - phi(-e - t + 5.0));
            assert!((m.hit_probability(t, e) - closed).abs() < 1e-14);
        }
    }

    #[test]
    fn large_eps_tends_to_uniform() {
        let p = ToyModel::new().eps_posterior(1e3).unwrap();
        for &t in &[-9.0, 0.0, 5.0] {
            assert!((p.unnormalized(t) - 1.0).abs() < 1e-12);
            assert!((p.density(t) - 0.05).abs() < 1e-10);
        }
    }

    #[test]
    fn proposal_is_symmetric_and_scaled() {
        let m = ToyModel::new();
        let (a, b) = (ParameterVector::scalar(0.3), ParameterVector::scalar(-0.4));
        for t in [1.0, 2.5, 4.0] {
            assert_eq!(m.proposal_log_density(&a, &b, t), m.proposal_log_density(&b, &a, t));
        }
        let mut rng = stream(5, 0);
        for (t, sd) in [(1.0, 0.15), (4.0, 0.30)] {
            let n = 1_000_000;
            let xs: Vec<f64> = (0..n)
                .map(|_| m.propose(&ParameterVector::scalar(0.0), t, &mut rng)[0])
                .collect();
            let s = (xs.iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt();
            assert!((s - sd).abs() < 0.002, "T={t}: sd {s}");
        }
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(ToyModel::new().with_weights([0.5, 0.6, 0.0]).is_err());
        assert!(ToyModel::new().with_weights([-0.1, 1.1, 0.0]).is_err());
        assert!(ToyModel::new().with_weights(STANDARD_WEIGHTS).is_ok());
    }
}
