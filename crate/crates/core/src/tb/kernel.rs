//! Tempered multivariate normal proposal `N(phi, Sigma^(1/T))`.

use std::f64::consts::PI;

use nalgebra::{Cholesky, Matrix3, SymmetricEigen, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How `Sigma^(1/T)` is read.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelPower {
    /// Symmetric matrix power through the eigendecomposition.
    #[default]
    Spectral,
    /// Each entry raised to `1/T`, signs kept.
    Entrywise,
}

/// The base covariance of the tuberculosis kernel.
pub fn default_sigma() -> Matrix3<f64> {
    Matrix3::new(0.25, 0.225, 0.0, 0.225, 0.25, 0.0, 0.0, 0.0, 0.000225)
}

#[derive(Debug, Clone)]
struct Factor {
    temperature: f64,
    chol: Matrix3<f64>,
    log_det: f64,
}

#[derive(Debug, Clone)]
pub struct TemperedKernel {
    sigma: Matrix3<f64>,
    eigen: SymmetricEigen<f64, nalgebra::U3>,
    power: KernelPower,
    cache: Vec<Factor>,
}

impl TemperedKernel {
    pub fn new(sigma: Matrix3<f64>, power: KernelPower) -> Result<Self> {
        if (sigma - sigma.transpose()).abs().max() > 1e-15 * sigma.abs().max() {
            return Err(Error::NotPositiveDefinite("covariance is not symmetric".into()));
        }
        let eigen = SymmetricEigen::new(sigma);
        if eigen.eigenvalues.iter().any(|&l| !(l > 0.0)) {
            return Err(Error::NotPositiveDefinite(format!(
                "eigenvalues {:?}",
                eigen.eigenvalues.as_slice()
            )));
        }
        let mut k = Self { sigma, eigen, power, cache: Vec::new() };
        k.prepare(&[1.0])?;
        Ok(k)
    }

    pub fn sigma(&self) -> &Matrix3<f64> {
        &self.sigma
    }

    pub fn power(&self) -> KernelPower {
        self.power
    }

    /// `Sigma^(1/T)` under the configured reading.
    pub fn covariance(&self, temperature: f64) -> Matrix3<f64> {
        let p = 1.0 / temperature;
        match self.power {
            KernelPower::Spectral => {
                let d = Matrix3::from_diagonal(&self.eigen.eigenvalues.map(|l| l.powf(p)));
                let v = &self.eigen.eigenvectors;
                let m = v * d * v.transpose();
                (m + m.transpose()) * 0.5
            }
            KernelPower::Entrywise => self.sigma.map(|x| x.signum() * x.abs().powf(p)),
        }
    }

    fn factor(&self, temperature: f64) -> Result<Factor> {
        if !(temperature >= 1.0 && temperature.is_finite()) {
            return Err(Error::InvalidArgument(format!("temperature must be >= 1, got {temperature}")));
        }
        let cov = self.covariance(temperature);
        let chol = Cholesky::new(cov)
            .ok_or_else(|| Error::NotPositiveDefinite(format!("Sigma^(1/{temperature}) is not positive definite")))?
            .unpack();
        let log_det = 2.0 * chol.diagonal().iter().map(|d| d.ln()).sum::<f64>();
        Ok(Factor { temperature, chol, log_det })
    }

    /// Precomputes and validates the factors for a temperature schedule.
    pub fn prepare(&mut self, temperatures: &[f64]) -> Result<()> {
        for &t in temperatures {
            if !self.cache.iter().any(|f| f.temperature == t) {
                let f = self.factor(t)?;
                self.cache.push(f);
            }
        }
        Ok(())
    }

    fn lookup(&self, temperature: f64) -> std::borrow::Cow<'_, Factor> {
        match self.cache.iter().find(|f| f.temperature == temperature) {
            Some(f) => std::borrow::Cow::Borrowed(f),
            None => std::borrow::Cow::Owned(
                self.factor(temperature)
                    .expect("temperature not prepared and its covariance is not positive definite"),
            ),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, mean: &[f64], temperature: f64, rng: &mut R) -> Vec<f64> {
        let f = self.lookup(temperature);
        let z = Vector3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
        let x = Vector3::new(mean[0], mean[1], mean[2]) + f.chol * z;
        x.iter().copied().collect()
    }

    pub fn log_density(&self, to: &[f64], from: &[f64], temperature: f64) -> f64 {
        let f = self.lookup(temperature);
        let diff = Vector3::new(to[0] - from[0], to[1] - from[1], to[2] - from[2]);
        let y = f
            .chol
            .solve_lower_triangular(&diff)
            .expect("Cholesky factor has a positive diagonal");
        -0.5 * y.norm_squared() - 0.5 * f.log_det - 1.5 * (2.0 * PI).ln()
    }
}
