use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{TemperatureSchedule, ToleranceSchedule};

/// Default cap on rejection attempts when initializing one chain.
pub const DEFAULT_INIT_MAX_ATTEMPTS: u64 = 10_000_000;

/// Full specification of an ABC-PT run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtConfig {
    pub tolerances: ToleranceSchedule,
    pub temperatures: TemperatureSchedule,
    pub iterations: usize,
    pub burn_in: usize,
    pub thinning: usize,
    /// Exchange proposals per iteration; zero runs independent chains.
    pub exchanges_per_iteration: usize,
    /// Number of rings; `None` selects pairs uniformly among all chains.
    pub ring_count: Option<usize>,
    pub master_seed: u64,
    pub init_max_attempts: u64,
}

impl PtConfig {
    /// Configuration with `exchanges_per_iteration = N`, no rings and no
    /// thinning.
    pub fn new(
        tolerances: ToleranceSchedule,
        temperatures: TemperatureSchedule,
        iterations: usize,
        burn_in: usize,
        master_seed: u64,
    ) -> Result<Self> {
        let n = tolerances.len();
        let cfg = Self {
            tolerances,
            temperatures,
            iterations,
            burn_in,
            thinning: 1,
            exchanges_per_iteration: n,
            ring_count: None,
            master_seed,
            init_max_attempts: DEFAULT_INIT_MAX_ATTEMPTS,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The modified toy example setting: 15 chains, tolerances log-spaced
    /// 0.025 to 2, temperatures log-spaced 1 to 4, 600k iterations with 150k
    /// burn-in.
    pub fn toy_preset(master_seed: u64) -> Self {
        Self::new(
            ToleranceSchedule::log_spaced(0.025, 2.0, 15).expect("valid"),
            TemperatureSchedule::log_spaced(4.0, 15).expect("valid"),
            600_000,
            150_000,
            master_seed,
        )
        .expect("valid preset")
    }

    /// The tuberculosis setting: 7 chains, tolerances log-spaced 0.01 to
    /// 0.1, temperatures log-spaced 1 to 2, 20k iterations with 2k burn-in.
    pub fn tb_preset(master_seed: u64) -> Self {
        Self::new(
            ToleranceSchedule::log_spaced(0.01, 0.1, 7).expect("valid"),
            TemperatureSchedule::log_spaced(2.0, 7).expect("valid"),
            20_000,
            2_000,
            master_seed,
        )
        .expect("valid preset")
    }

    pub fn n_chains(&self) -> usize {
        self.tolerances.len()
    }

    pub fn with_rings(mut self, k: Option<usize>) -> Result<Self> {
        self.ring_count = k;
        self.validate()?;
        Ok(self)
    }

    pub fn with_exchanges(mut self, per_iteration: usize) -> Self {
        self.exchanges_per_iteration = per_iteration;
        self
    }

    pub fn with_iterations(mut self, iterations: usize, burn_in: usize) -> Result<Self> {
        self.iterations = iterations;
        self.burn_in = burn_in;
        self.validate()?;
        Ok(self)
    }

    pub fn independent_chains(&self) -> bool {
        self.exchanges_per_iteration == 0
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.tolerances.len();
        if n < 2 {
            return Err(Error::InvalidConfig("ABC-PT needs at least two chains".into()));
        }
        if self.temperatures.len() != n {
            return Err(Error::InvalidConfig(format!(
                "{} temperatures for {} tolerance levels",
                self.temperatures.len(),
                n
            )));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::InvalidConfig(format!(
                "burn-in ({}) must be smaller than iterations ({})",
                self.burn_in, self.iterations
            )));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidConfig("thinning must be at least 1".into()));
        }
        if let Some(k) = self.ring_count {
            if k == 0 || k > n {
                return Err(Error::InvalidConfig(format!(
                    "ring count {k} must lie in 1..={n}"
                )));
            }
        }
        if self.init_max_attempts == 0 {
            return Err(Error::InvalidConfig("init_max_attempts must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_preset_is_valid() {
        let c = PtConfig::toy_preset(1);
        assert_eq!(c.n_chains(), 15);
        assert_eq!(c.exchanges_per_iteration, 15);
        assert!((c.temperatures.get(14) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_settings() {
        let c = PtConfig::toy_preset(1);
        assert!(c.clone().with_iterations(10, 10).is_err());
        assert!(c.clone().with_rings(Some(0)).is_err());
        assert!(c.clone().with_rings(Some(16)).is_err());
        let mut t = c.clone();
        t.thinning = 0;
        assert!(t.validate().is_err());
        let one = PtConfig::new(
            ToleranceSchedule::new(vec![1.0]).unwrap(),
            TemperatureSchedule::new(vec![1.0]).unwrap(),
            10,
            1,
            0,
        );
        assert!(one.is_err());
        let mismatch = PtConfig::new(
            ToleranceSchedule::new(vec![1.0, 2.0]).unwrap(),
            TemperatureSchedule::new(vec![1.0]).unwrap(),
            10,
            1,
            0,
        );
        assert!(mismatch.is_err());
    }
}
