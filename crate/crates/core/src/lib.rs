//! Likelihood-free Bayesian inference with parallel tempering.
//!
//! The crate implements ABC-PT: a population of ABC-MCMC chains, each
//! holding a state inside its own tolerance `eps_i` and moving with a kernel
//! tempered by `T_i`, plus exchange moves that swap whole states between
//! chains. An exchange between chains `i < j` is accepted exactly when the
//! state of chain `j` already lies within `eps_i`, so no likelihood is ever
//! evaluated. Exchange pairs may be restricted to rings of chains whose
//! current distances are close.
//!
//! Rejection ABC and plain ABC-MCMC are provided as baselines, together with
//! two models: a Gaussian mixture with known posterior ([`toy`]) and a
//! tuberculosis transmission model ([`tb`]).
//!
//! ```
//! use abcpt::{run_abc_pt, PtConfig, TemperatureSchedule, ToleranceSchedule, toy::ToyModel};
//!
//! let config = PtConfig::new(
//!     ToleranceSchedule::log_spaced(0.1, 2.0, 5)?,
//!     TemperatureSchedule::log_spaced(4.0, 5)?,
//!     2_000,
//!     500,
//!     7,
//! )?;
//! let out = run_abc_pt(&config, &ToyModel::new())?;
//! let first_chain = out.chain_component(0, 0);
//! assert_eq!(first_chain.len(), 1_500);
//! # Ok::<(), abcpt::Error>(())
//! ```

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod quadrature;
pub mod rng;
pub mod samplers;
pub mod schedule;
pub mod special;
pub mod tb;
pub mod toy;
pub mod trace;

pub use config::{PtConfig, DEFAULT_INIT_MAX_ATTEMPTS};
pub use error::{Error, Result};
pub use model::{ChainState, Model, ParameterVector, SummaryValue};
pub use rng::{rng_streams, stream, StreamRng};
pub use samplers::*;
pub use schedule::{
    log_spaced_schedule, ring_partition, RingPartition, TemperatureSchedule, ToleranceSchedule,
};
pub use trace::{ExchangeEvent, Trace};
