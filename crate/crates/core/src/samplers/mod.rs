//! Rejection ABC, ABC-MCMC and ABC-PT.

mod exchange;
mod mcmc;
mod pt;
mod rejection;

pub use exchange::{
    chain_ring_index, exchange_accepts, pt_exchange_attempt, pt_exchange_phase_rings,
    pt_exchange_phase_uniform, ExchangeOutcome, ExchangeProposal,
};
pub use mcmc::{abc_mcmc_run, abc_mcmc_step, local_move, LocalMoveOutcome, McmcOutput};
pub use pt::{pt_initialize, run_abc_pt, run_abc_pt_with_workers, PtOutput};
pub use rejection::{abc_rejection, abc_rejection_budget, rejection_state, RejectionOutput};
