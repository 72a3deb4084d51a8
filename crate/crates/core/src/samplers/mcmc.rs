use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{ChainState, Model, ParameterVector};
use crate::trace::Trace;

#[derive(Debug, Clone)]
pub struct LocalMoveOutcome<D> {
    pub accepted: bool,
    pub new_state: ChainState<D>,
}

/// One ABC-MCMC update of `state` in place. Returns whether the proposal
/// was accepted.
///
/// The Metropolis–Hastings ratio keeps the full prior and proposal terms;
/// the proposal is accepted only if its simulated summary also falls within
/// `epsilon`. A proposal outside the prior support is rejected without
/// simulating.
pub fn local_move<M: Model, R: Rng + ?Sized>(
    model: &M,
    state: &mut ChainState<M::Dataset>,
    epsilon: f64,
    temperature: f64,
    rng: &mut R,
) -> Result<bool> {
    let current_lp = model.prior_log_density(&state.theta);
    if current_lp == f64::NEG_INFINITY {
        return Err(Error::ZeroPriorAtCurrent {
            chain: state.chain_index,
        });
    }
    let proposal = model.propose(&state.theta, temperature, rng);
    let proposal_lp = model.prior_log_density(&proposal);
    if proposal_lp == f64::NEG_INFINITY {
        return Ok(false);
    }
    let dataset = model.simulate(&proposal, rng)?;
    let (summary, distance) = model.discrepancy(&dataset);
    let Some(summary) = summary else {
        return Ok(false);
    };
    if !(distance < epsilon) {
        return Ok(false);
    }
    let log_ratio = proposal_lp - current_lp
        + model.proposal_log_density(&state.theta, &proposal, temperature)
        - model.proposal_log_density(&proposal, &state.theta, temperature);
    if log_ratio < 0.0 && rng.random::<f64>().ln() >= log_ratio {
        return Ok(false);
    }
    state.theta = proposal;
    state.dataset = dataset;
    state.summary = summary;
    state.distance = distance;
    Ok(true)
}

/// Value-passing form of [`local_move`].
pub fn abc_mcmc_step<M: Model, R: Rng + ?Sized>(
    state: ChainState<M::Dataset>,
    model: &M,
    epsilon: f64,
    temperature: f64,
    rng: &mut R,
) -> Result<LocalMoveOutcome<M::Dataset>> {
    if !(state.distance < epsilon) {
        return Err(Error::StateOutsideTolerance {
            distance: state.distance,
            epsilon,
        });
    }
    let mut new_state = state;
    let accepted = local_move(model, &mut new_state, epsilon, temperature, rng)?;
    Ok(LocalMoveOutcome { accepted, new_state })
}

#[derive(Debug, Clone)]
pub struct McmcOutput<D> {
    pub trace: Trace,
    pub final_state: ChainState<D>,
    pub burn_in: usize,
}

impl<D> McmcOutput<D> {
    pub fn samples(&self, thin: usize) -> Vec<ParameterVector> {
        self.trace.samples(0, self.burn_in.min(self.trace.iterations()), thin)
    }

    pub fn acceptance_rate(&self) -> f64 {
        let flags = self.trace.local_accepts(0);
        if flags.is_empty() {
            return 0.0;
        }
        flags.iter().filter(|&&a| a).count() as f64 / flags.len() as f64
    }
}

/// Single-chain ABC-MCMC for `iterations` steps from `init`. The trace
/// stores every step; `burn_in` is applied by [`McmcOutput::samples`].
pub fn abc_mcmc_run<M: Model, R: Rng + ?Sized>(
    model: &M,
    epsilon: f64,
    temperature: f64,
    iterations: usize,
    burn_in: usize,
    init: ChainState<M::Dataset>,
    rng: &mut R,
) -> Result<McmcOutput<M::Dataset>> {
    if !(init.distance < epsilon) {
        return Err(Error::StateOutsideTolerance {
            distance: init.distance,
            epsilon,
        });
    }
    let mut trace = Trace::new(model.name(), model.parameter_names(), vec![epsilon]);
    trace.reserve(iterations);
    let mut state = [init];
    for _ in 0..iterations {
        let accepted = local_move(model, &mut state[0], epsilon, temperature, rng)?;
        trace.record_iteration(&state, &[accepted]);
    }
    let [final_state] = state;
    Ok(McmcOutput {
        trace,
        final_state,
        burn_in,
    })
}
