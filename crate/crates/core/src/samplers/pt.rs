use rayon::prelude::*;

use super::exchange::{ring_phase_into, uniform_phase_into, ExchangeOutcome, RingScratch};
use super::mcmc::local_move;
use super::rejection::rejection_state;
use crate::config::PtConfig;
use crate::error::{Error, Result};
use crate::model::{ChainState, Model, ParameterVector};
use crate::rng::{rng_streams, StreamRng};
use crate::schedule::{ring_partition, RingPartition};
use crate::trace::{ExchangeEvent, Trace};

#[derive(Debug, Clone)]
pub struct PtOutput<D> {
    pub config: PtConfig,
    pub trace: Trace,
    pub final_states: Vec<ChainState<D>>,
    /// Prior draws each chain needed during rejection initialization.
    pub init_proposals: Vec<u64>,
    pub rings: Option<RingPartition>,
}

impl<D> PtOutput<D> {
    /// Post-burn-in, thinned samples of `chain` (zero-based; chain 0 is the
    /// chain of interest).
    pub fn chain_samples(&self, chain: usize) -> Vec<ParameterVector> {
        self.trace
            .samples(chain, self.config.burn_in, self.config.thinning)
    }

    /// Coordinate `k` of `chain`, post-burn-in and thinned.
    pub fn chain_component(&self, chain: usize, k: usize) -> Vec<f64> {
        self.trace
            .component(chain, k, self.config.burn_in, self.config.thinning)
    }
}

/// Draws every chain's starting state by rejection ABC at its own
/// tolerance, using that chain's stream. Returns the states and the prior
/// draws each one needed.
pub fn pt_initialize<M: Model>(
    config: &PtConfig,
    model: &M,
    chain_rngs: &mut [StreamRng],
) -> Result<(Vec<ChainState<M::Dataset>>, Vec<u64>)> {
    let n = config.n_chains();
    if chain_rngs.len() < n {
        return Err(Error::InvalidArgument(format!(
            "{} random streams for {n} chains",
            chain_rngs.len()
        )));
    }
    let results: Vec<Result<(ChainState<M::Dataset>, u64)>> = chain_rngs[..n]
        .par_iter_mut()
        .enumerate()
        .map(|(c, rng)| {
            rejection_state(
                model,
                config.tolerances.get(c),
                c,
                Some(config.init_max_attempts),
                rng,
            )
        })
        .collect();
    let mut states = Vec::with_capacity(n);
    let mut attempts = Vec::with_capacity(n);
    for r in results {
        let (s, a) = r?;
        states.push(s);
        attempts.push(a);
    }
    Ok((states, attempts))
}

/// Runs ABC-PT on the calling thread.
pub fn run_abc_pt<M: Model>(config: &PtConfig, model: &M) -> Result<PtOutput<M::Dataset>> {
    run(config, model, false)
}

/// Runs ABC-PT with local moves spread over `workers` threads. The output
/// is identical for every worker count.
pub fn run_abc_pt_with_workers<M: Model>(
    config: &PtConfig,
    model: &M,
    workers: usize,
) -> Result<PtOutput<M::Dataset>> {
    if workers <= 1 {
        return run(config, model, false);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| run(config, model, true))
}

fn run<M: Model>(config: &PtConfig, model: &M, parallel: bool) -> Result<PtOutput<M::Dataset>> {
    config.validate()?;
    if config.iterations > u32::MAX as usize {
        return Err(Error::InvalidConfig("iterations exceed 2^32 - 1".into()));
    }
    let n = config.n_chains();
    if n > u16::MAX as usize {
        return Err(Error::InvalidConfig("too many chains".into()));
    }
    let eps = config.tolerances.as_slice();
    let temps = config.temperatures.as_slice();
    let rings = config
        .ring_count
        .map(|k| ring_partition(&config.tolerances, k))
        .transpose()?;

    let mut rngs = rng_streams(config.master_seed, n);
    let mut selection_rng = rngs.pop().expect("n + 1 streams");
    let (mut states, init_proposals) = pt_initialize(config, model, &mut rngs)?;

    let mut trace = Trace::new(model.name(), model.parameter_names(), eps.to_vec());
    trace.reserve(config.iterations);
    let mut accepted = vec![false; n];
    let mut outcomes = Vec::with_capacity(config.exchanges_per_iteration);
    let mut scratch = RingScratch::default();

    for t in 0..config.iterations {
        if parallel {
            states
                .par_iter_mut()
                .zip(rngs.par_iter_mut())
                .zip(accepted.par_iter_mut())
                .enumerate()
                .try_for_each(|(c, ((s, rng), a))| {
                    *a = local_move(model, s, eps[c], temps[c], rng)?;
                    Ok::<_, Error>(())
                })?;
        } else {
            for (c, (s, rng)) in states.iter_mut().zip(rngs.iter_mut()).enumerate() {
                accepted[c] = local_move(model, s, eps[c], temps[c], rng)?;
            }
        }

        if config.exchanges_per_iteration > 0 {
            outcomes.clear();
            match &rings {
                Some(r) => ring_phase_into(
                    &mut states,
                    eps,
                    r,
                    config.exchanges_per_iteration,
                    &mut selection_rng,
                    &mut scratch,
                    &mut outcomes,
                )?,
                None => uniform_phase_into(
                    &mut states,
                    eps,
                    config.exchanges_per_iteration,
                    &mut selection_rng,
                    &mut outcomes,
                ),
            }
            let mut skipped = 0;
            for o in &outcomes {
                match *o {
                    ExchangeOutcome::Attempted { i, j, accepted } => {
                        trace.push_exchange(ExchangeEvent {
                            iteration: t as u32,
                            i: i as u16,
                            j: j as u16,
                            accepted,
                        })
                    }
                    ExchangeOutcome::Skipped => skipped += 1,
                }
            }
            trace.add_skipped(skipped);
        }

        debug_assert!(
            states.iter().zip(eps).all(|(s, &e)| s.distance < e),
            "chain left its tolerance at iteration {t}"
        );
        trace.record_iteration(&states, &accepted);
    }

    Ok(PtOutput {
        config: config.clone(),
        trace,
        final_states: states,
        init_proposals,
        rings,
    })
}
