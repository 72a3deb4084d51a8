use rand::Rng;

use crate::error::{Error, Result};
use crate::model::ChainState;
use crate::schedule::{RingPartition, ToleranceSchedule};

/// A pair of chains proposed for exchange, `i < j` (zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeProposal {
    pub i: usize,
    pub j: usize,
}

impl ExchangeProposal {
    /// Orders two distinct chain indices.
    pub fn new(a: usize, b: usize) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Self { i: a, j: b }),
            std::cmp::Ordering::Greater => Ok(Self { i: b, j: a }),
            std::cmp::Ordering::Equal => Err(Error::InvalidExchangePair { i: a, j: b }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeOutcome {
    Attempted { i: usize, j: usize, accepted: bool },
    /// No ring held two or more chains.
    Skipped,
}

/// The likelihood-free exchange predicate: the state of the higher
/// tolerance chain `j` moves down to chain `i` only if its dataset already
/// meets `eps_i`. Strict inequality.
#[inline]
pub fn exchange_accepts(candidate_distance: f64, lower_epsilon: f64) -> bool {
    candidate_distance < lower_epsilon
}

/// Proposes swapping the full states of chains `i < j`. Accepted iff
/// `states[j].distance < eps_i`; never simulates.
pub fn pt_exchange_attempt<D>(
    states: &mut [ChainState<D>],
    tolerances: &ToleranceSchedule,
    i: usize,
    j: usize,
) -> Result<bool> {
    if i >= j || j >= states.len() {
        return Err(Error::InvalidExchangePair { i, j });
    }
    Ok(attempt(states, tolerances.as_slice(), i, j))
}

#[inline]
fn attempt<D>(states: &mut [ChainState<D>], eps: &[f64], i: usize, j: usize) -> bool {
    let accepted = exchange_accepts(states[j].distance, eps[i]);
    if accepted {
        let (lo, hi) = states.split_at_mut(j);
        ChainState::swap_payloads(&mut lo[i], &mut hi[0]);
    }
    accepted
}

/// Two distinct indices drawn uniformly from `0..m`, i.e. a uniform
/// unordered pair.
#[inline]
fn uniform_pair<R: Rng + ?Sized>(m: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.random_range(0..m);
    let mut b = rng.random_range(0..m - 1);
    if b >= a {
        b += 1;
    }
    (a.min(b), a.max(b))
}

/// `proposals` exchange attempts, each on a pair drawn uniformly with
/// replacement from all `N(N-1)/2` pairs, applied in order to the current
/// states.
pub fn pt_exchange_phase_uniform<D, R: Rng + ?Sized>(
    states: &mut [ChainState<D>],
    tolerances: &ToleranceSchedule,
    proposals: usize,
    rng: &mut R,
) -> Vec<ExchangeOutcome> {
    let mut out = Vec::with_capacity(proposals);
    uniform_phase_into(states, tolerances.as_slice(), proposals, rng, &mut out);
    out
}

pub(crate) fn uniform_phase_into<D, R: Rng + ?Sized>(
    states: &mut [ChainState<D>],
    eps: &[f64],
    proposals: usize,
    rng: &mut R,
    out: &mut Vec<ExchangeOutcome>,
) {
    let n = states.len();
    assert!(n >= 2, "exchange phase needs at least two chains");
    for _ in 0..proposals {
        let (i, j) = uniform_pair(n, rng);
        let accepted = attempt(states, eps, i, j);
        out.push(ExchangeOutcome::Attempted { i, j, accepted });
    }
}

/// Ring of the chain's current distance.
pub fn chain_ring_index<D>(state: &ChainState<D>, rings: &RingPartition) -> Result<usize> {
    rings.ring_of(state.distance)
}

/// Reusable per-run buffers for the ring phase.
#[derive(Debug, Default)]
pub(crate) struct RingScratch {
    members: Vec<Vec<usize>>,
    eligible: Vec<usize>,
}

/// `proposals` exchange attempts restricted to chains sharing a ring: a
/// ring with at least two chains is drawn uniformly, then a pair uniformly
/// within it. Proposals with no eligible ring are recorded as skipped.
pub fn pt_exchange_phase_rings<D, R: Rng + ?Sized>(
    states: &mut [ChainState<D>],
    tolerances: &ToleranceSchedule,
    rings: &RingPartition,
    proposals: usize,
    rng: &mut R,
) -> Result<Vec<ExchangeOutcome>> {
    let mut out = Vec::with_capacity(proposals);
    let mut scratch = RingScratch::default();
    ring_phase_into(states, tolerances.as_slice(), rings, proposals, rng, &mut scratch, &mut out)?;
    Ok(out)
}

// An accepted swap exchanges the distances of two chains of the same ring,
// so ring membership is unchanged by it; computing it once per phase is
// identical to recomputing it before every proposal.
pub(crate) fn ring_phase_into<D, R: Rng + ?Sized>(
    states: &mut [ChainState<D>],
    eps: &[f64],
    rings: &RingPartition,
    proposals: usize,
    rng: &mut R,
    scratch: &mut RingScratch,
    out: &mut Vec<ExchangeOutcome>,
) -> Result<()> {
    let n = states.len();
    assert!(n >= 2, "exchange phase needs at least two chains");
    scratch.members.resize_with(rings.len(), Vec::new);
    for m in &mut scratch.members {
        m.clear();
    }
    for (c, s) in states.iter().enumerate() {
        scratch.members[rings.ring_of(s.distance)?].push(c);
    }
    scratch.eligible.clear();
    scratch
        .eligible
        .extend((0..rings.len()).filter(|&r| scratch.members[r].len() >= 2));
    if scratch.eligible.is_empty() {
        out.extend(std::iter::repeat_n(ExchangeOutcome::Skipped, proposals));
        return Ok(());
    }
    for _ in 0..proposals {
        let r = scratch.eligible[rng.random_range(0..scratch.eligible.len())];
        let members = &scratch.members[r];
        let (a, b) = uniform_pair(members.len(), rng);
        // members are pushed in chain order, so a < b implies i < j
        let (i, j) = (members[a], members[b]);
        let accepted = attempt(states, eps, i, j);
        out.push(ExchangeOutcome::Attempted { i, j, accepted });
    }
    Ok(())
}
