use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{ChainState, Model, ParameterVector};

#[derive(Debug, Clone)]
pub struct RejectionOutput {
    pub samples: Vec<ParameterVector>,
    /// Prior draws consumed, accepted or not.
    pub proposals_used: u64,
}

/// Draws one `(theta, z)` with `rho(S(z), S(x)) < epsilon` by sampling the
/// prior. Returns the state and the number of attempts it took.
pub fn rejection_state<M: Model, R: Rng + ?Sized>(
    model: &M,
    epsilon: f64,
    chain_index: usize,
    max_attempts: Option<u64>,
    rng: &mut R,
) -> Result<(ChainState<M::Dataset>, u64)> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {epsilon}")));
    }
    let cap = max_attempts.unwrap_or(u64::MAX);
    let mut attempts = 0u64;
    while attempts < cap {
        attempts += 1;
        let theta = model.prior_sample(rng);
        let dataset = model.simulate(&theta, rng)?;
        if let (Some(summary), distance) = model.discrepancy(&dataset) {
            if distance < epsilon {
                let state = ChainState {
                    theta,
                    dataset,
                    summary,
                    distance,
                    chain_index,
                };
                return Ok((state, attempts));
            }
        }
    }
    Err(Error::RejectionCapExceeded {
        epsilon,
        attempts: cap,
    })
}

/// Standard rejection ABC: `count` accepted draws from the prior whose
/// simulated summaries fall within `epsilon` of the observation.
///
/// `max_attempts` caps the total number of prior draws.
pub fn abc_rejection<M: Model, R: Rng + ?Sized>(
    model: &M,
    epsilon: f64,
    count: usize,
    max_attempts: Option<u64>,
    rng: &mut R,
) -> Result<RejectionOutput> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let mut samples = Vec::with_capacity(count);
    let mut used = 0u64;
    while samples.len() < count {
        let remaining = max_attempts.map(|cap| cap.saturating_sub(used));
        if remaining == Some(0) {
            return Err(Error::RejectionCapExceeded {
                epsilon,
                attempts: used,
            });
        }
        match rejection_state(model, epsilon, 0, remaining, rng) {
            Ok((state, attempts)) => {
                used += attempts;
                samples.push(state.theta);
            }
            Err(Error::RejectionCapExceeded { .. }) => {
                return Err(Error::RejectionCapExceeded {
                    epsilon,
                    attempts: max_attempts.unwrap_or(used),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(RejectionOutput {
        samples,
        proposals_used: used,
    })
}

/// Rejection ABC with a fixed budget of `proposals` prior draws. Returns the
/// accepted parameters; the acceptance rate is
/// `samples.len() / proposals_used`.
pub fn abc_rejection_budget<M: Model, R: Rng + ?Sized>(
    model: &M,
    epsilon: f64,
    proposals: u64,
    rng: &mut R,
) -> Result<RejectionOutput> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {epsilon}")));
    }
    let mut samples = Vec::new();
    for _ in 0..proposals {
        let theta = model.prior_sample(rng);
        let dataset = model.simulate(&theta, rng)?;
        if model.discrepancy(&dataset).1 < epsilon {
            samples.push(theta);
        }
    }
    Ok(RejectionOutput {
        samples,
        proposals_used: proposals,
    })
}
