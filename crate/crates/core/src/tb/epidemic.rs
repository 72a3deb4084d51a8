//! Event-driven birth, death and mutation process over genotype clusters.
//!
//! Only the embedded jump chain is simulated: each event is a birth, death
//! or mutation with probabilities proportional to `(alpha, delta, theta)`,
//! applied to a case chosen uniformly. Event times are not tracked.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::clusters::ClusterConfiguration;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TbParams {
    pub alpha: f64,
    pub delta: f64,
    pub theta_mut: f64,
}

impl TbParams {
    pub fn new(alpha: f64, delta: f64, theta_mut: f64) -> Self {
        Self { alpha, delta, theta_mut }
    }

    pub fn from_slice(v: &[f64]) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn to_vec(self) -> Vec<f64> {
        vec![self.alpha, self.delta, self.theta_mut]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Birth,
    Death,
    Mutation,
}

/// Live cases and their genotypes.
///
/// Counts live in a slot array whose emptied slots are recycled through a
/// free list, so memory is proportional to the number of live genotypes.
/// `cases` holds the slot of every live case, which makes drawing a case
/// uniformly O(1).
#[derive(Debug, Clone)]
pub struct EpidemicPopulation {
    counts: Vec<u32>,
    free: Vec<u32>,
    cases: Vec<u32>,
    genotypes_ever: u64,
}

impl Default for EpidemicPopulation {
    fn default() -> Self {
        Self::new()
    }
}

impl EpidemicPopulation {
    /// One case of the ancestral genotype.
    pub fn new() -> Self {
        Self {
            counts: vec![1],
            free: Vec::new(),
            cases: vec![0],
            genotypes_ever: 1,
        }
    }

    /// A population with the given positive genotype counts.
    pub fn from_counts(counts: &[u32]) -> Result<Self> {
        if counts.is_empty() || counts.contains(&0) {
            return Err(Error::InvalidArgument("genotype counts must be positive".into()));
        }
        let cases = counts
            .iter()
            .enumerate()
            .flat_map(|(slot, &c)| std::iter::repeat_n(slot as u32, c as usize))
            .collect();
        Ok(Self {
            counts: counts.to_vec(),
            free: Vec::new(),
            cases,
            genotypes_ever: counts.len() as u64,
        })
    }

    pub fn total_cases(&self) -> usize {
        self.cases.len()
    }

    /// Number of genotypes that have ever existed, `G(t)`.
    pub fn genotypes_ever(&self) -> u64 {
        self.genotypes_ever
    }

    pub fn live_genotypes(&self) -> usize {
        self.counts.len() - self.free.len()
    }

    /// Case counts of the live genotypes, in slot order.
    pub fn genotype_counts(&self) -> Vec<u32> {
        self.counts.iter().copied().filter(|&c| c > 0).collect()
    }

    /// The live genotype counts as a cluster configuration.
    pub fn configuration(&self) -> Result<ClusterConfiguration> {
        ClusterConfiguration::new(self.genotype_counts())
    }

    fn new_slot(&mut self) -> u32 {
        self.genotypes_ever += 1;
        match self.free.pop() {
            Some(s) => {
                self.counts[s as usize] = 1;
                s
            }
            None => {
                self.counts.push(1);
                (self.counts.len() - 1) as u32
            }
        }
    }

    fn decrement(&mut self, slot: u32) {
        let c = &mut self.counts[slot as usize];
        *c -= 1;
        if *c == 0 {
            self.free.push(slot);
        }
    }

    fn apply<R: Rng + ?Sized>(&mut self, kind: EventKind, rng: &mut R) {
        let k = rng.random_range(0..self.cases.len());
        let slot = self.cases[k];
        match kind {
            EventKind::Birth => {
                self.counts[slot as usize] += 1;
                self.cases.push(slot);
            }
            EventKind::Death => {
                self.cases.swap_remove(k);
                self.decrement(slot);
            }
            EventKind::Mutation => {
                self.decrement(slot);
                self.cases[k] = self.new_slot();
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum EpidemicOutcome {
    Reached(EpidemicPopulation),
    Extinct,
}

impl EpidemicOutcome {
    pub fn is_extinct(&self) -> bool {
        matches!(self, Self::Extinct)
    }
}

/// Runs the process from a single case until `stop_size` cases or
/// extinction.
pub fn simulate_epidemic<R: Rng + ?Sized>(
    params: &TbParams,
    stop_size: usize,
    max_events: u64,
    rng: &mut R,
) -> Result<EpidemicOutcome> {
    simulate_epidemic_observed(params, stop_size, max_events, rng, |_, _| {})
}

/// As [`simulate_epidemic`], calling `observe` after every event.
pub fn simulate_epidemic_observed<R, F>(
    params: &TbParams,
    stop_size: usize,
    max_events: u64,
    rng: &mut R,
    mut observe: F,
) -> Result<EpidemicOutcome>
where
    R: Rng + ?Sized,
    F: FnMut(EventKind, &EpidemicPopulation),
{
    let TbParams { alpha, delta, theta_mut } = *params;
    if stop_size == 0 {
        return Err(Error::InvalidArgument("stop size must be at least 1".into()));
    }
    if ![alpha, delta, theta_mut].iter().all(|r| *r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!("rates must be nonnegative, got {params:?}")));
    }
    let mut pop = EpidemicPopulation::new();
    let total = alpha + delta + theta_mut;
    let mut events = 0u64;
    while pop.total_cases() < stop_size {
        if events >= max_events || total == 0.0 {
            return Err(Error::MaxEventsExceeded(max_events));
        }
        let u = rng.random::<f64>() * total;
        let kind = if u < alpha {
            EventKind::Birth
        } else if u < alpha + delta {
            EventKind::Death
        } else {
            EventKind::Mutation
        };
        pop.apply(kind, rng);
        events += 1;
        observe(kind, &pop);
        if pop.total_cases() == 0 {
            return Ok(EpidemicOutcome::Extinct);
        }
    }
    Ok(EpidemicOutcome::Reached(pop))
}

/// Draws `n` cases uniformly without replacement and groups them by
/// genotype.
pub fn subsample_cases<R: Rng + ?Sized>(
    population: &EpidemicPopulation,
    n: usize,
    rng: &mut R,
) -> Result<ClusterConfiguration> {
    let mut sampled = subsample_genotype_counts(population, n, rng)?;
    sampled.retain(|&c| c > 0);
    ClusterConfiguration::new(sampled)
}

/// Sampled case counts per live genotype, aligned with
/// [`EpidemicPopulation::genotype_counts`]; genotypes missed by the sample
/// get 0.
pub fn subsample_genotype_counts<R: Rng + ?Sized>(
    population: &EpidemicPopulation,
    n: usize,
    rng: &mut R,
) -> Result<Vec<u32>> {
    let available = population.total_cases();
    if n > available {
        return Err(Error::PopulationTooSmall { available, requested: n });
    }
    let mut sampled = vec![0u32; population.counts.len()];
    for k in rand::seq::index::sample(rng, available, n) {
        sampled[population.cases[k] as usize] += 1;
    }
    Ok(population
        .counts
        .iter()
        .zip(sampled)
        .filter(|(&c, _)| c > 0)
        .map(|(_, s)| s)
        .collect())
}
