//! `abcpt validate`: fast checks of the samplers and models against
//! analytic oracles.

use std::io::Write;
use std::time::Instant;

use abcpt::tb::{default_sigma, simulate_epidemic, stat_g, stat_h, ClusterConfiguration, KernelPower, TbParams, TemperedKernel};
use abcpt::toy::ToyModel;
use abcpt::{exchange_accepts, log_spaced_schedule, ring_partition, stream, ToleranceSchedule};
use rand::Rng;

use crate::error::Result;

/// Decides an exchange from the candidate's distance and the lower chain's
/// tolerance.
pub type ExchangePredicate = fn(f64, f64) -> bool;

/// The tolerance schedule of the modified toy example, rounded to four
/// decimals.
pub const TOY_SCHEDULE: [f64; 15] = [
    0.025, 0.0342, 0.0468, 0.0639, 0.0874, 0.1196, 0.1635, 0.2236, 0.3058, 0.4182, 0.5719, 0.7820, 1.0694,
    1.4625, 2.0,
];
pub const TOY_RING_BOUNDARIES: [f64; 2] = [0.103, 0.495];

#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub seed: u64,
    pub exchange_predicate: ExchangePredicate,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            exchange_predicate: exchange_accepts,
        }
    }
}

/// A deliberately wrong predicate (non-strict inequality) used to check
/// that the oracle notices.
pub fn non_strict_predicate(distance: f64, epsilon: f64) -> bool {
    distance <= epsilon
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Runs every check, printing one `PASS`/`FAIL` line each. Returns the
/// checks; the command succeeds iff all passed.
pub fn cmd_validate(opts: &ValidateOptions, log: &mut dyn Write) -> Result<Vec<Check>> {
    let steps: [fn(&ValidateOptions) -> Result<Check>; 7] = [
        schedule,
        rings,
        toy_hit_probabilities,
        toy_rejection_rate,
        exchange_oracle,
        tb_extinction,
        tb_observed_and_kernel,
    ];
    let mut checks = Vec::new();
    for step in steps {
        let t = Instant::now();
        let c = step(opts)?;
        let tag = if c.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(log, "{tag} {}: {} ({:.2} s)", c.name, c.detail, t.elapsed().as_secs_f64());
        checks.push(c);
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(log, "{} checks, {failed} failed", checks.len());
    Ok(checks)
}

fn schedule(_: &ValidateOptions) -> Result<Check> {
    let s = log_spaced_schedule(0.025, 2.0, 15)?;
    let rounded: Vec<f64> = s.iter().map(|x| (x * 1e4).round() / 1e4).collect();
    Ok(Check {
        name: "toy-schedule",
        pass: rounded == TOY_SCHEDULE,
        detail: format!("{rounded:?}"),
    })
}

fn rings(_: &ValidateOptions) -> Result<Check> {
    let r = ring_partition(&ToleranceSchedule::log_spaced(0.025, 2.0, 15)?, 3)?;
    let b = r.boundaries();
    let pass = b.len() == 4
        && b[1..3]
            .iter()
            .zip(TOY_RING_BOUNDARIES)
            .all(|(x, y)| (x - y).abs() <= 1e-3);
    Ok(Check {
        name: "ring-boundaries",
        pass,
        detail: format!("{b:?}"),
    })
}

/// Count within three standard errors of its binomial expectation.
fn within_3se(hits: u64, n: u64, p: f64) -> bool {
    let mean = n as f64 * p;
    let sd = (mean * (1.0 - p)).sqrt();
    (hits as f64 - mean).abs() <= 3.0 * sd
}

fn toy_hit_probabilities(opts: &ValidateOptions) -> Result<Check> {
    let toy = ToyModel::new();
    let eps = 0.025;
    let post = toy.eps_posterior(eps)?;
    let draws = 200_000u64;
    let mut rng = stream(opts.seed, 1);
    let mut bad = Vec::new();
    let grid = [-2.0, -1.0, -0.2, 0.0, 0.1, 0.5, 1.0, 2.0, 4.5, 5.0, 5.5];
    for theta in grid {
        let hits = (0..draws).filter(|_| toy.simulate_scalar(theta, &mut rng).abs() < eps).count() as u64;
        let p = post.unnormalized(theta);
        if !within_3se(hits, draws, p) {
            bad.push(theta);
        }
    }
    Ok(Check {
        name: "toy-eps-posterior",
        pass: bad.is_empty(),
        detail: format!("{} grid points, {draws} simulations each; outside 3 SE at {bad:?}", grid.len()),
    })
}

fn toy_rejection_rate(opts: &ValidateOptions) -> Result<Check> {
    let toy = ToyModel::new();
    let eps = 0.025;
    let p = toy.rejection_acceptance_probability(eps)?;
    let n = 400_000u64;
    let out = abcpt::abc_rejection_budget(&toy, eps, n, &mut stream(opts.seed, 2))?;
    let hits = out.samples.len() as u64;
    Ok(Check {
        name: "toy-rejection-rate",
        pass: within_3se(hits, n, p),
        detail: format!("{hits}/{n} accepted, analytic rate {:.4}%", 100.0 * p),
    })
}

/// Metropolis ratio of swapping chains `i < j`: each held state weighs
/// `weight * 1{d < eps}` under its chain's tempered target.
fn swap_ratio(eps: &[f64], d: &[f64], weight: &[f64], i: usize, j: usize) -> f64 {
    let target = |k: usize, holder: usize| if d[holder] < eps[k] { weight[holder] } else { 0.0 };
    (target(i, j) * target(j, i)) / (target(i, i) * target(j, j))
}

fn exchange_oracle(opts: &ValidateOptions) -> Result<Check> {
    let mut rng = stream(opts.seed, 3);
    let instances = 10_000;
    let mut mismatches = 0;
    let mut accepted = 0;
    for _ in 0..instances {
        let n = rng.random_range(2..9);
        let mut eps: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..5.0)).collect();
        eps.sort_by(f64::total_cmp);
        eps.dedup();
        if eps.len() < 2 {
            continue;
        }
        let n = eps.len();
        let i = rng.random_range(0..n - 1);
        let j = rng.random_range(i + 1..n);
        // every chain currently satisfies its own tolerance
        let mut d: Vec<f64> = eps.iter().map(|&e| rng.random_range(0.0..e)).collect();
        match rng.random_range(0..4) {
            0 => d[j] = eps[i],
            1 => d[j] = 0.0,
            _ => {}
        }
        let weight: Vec<f64> = (0..n).map(|_| rng.random_range(1e-3..10.0)).collect();
        let mh = swap_ratio(&eps, &d, &weight, i, j).min(1.0);
        let got = (opts.exchange_predicate)(d[j], eps[i]);
        if got != (mh == 1.0) || (mh != 0.0 && mh != 1.0) {
            mismatches += 1;
        }
        accepted += usize::from(got);
    }
    Ok(Check {
        name: "exchange-predicate",
        pass: mismatches == 0,
        detail: format!("{instances} instances, {accepted} accepted, {mismatches} disagree with the Metropolis ratio"),
    })
}

fn tb_extinction(opts: &ValidateOptions) -> Result<Check> {
    let (alpha, delta) = (2.0, 1.0);
    let params = TbParams::new(alpha, delta, 0.0);
    let runs = 20_000;
    let mut rng = stream(opts.seed, 4);
    let mut extinct = 0u64;
    for _ in 0..runs {
        // reaching 200 cases leaves a further extinction chance of 2^-200
        if simulate_epidemic(&params, 200, u64::MAX, &mut rng)?.is_extinct() {
            extinct += 1;
        }
    }
    let q = delta / alpha;
    Ok(Check {
        name: "tb-extinction",
        pass: within_3se(extinct, runs, q),
        detail: format!(
            "{extinct}/{runs} extinct for alpha={alpha}, delta={delta}, theta=0; expected {q}"
        ),
    })
}

fn tb_observed_and_kernel(_: &ValidateOptions) -> Result<Check> {
    let obs = ClusterConfiguration::observed();
    let (g, h) = (stat_g(&obs), stat_h(&obs));
    let h_expect = 1.0 - 2411.0 / 223_729.0;
    let kernel = TemperedKernel::new(default_sigma(), KernelPower::Spectral)?;
    let half = kernel.covariance(2.0);
    let err = (half * half - default_sigma()).abs().max();
    Ok(Check {
        name: "tb-statistics-and-kernel",
        pass: g == 326 && (h - h_expect).abs() < 1e-15 && err <= 1e-12 && obs.sample_size() == 473,
        detail: format!("n = {}, g = {g}, H = {h:.6}, |(Sigma^1/2)^2 - Sigma| = {err:.1e}", obs.sample_size()),
    })
}
