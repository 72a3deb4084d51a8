//! Post-run analysis: acceptance tables, exchange matrices,
//! autocorrelations, posterior summaries and density estimates.
//!
//! Everything here is a pure function of a finished [`Trace`] or of sample
//! vectors.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::Trace;

/// Sample autocorrelation at `lag`, normalized by the lag-0 autocovariance
/// (divisor `n` for both).
pub fn autocorrelation(series: &[f64], lag: usize) -> Result<f64> {
    let n = series.len();
    if lag >= n {
        return Err(Error::InvalidArgument(format!("lag {lag} >= series length {n}")));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let c0: f64 = series.iter().map(|x| (x - mean) * (x - mean)).sum();
    if !(c0 > 0.0) {
        return Err(Error::Undefined("autocorrelation of a constant series".into()));
    }
    let ck: f64 = series[..n - lag]
        .iter()
        .zip(&series[lag..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum();
    Ok(ck / c0)
}

/// Every `k`-th element, starting with the first.
pub fn thin<T: Clone>(series: &[T], k: usize) -> Vec<T> {
    assert!(k >= 1, "thinning factor must be at least 1");
    series.iter().step_by(k).cloned().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceRow {
    /// One-based chain label.
    pub chain: usize,
    pub epsilon: f64,
    pub local_rate: f64,
    pub accepted_exchanges: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceTable {
    pub rows: Vec<AcceptanceRow>,
    pub iterations: usize,
    /// Accepted exchanges over all pairs, divided by the iteration count.
    pub exchanges_per_iteration: f64,
}

/// Local acceptance rates and accepted exchange counts per chain.
pub fn acceptance_table(trace: &Trace) -> Result<AcceptanceTable> {
    let iters = trace.iterations();
    if iters == 0 {
        return Err(Error::InvalidArgument("empty trace".into()));
    }
    let n = trace.n_chains();
    let mut exchanged = vec![0u64; n];
    let mut total = 0u64;
    for e in trace.exchanges().iter().filter(|e| e.accepted) {
        exchanged[e.i as usize] += 1;
        exchanged[e.j as usize] += 1;
        total += 1;
    }
    let rows = (0..n)
        .map(|c| {
            let acc = trace.local_accepts(c).iter().filter(|&&a| a).count();
            AcceptanceRow {
                chain: c + 1,
                epsilon: trace.tolerances()[c],
                local_rate: acc as f64 / iters as f64,
                accepted_exchanges: exchanged[c],
            }
        })
        .collect();
    Ok(AcceptanceTable {
        rows,
        iterations: iters,
        exchanges_per_iteration: total as f64 / iters as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExchangeMode {
    /// Accepted exchanges divided by the number of iterations.
    PerIteration,
    /// Accepted exchanges divided by the number of times the pair was
    /// proposed.
    PerProposal,
}

impl FromStr for ExchangeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-iteration" | "iteration" => Ok(Self::PerIteration),
            "per-proposal" | "proposal" => Ok(Self::PerProposal),
            other => Err(Error::InvalidArgument(format!(
                "unknown exchange-matrix mode `{other}` (expected per-iteration or per-proposal)"
            ))),
        }
    }
}

impl fmt::Display for ExchangeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PerIteration => "per-iteration",
            Self::PerProposal => "per-proposal",
        })
    }
}

/// Upper-triangular `N x N` matrix of exchange rates with local acceptance
/// rates on the diagonal. Entries below the diagonal are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeMatrix {
    pub mode: ExchangeMode,
    pub values: Vec<Vec<f64>>,
    pub accepted: Vec<Vec<u64>>,
    pub proposed: Vec<Vec<u64>>,
}

impl ExchangeMatrix {
    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn off_diagonal_sum(&self) -> f64 {
        (0..self.n())
            .flat_map(|i| (i + 1..self.n()).map(move |j| (i, j)))
            .map(|(i, j)| self.values[i][j])
            .sum()
    }

    pub fn accepted_total(&self) -> u64 {
        self.accepted.iter().flatten().sum()
    }
}

pub fn exchange_matrix(trace: &Trace, mode: ExchangeMode) -> Result<ExchangeMatrix> {
    let table = acceptance_table(trace)?;
    let n = trace.n_chains();
    let mut accepted = vec![vec![0u64; n]; n];
    let mut proposed = vec![vec![0u64; n]; n];
    for e in trace.exchanges() {
        let (i, j) = (e.i as usize, e.j as usize);
        proposed[i][j] += 1;
        if e.accepted {
            accepted[i][j] += 1;
        }
    }
    let iters = trace.iterations() as f64;
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        values[i][i] = table.rows[i].local_rate;
        for j in i + 1..n {
            values[i][j] = match mode {
                ExchangeMode::PerIteration => accepted[i][j] as f64 / iters,
                ExchangeMode::PerProposal if proposed[i][j] == 0 => 0.0,
                ExchangeMode::PerProposal => accepted[i][j] as f64 / proposed[i][j] as f64,
            };
        }
    }
    Ok(ExchangeMatrix { mode, values, accepted, proposed })
}

/// `p`-quantile of sorted data, interpolating linearly between order
/// statistics at position `p (n - 1)`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = p.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    let (a, b) = (sorted[lo], sorted[hi]);
    if lo == hi || a == b {
        a
    } else {
        a + (h - lo as f64) * (b - a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSummary {
    pub name: String,
    pub mean: f64,
    pub median: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub parameters: Vec<ParameterSummary>,
    pub samples: usize,
}

/// Mean, median and central 95% interval of each coordinate of
/// `transform(sample)`, or of the samples themselves when no transform is
/// given.
pub fn posterior_summary<S: AsRef<[f64]>>(
    samples: &[S],
    names: &[String],
    transform: Option<&dyn Fn(&[f64]) -> Vec<f64>>,
) -> Result<PosteriorSummary> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "posterior summary needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| match transform {
            Some(f) => f(s.as_ref()),
            None => s.as_ref().to_vec(),
        })
        .collect();
    let d = rows[0].len();
    if names.len() != d {
        return Err(Error::InvalidArgument(format!("{} names for {d} coordinates", names.len())));
    }
    let parameters = (0..d)
        .map(|k| {
            let mut col: Vec<f64> = rows.iter().map(|r| r[k]).collect();
            col.sort_by(f64::total_cmp);
            // Summing sorted values keeps the mean independent of sample order.
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            ParameterSummary {
                name: names[k].clone(),
                mean,
                median: quantile_sorted(&col, 0.5),
                ci_low: quantile_sorted(&col, 0.025),
                ci_high: quantile_sorted(&col, 0.975),
            }
        })
        .collect();
    Ok(PosteriorSummary { parameters, samples: samples.len() })
}

/// Fraction of values in `[a, b]`.
pub fn mass_in_interval(values: &[f64], a: f64, b: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().filter(|&&x| a <= x && x <= b).count() as f64 / values.len() as f64
}

/// Silverman's rule of thumb, `0.9 min(sd, IQR / 1.34) n^(-1/5)`.
pub fn silverman_bandwidth(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidArgument("bandwidth needs at least 2 samples".into()));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let h = 0.9 * spread * (n as f64).powf(-0.2);
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Undefined("degenerate bandwidth for constant samples".into()));
    }
    Ok(h)
}

/// Evenly spaced evaluation points, both ends included.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points).map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub bandwidth: f64,
}

/// Gaussian kernel density estimate on `grid`.
pub fn kde(values: &[f64], grid: &[f64], bandwidth: f64) -> Result<Density> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument("density estimate needs at least 2 samples".into()));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let norm = 1.0 / (values.len() as f64 * bandwidth * (2.0 * std::f64::consts::PI).sqrt());
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    // Kernels further than 9 bandwidths contribute below 1e-17.
    let reach = 9.0 * bandwidth;
    let dens = grid
        .iter()
        .map(|&g| {
            let lo = sorted.partition_point(|&x| x < g - reach);
            let hi = sorted.partition_point(|&x| x <= g + reach);
            let s: f64 = sorted[lo..hi]
                .iter()
                .map(|&x| {
                    let u = (g - x) / bandwidth;
                    (-0.5 * u * u).exp()
                })
                .sum();
            s * norm
        })
        .collect();
    Ok(Density { grid: grid.to_vec(), values: dens, bandwidth })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Values outside `[edges[0], edges[last]]`.
    pub outside: u64,
}

/// Fixed-width histogram on `[lo, hi]`; the last bin is closed.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Result<Histogram> {
    if bins == 0 || !(hi > lo) {
        return Err(Error::InvalidArgument(format!("bad histogram range [{lo}, {hi}] with {bins} bins")));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut outside = 0;
    for &x in values {
        if !(lo..=hi).contains(&x) {
            outside += 1;
            continue;
        }
        let b = (((x - lo) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    Ok(Histogram { edges: linear_grid(lo, hi, bins + 1), counts, outside })
}

pub fn write_acceptance_csv<W: Write>(table: &AcceptanceTable, mut w: W) -> io::Result<()> {
    writeln!(w, "chain,epsilon,local_rate,accepted_exchanges")?;
    for r in &table.rows {
        writeln!(w, "{},{},{},{}", r.chain, r.epsilon, r.local_rate, r.accepted_exchanges)?;
    }
    Ok(())
}

/// Writes the matrix with a header row and column of one-based labels.
pub fn write_matrix_csv<W: Write>(m: &ExchangeMatrix, mut w: W) -> io::Result<()> {
    let labels: Vec<String> = (1..=m.n()).map(|c| format!("chain{c}")).collect();
    writeln!(w, "chain,{}", labels.join(","))?;
    for (i, row) in m.values.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "chain{},{}", i + 1, cells.join(","))?;
    }
    Ok(())
}

pub fn write_summary_csv<W: Write>(s: &PosteriorSummary, mut w: W) -> io::Result<()> {
    writeln!(w, "parameter,mean,median,ci_low,ci_high")?;
    for p in &s.parameters {
        writeln!(w, "{},{},{},{},{}", p.name, p.mean, p.median, p.ci_low, p.ci_high)?;
    }
    Ok(())
}

pub fn write_density_csv<W: Write>(d: &Density, mut w: W) -> io::Result<()> {
    writeln!(w, "x,density")?;
    for (x, y) in d.grid.iter().zip(&d.values) {
        writeln!(w, "{x},{y}")?;
    }
    Ok(())
}

pub fn write_histogram_csv<W: Write>(h: &Histogram, mut w: W) -> io::Result<()> {
    writeln!(w, "lo,hi,count")?;
    for (k, c) in h.counts.iter().enumerate() {
        writeln!(w, "{},{},{}", h.edges[k], h.edges[k + 1], c)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn ar1(phi: f64, n: usize, seed: u64) -> Vec<f64> {
        let mut rng = stream(seed, 0);
        let mut x = 0.0;
        let sd = (1.0 - phi * phi).sqrt();
        (0..n)
            .map(|_| {
                x = phi * x + sd * rng.sample::<f64, _>(StandardNormal);
                x
            })
            .collect()
    }

    #[test]
    fn acf_lag_zero_is_one() {
        assert_eq!(autocorrelation(&[1.0, 3.0, 2.0], 0).unwrap(), 1.0);
    }

    #[test]
    fn acf_errors() {
        assert!(matches!(autocorrelation(&[2.0; 10], 1), Err(Error::Undefined(_))));
        assert!(autocorrelation(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn acf_ar1() {
        let s = ar1(0.9, 1_000_000, 1);
        assert!((autocorrelation(&s, 1).unwrap() - 0.9).abs() < 0.01);
        assert!((autocorrelation(&s, 10).unwrap() - 0.9f64.powi(10)).abs() < 0.02);
        let t = thin(&s, 10);
        assert!((autocorrelation(&t, 1).unwrap() - 0.9f64.powi(10)).abs() < 0.02);
    }

    #[test]
    fn acf_white_noise() {
        let s = ar1(0.0, 100_000, 2);
        assert!(autocorrelation(&s, 1).unwrap().abs() < 0.02);
    }

    #[test]
    fn thin_lengths() {
        let s: Vec<usize> = (0..10).collect();
        assert_eq!(thin(&s, 1), s);
        assert_eq!(thin(&s, 3), vec![0, 3, 6, 9]);
        assert_eq!(thin(&thin(&s, 2), 2), thin(&s, 4));
    }

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.5), 2.5);
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert!((quantile_sorted(&v, 0.25) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn summary_of_constant() {
        let s = vec![vec![2.5]; 10];
        let p = posterior_summary(&s, &["x".into()], None).unwrap();
        let r = &p.parameters[0];
        assert_eq!((r.mean, r.median, r.ci_low, r.ci_high), (2.5, 2.5, 2.5, 2.5));
        assert!(posterior_summary(&s[..1], &["x".into()], None).is_err());
    }

    #[test]
    fn summary_of_normal() {
        let mut rng = stream(3, 0);
        let s: Vec<Vec<f64>> = (0..1_000_000).map(|_| vec![rng.sample(StandardNormal)]).collect();
        let p = posterior_summary(&s, &["z".into()], None).unwrap();
        assert!((p.parameters[0].ci_low + 1.96).abs() < 0.02);
        assert!((p.parameters[0].ci_high - 1.96).abs() < 0.02);
    }

    #[test]
    fn summary_with_transform() {
        let s = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let f = |x: &[f64]| vec![x[0] + x[1]];
        let p = posterior_summary(&s, &["sum".into()], Some(&f)).unwrap();
        assert_eq!(p.parameters[0].mean, 5.0);
    }

    #[test]
    fn kde_single_point_is_gaussian_bump() {
        let grid = linear_grid(-1.0, 1.0, 21);
        let d = kde(&[0.0, 0.0], &grid, 0.3).unwrap();
        for (x, y) in grid.iter().zip(&d.values) {
            let expect = (-0.5 * (x / 0.3f64).powi(2)).exp() / (0.3 * (2.0 * std::f64::consts::PI).sqrt());
            assert!((y - expect).abs() < 1e-14);
        }
        assert!(kde(&[0.0, 1.0], &grid, 0.0).is_err());
    }

    #[test]
    fn kde_normal_consistency() {
        let mut rng = stream(4, 0);
        let s: Vec<f64> = (0..100_000).map(|_| rng.sample(StandardNormal)).collect();
        let h = silverman_bandwidth(&s).unwrap();
        let grid = linear_grid(-6.0, 6.0, 1201);
        let d = kde(&s, &grid, h).unwrap();
        let integral: f64 = d.values.iter().sum::<f64>() * 0.01;
        assert!((integral - 1.0).abs() < 0.01);
        let worst = grid
            .iter()
            .zip(&d.values)
            .map(|(x, y)| (y - crate::special::std_normal_pdf(*x)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.02, "{worst}");
    }

    #[test]
    fn histogram_counts() {
        let h = histogram(&[0.0, 0.5, 1.0, 1.5, 2.0, 3.0], 0.0, 2.0, 2).unwrap();
        assert_eq!(h.counts, vec![2, 3]);
        assert_eq!(h.outside, 1);
        assert!(histogram(&[0.0], 1.0, 1.0, 3).is_err());
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("per-proposal".parse::<ExchangeMode>().unwrap(), ExchangeMode::PerProposal);
        assert!("weekly".parse::<ExchangeMode>().is_err());
    }
}
