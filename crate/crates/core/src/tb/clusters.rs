//! Genotype cluster configurations and their summary statistics.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `(cluster size, number of clusters)` pairs of the San Francisco 1991-92
/// IS6110 fingerprint sample: 473 isolates in 326 genotypes.
pub const OBSERVED_CLUSTERS: [(u32, u32); 10] = [
    (30, 1),
    (23, 1),
    (15, 1),
    (10, 1),
    (8, 1),
    (5, 2),
    (4, 4),
    (3, 13),
    (2, 20),
    (1, 282),
];

/// A multiset of positive cluster sizes, stored in decreasing order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterConfiguration {
    sizes: Vec<u32>,
    sample_size: u64,
}

impl ClusterConfiguration {
    pub fn new(mut sizes: Vec<u32>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidArgument("empty cluster configuration".into()));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidArgument("cluster sizes must be positive".into()));
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        let sample_size = sizes.iter().map(|&s| s as u64).sum();
        Ok(Self { sizes, sample_size })
    }

    /// Builds a configuration from `(size, count)` pairs.
    pub fn from_size_counts(pairs: &[(u32, u32)]) -> Result<Self> {
        let mut sizes = Vec::new();
        for &(size, count) in pairs {
            sizes.extend(std::iter::repeat_n(size, count as usize));
        }
        Self::new(sizes)
    }

    /// The observed tuberculosis sample.
    pub fn observed() -> Self {
        Self::from_size_counts(&OBSERVED_CLUSTERS).expect("built-in data is valid")
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn sample_size(&self) -> u64 {
        self.sample_size
    }

    /// Number of distinct genotypes `g`.
    pub fn n_clusters(&self) -> usize {
        self.sizes.len()
    }

    /// `(size, count)` pairs in decreasing size order.
    pub fn size_counts(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &s in &self.sizes {
            match out.last_mut() {
                Some((size, count)) if *size == s => *count += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }

    /// `sum n_i^2`.
    pub fn sum_of_squares(&self) -> u64 {
        self.sizes.iter().map(|&s| (s as u64) * (s as u64)).sum()
    }
}

/// Number of distinct genotypes in the sample.
pub fn stat_g(config: &ClusterConfiguration) -> usize {
    config.n_clusters()
}

/// Gene diversity `H = 1 - sum (n_i / n)^2`.
pub fn stat_h(config: &ClusterConfiguration) -> f64 {
    let n = config.sample_size() as f64;
    1.0 - config.sum_of_squares() as f64 / (n * n)
}

/// Parses lines of `size count`. Blank lines and `#` comments are skipped.
impl FromStr for ClusterConfiguration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = || Error::InvalidArgument(format!("line {}: expected `size count`, got `{}`", lineno + 1, raw.trim()));
            let mut it = line.split_whitespace();
            let size: u32 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let count: u32 = it.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if it.next().is_some() || size == 0 {
                return Err(bad());
            }
            pairs.push((size, count));
        }
        Self::from_size_counts(&pairs)
    }
}

/// Writes the compact `30^1 23^1 ...` notation.
impl fmt::Display for ClusterConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.size_counts().iter().map(|(s, c)| format!("{s}^{c}")).collect();
        f.write_str(&parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn observed_statistics() {
        let obs = ClusterConfiguration::observed();
        assert_eq!(obs.sample_size(), 473);
        assert_eq!(stat_g(&obs), 326);
        assert_eq!(obs.sum_of_squares(), 2411);
        assert_eq!(stat_h(&obs), 1.0 - 2411.0 / 223_729.0);
        assert!((stat_h(&obs) - 0.98922).abs() < 5e-6);
    }

    #[test]
    fn singletons() {
        let c = ClusterConfiguration::new(vec![1; 473]).unwrap();
        assert_eq!(stat_g(&c), 473);
        assert!((stat_h(&c) - (1.0 - 1.0 / 473.0)).abs() < 1e-15);
    }

    #[test]
    fn text_roundtrip() {
        let text = "# size count\n30 1\n23 1\n\n1 3\n";
        let c: ClusterConfiguration = text.parse().unwrap();
        assert_eq!(c.sizes(), &[30, 23, 1, 1, 1]);
        assert_eq!(c.to_string(), "30^1 23^1 1^3");
        assert!("3".parse::<ClusterConfiguration>().is_err());
        assert!("0 2".parse::<ClusterConfiguration>().is_err());
        assert!("".parse::<ClusterConfiguration>().is_err());
    }
}
