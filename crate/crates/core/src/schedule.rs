//! Tolerance and temperature ladders, and the ring partition of the
//! distance range.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric progression of `n` values from `lo` to `hi` inclusive.
///
/// ```
/// let s = abcpt::log_spaced_schedule(1.0, 4.0, 3).unwrap();
/// assert_eq!(s, vec![1.0, 2.0, 4.0]);
/// ```
pub fn log_spaced_schedule(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > 0.0) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidSchedule(format!(
            "bounds must be positive and finite, got ({lo}, {hi})"
        )));
    }
    if hi < lo {
        return Err(Error::InvalidSchedule(format!("hi ({hi}) < lo ({lo})")));
    }
    match n {
        0 => Err(Error::InvalidSchedule("schedule needs at least one level".into())),
        1 if lo != hi => Err(Error::InvalidSchedule(
            "a single-level schedule needs lo == hi".into(),
        )),
        1 => Ok(vec![lo]),
        _ => {
            let ratio = (hi / lo).powf(1.0 / (n - 1) as f64);
            let mut out: Vec<f64> = (0..n).map(|k| lo * ratio.powi(k as i32)).collect();
            out[n - 1] = hi;
            Ok(out)
        }
    }
}

/// Strictly increasing positive tolerance levels `eps_1 < ... < eps_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ToleranceSchedule(Vec<f64>);

impl ToleranceSchedule {
    pub fn new(epsilons: Vec<f64>) -> Result<Self> {
        if epsilons.is_empty() {
            return Err(Error::InvalidSchedule("empty tolerance schedule".into()));
        }
        if epsilons.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidSchedule(
                "tolerances must be positive and finite".into(),
            ));
        }
        if epsilons.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSchedule(
                "tolerances must be strictly increasing".into(),
            ));
        }
        Ok(Self(epsilons))
    }

    pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(log_spaced_schedule(lo, hi, n)?)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Tolerance of chain `i` (zero-based).
    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn largest(&self) -> f64 {
        *self.0.last().expect("nonempty by construction")
    }
}

impl TryFrom<Vec<f64>> for ToleranceSchedule {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ToleranceSchedule> for Vec<f64> {
    fn from(s: ToleranceSchedule) -> Self {
        s.0
    }
}

/// Nondecreasing temperatures starting at exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TemperatureSchedule(Vec<f64>);

impl TemperatureSchedule {
    pub fn new(temps: Vec<f64>) -> Result<Self> {
        if temps.is_empty() {
            return Err(Error::InvalidSchedule("empty temperature schedule".into()));
        }
        if temps[0] != 1.0 {
            return Err(Error::InvalidSchedule(format!(
                "first temperature must be 1, got {}",
                temps[0]
            )));
        }
        if temps.iter().any(|t| !t.is_finite()) || temps.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidSchedule(
                "temperatures must be finite and nondecreasing".into(),
            ));
        }
        Ok(Self(temps))
    }

    pub fn log_spaced(hi: f64, n: usize) -> Result<Self> {
        Self::new(log_spaced_schedule(1.0, hi, n)?)
    }

    /// All chains at temperature one.
    pub fn constant(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }
}

impl TryFrom<Vec<f64>> for TemperatureSchedule {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<TemperatureSchedule> for Vec<f64> {
    fn from(s: TemperatureSchedule) -> Self {
        s.0
    }
}

/// Partition of `[0, eps_N]` into `K` contiguous rings.
///
/// Ring `r` (zero-based) is `(b_r, b_{r+1}]`, except ring 0 which also
/// contains 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingPartition {
    boundaries: Vec<f64>,
    group_sizes: Vec<usize>,
}

impl RingPartition {
    /// `b_0 = 0, b_1, ..., b_K = eps_N`.
    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Number of tolerance levels assigned to each ring.
    pub fn group_sizes(&self) -> &[usize] {
        &self.group_sizes
    }

    pub fn len(&self) -> usize {
        self.group_sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.group_sizes.is_empty()
    }

    /// Ring containing `distance`. Interior boundaries belong to the lower ring.
    pub fn ring_of(&self, distance: f64) -> Result<usize> {
        let top = *self.boundaries.last().expect("nonempty");
        if !(0.0..=top).contains(&distance) {
            return Err(Error::DistanceOutsideRings(distance));
        }
        let interior = &self.boundaries[1..self.boundaries.len() - 1];
        Ok(interior.partition_point(|&b| b < distance))
    }
}

/// Groups the tolerance levels into `k` consecutive blocks and places ring
/// boundaries at the arithmetic midpoint between neighbouring blocks.
///
/// When `k` does not divide `N`, the first `N mod k` (lowest-tolerance)
/// groups receive one extra level.
pub fn ring_partition(tolerances: &ToleranceSchedule, k: usize) -> Result<RingPartition> {
    let n = tolerances.len();
    if k < 1 || k > n {
        return Err(Error::InvalidRings(format!(
            "ring count {k} must lie in 1..={n}"
        )));
    }
    let eps = tolerances.as_slice();
    let (base, extra) = (n / k, n % k);
    let group_sizes: Vec<usize> = (0..k).map(|g| base + usize::from(g < extra)).collect();
    let mut boundaries = Vec::with_capacity(k + 1);
    boundaries.push(0.0);
    let mut end = 0;
    for size in &group_sizes[..k - 1] {
        end += size;
        boundaries.push(0.5 * (eps[end - 1] + eps[end]));
    }
    boundaries.push(tolerances.largest());
    Ok(RingPartition {
        boundaries,
        group_sizes,
    })
}
