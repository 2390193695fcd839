//! Piecewise-constant approximation of symmetric kernels.
//!
//! A half kernel sampled at `t = 0..=r` is approximated by `k` constants on
//! consecutive integer intervals
//!
//! ```text
//! interval 1 = [0, p1],  interval i = [p(i-1) + 1, p(i)],  zero beyond p(k)
//! ```
//!
//! and the same profile is rebuilt from `k` overlapping slices, slice `i`
//! covering `|t| <= p(i)` with weight `c(i) - c(i+1)` (`c(k+1) = 0`). The
//! slice window is exactly the one a running-sum difference
//! `I(x + p) - I(x - p - 1)` sums over, so the optimizer and the filter see
//! the same kernel.

mod autocorr;
mod search;

use std::f64::consts::PI;

pub use autocorr::{build_autocorr, quadratic_error, AutocorrModel, DEFAULT_DC_VALUE};
pub use search::{
    optimal_constants, search_partitions, search_partitions_with, Fit, SearchStrategy, MAX_K,
};

use crate::error::{invalid, Error, Result};

/// Standard deviation (in samples) the published parameters were fitted at:
/// 100 samples span `[0, π·σ0]`.
pub const TABLE_SIGMA0: f64 = 100.0 / PI;

/// Samples of a symmetric half kernel `K(0), K(1), …, K(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledKernel {
    values: Vec<f64>,
    sigma0: f64,
}

impl SampledKernel {
    pub fn new(values: Vec<f64>, sigma0: f64) -> Result<Self> {
        if values.len() < 2 {
            return Err(invalid("a sampled kernel needs at least 2 samples"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("kernel samples must be finite"));
        }
        if !(sigma0 > 0.0 && sigma0.is_finite()) {
            return Err(invalid(format!("sigma0 must be positive, got {sigma0}")));
        }
        Ok(Self { values, sigma0 })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sigma0(&self) -> f64 {
        self.sigma0
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Support radius `r = n - 1`.
    pub fn radius(&self) -> usize {
        self.values.len() - 1
    }

    /// Sum of the implied full symmetric kernel.
    pub fn full_sum(&self) -> f64 {
        self.values[0] + 2.0 * self.values[1..].iter().sum::<f64>()
    }
}

/// Samples `exp(-t²/2σ0²)` at `t = 0..n` and normalizes the implied full
/// symmetric kernel to unit sum.
pub fn sample_gaussian(sigma0: f64, n: usize) -> Result<SampledKernel> {
    if !(sigma0 > 0.0 && sigma0.is_finite()) {
        return Err(invalid(format!("sigma0 must be positive, got {sigma0}")));
    }
    if n < 2 {
        return Err(invalid(format!("need at least 2 samples, got {n}")));
    }
    let denom = 2.0 * sigma0 * sigma0;
    let mut values: Vec<f64> = (0..n)
        .map(|t| {
            let t = t as f64;
            (-t * t / denom).exp()
        })
        .collect();
    let total = values[0] + 2.0 * values[1..].iter().sum::<f64>();
    values.iter_mut().for_each(|v| *v /= total);
    SampledKernel::new(values, sigma0)
}

/// Breakpoints `p1 < … < pk` and the constant on each interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    breakpoints: Vec<usize>,
    constants: Vec<f64>,
}

impl Partition {
    pub fn new(breakpoints: Vec<usize>, constants: Vec<f64>) -> Result<Self> {
        validate_breakpoints(&breakpoints, None)?;
        if constants.len() != breakpoints.len() {
            return Err(Error::DimensionMismatch {
                expected: breakpoints.len(),
                actual: constants.len(),
            });
        }
        if constants.iter().any(|c| !c.is_finite()) {
            return Err(invalid("partition constants must be finite"));
        }
        Ok(Self {
            breakpoints,
            constants,
        })
    }

    pub fn k(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn breakpoints(&self) -> &[usize] {
        &self.breakpoints
    }

    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    /// Last breakpoint; the profile is zero beyond it.
    pub fn support(&self) -> usize {
        *self.breakpoints.last().expect("non-empty partition")
    }

    /// Index of the interval holding sample `t`, if any.
    pub fn interval_of(&self, t: usize) -> Option<usize> {
        let i = self.breakpoints.partition_point(|&p| p < t);
        (i < self.breakpoints.len()).then_some(i)
    }

    /// Piecewise-constant half profile over `t = 0..n`.
    pub fn profile(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|t| self.interval_of(t).map_or(0.0, |i| self.constants[i]))
            .collect()
    }

    /// Same breakpoints, constants multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            constants: self.constants.iter().map(|c| c * factor).collect(),
        }
    }
}

/// Checks that breakpoints are non-empty, strictly increasing, `>= 1` and, if
/// `radius` is given, `<= radius`.
pub(crate) fn validate_breakpoints(breakpoints: &[usize], radius: Option<usize>) -> Result<()> {
    let Some(&first) = breakpoints.first() else {
        return Err(Error::DegeneratePartition("no breakpoints".into()));
    };
    if first == 0 {
        return Err(Error::DegeneratePartition(
            "breakpoints start at 1; 0 would leave the first interval empty".into(),
        ));
    }
    if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::DegeneratePartition(format!(
            "breakpoints must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    if let Some(r) = radius {
        let last = breakpoints[breakpoints.len() - 1];
        if last > r {
            return Err(Error::DegeneratePartition(format!(
                "breakpoint {last} exceeds kernel radius {r}"
            )));
        }
    }
    Ok(())
}

/// One constant slice of weight `weight` over `|t| <= radius`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slice {
    pub radius: usize,
    pub weight: f64,
}

/// Symmetric piecewise-constant kernel as a sum of centered slices.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceKernel {
    slices: Vec<Slice>,
    sigma: f64,
    dc_gain: f64,
}

impl SliceKernel {
    /// Radii must be strictly increasing; weights finite.
    pub fn new(slices: Vec<Slice>, sigma: f64) -> Result<Self> {
        if slices.is_empty() {
            return Err(invalid("a slice kernel needs at least one slice"));
        }
        if let Some(w) = slices.windows(2).find(|w| w[0].radius >= w[1].radius) {
            return Err(invalid(format!(
                "slice radii must be strictly increasing ({} then {})",
                w[0].radius, w[1].radius
            )));
        }
        if slices.iter().any(|s| !s.weight.is_finite()) {
            return Err(invalid("slice weights must be finite"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(invalid(format!("sigma must be positive, got {sigma}")));
        }
        let dc_gain = slices
            .iter()
            .map(|s| s.weight * (2 * s.radius + 1) as f64)
            .sum();
        Ok(Self {
            slices,
            sigma,
            dc_gain,
        })
    }

    /// Table defaults for `k ∈ {3, 4, 5}` scaled to `sigma`, unit DC gain.
    pub fn gaussian(k: usize, sigma: f64) -> Result<Self> {
        let (partition, sigma0) = table_defaults(k)?;
        scale_to_sigma(&to_slices(&partition, sigma0)?, sigma)
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn k(&self) -> usize {
        self.slices.len()
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `Σ wᵢ·(2pᵢ + 1)`: the response to a constant unit signal.
    pub fn dc_gain(&self) -> f64 {
        self.dc_gain
    }

    pub fn max_radius(&self) -> usize {
        self.slices[self.slices.len() - 1].radius
    }

    /// Rescales all weights to unit DC gain.
    pub fn normalized(&self) -> Result<Self> {
        if self.dc_gain == 0.0 || !self.dc_gain.is_finite() {
            return Err(invalid("kernel has zero DC gain and cannot be normalized"));
        }
        let slices = self
            .slices
            .iter()
            .map(|s| Slice {
                radius: s.radius,
                weight: s.weight / self.dc_gain,
            })
            .collect();
        Self::new(slices, self.sigma)
    }

    /// Kernel value at offset `t`: the summed weight of all slices covering it.
    pub fn value_at(&self, t: isize) -> f64 {
        let t = t.unsigned_abs();
        self.slices
            .iter()
            .filter(|s| s.radius >= t)
            .map(|s| s.weight)
            .sum()
    }

    /// Dense taps for offsets `-R..=R`, `R = max_radius()`.
    pub fn to_dense(&self) -> Vec<f64> {
        let r = self.max_radius() as isize;
        (-r..=r).map(|t| self.value_at(t)).collect()
    }

    /// Constants of the equivalent partition, one per slice (innermost first).
    pub fn constants(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .slices
            .iter()
            .rev()
            .map(|s| {
                acc += s.weight;
                acc
            })
            .collect();
        out.reverse();
        out
    }
}

/// Converts partition constants into slice weights `wᵢ = cᵢ − cᵢ₊₁`.
///
/// The result carries `sigma0`, the standard deviation the partition was
/// fitted at, and is *not* normalized; see [`scale_to_sigma`].
pub fn to_slices(partition: &Partition, sigma0: f64) -> Result<SliceKernel> {
    let c = partition.constants();
    let slices = partition
        .breakpoints()
        .iter()
        .enumerate()
        .map(|(i, &radius)| Slice {
            radius,
            weight: c[i] - c.get(i + 1).copied().unwrap_or(0.0),
        })
        .collect();
    SliceKernel::new(slices, sigma0)
}

/// Rescales a slice kernel fitted at `base.sigma()` to `sigma`.
///
/// Radii become `floor(σ/σ0 · p)`, weights `p / (2p' + 1) · w`, after which
/// slices that landed on the same radius are merged and the kernel is
/// renormalized to unit DC gain.
pub fn scale_to_sigma(base: &SliceKernel, sigma: f64) -> Result<SliceKernel> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    let ratio = sigma / base.sigma();
    let mut scaled: Vec<Slice> = Vec::with_capacity(base.k());
    for s in base.slices() {
        let radius = (ratio * s.radius as f64).floor() as usize;
        let weight = s.radius as f64 / (2 * radius + 1) as f64 * s.weight;
        match scaled.last_mut() {
            Some(prev) if prev.radius == radius => prev.weight += weight,
            _ => scaled.push(Slice { radius, weight }),
        }
    }
    if base.k() > 1 && scaled.len() == 1 && scaled[0].radius == 0 {
        return Err(Error::DegenerateScale { sigma });
    }
    SliceKernel::new(scaled, sigma)?.normalized()
}

/// Published parameters for `k ∈ {3, 4, 5}` with `σ0 = 100/π`.
///
/// Constants are relative to a unit kernel peak.
pub fn table_defaults(k: usize) -> Result<(Partition, f64)> {
    let (breakpoints, constants): (&[usize], &[f64]) = match k {
        3 => (&[23, 46, 76], &[0.9495, 0.5502, 0.1618]),
        4 => (&[19, 37, 56, 82], &[0.9649, 0.6700, 0.3376, 0.0976]),
        5 => (
            &[16, 30, 44, 61, 85],
            &[0.9738, 0.7596, 0.5031, 0.2534, 0.0739],
        ),
        _ => {
            return Err(invalid(format!(
                "published parameters exist for k = 3, 4, 5 only (got {k})"
            )))
        }
    };
    Ok((
        Partition::new(breakpoints.to_vec(), constants.to_vec())?,
        TABLE_SIGMA0,
    ))
}
