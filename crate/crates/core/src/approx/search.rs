//! Finding breakpoints and constants that minimize the quadratic-form error.
//!
//! For fixed breakpoints the error is quadratic in the constants, so the inner
//! problem is the normal system `(BᵀAB) c = BᵀAw` with `B` the 0/1 interval
//! indicator basis. The outer search over breakpoints is discrete.
//!
//! [`optimal_constants`] solves one instance directly. The search evaluates
//! millions of instances, so it precomputes a summed-area table of `A` and the
//! cumulative sums of `Aw`: every entry of `BᵀAB` is then a rectangle sum
//! (four lookups) and the minimum error is `wᵀAw − (BᵀAw)·c`.

use std::cmp::Ordering;

use rayon::prelude::*;

use super::{validate_breakpoints, AutocorrModel, Partition, SampledKernel};
use crate::error::{invalid, Error, Result};
use crate::linalg::solve_in_place;

pub const MAX_K: usize = 5;

/// Breakpoint search strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchStrategy {
    /// Every strictly increasing tuple in `[1, r]`.
    Exhaustive,
    /// Exhaustive search on the grid `stride, 2·stride, …` (plus `r`), then
    /// repeated exhaustive search in a `±radius` box around each of the best
    /// `beam` grid tuples until the box center stops moving.
    CoarseToFine {
        stride: usize,
        radius: usize,
        beam: usize,
    },
}

impl SearchStrategy {
    /// Exhaustive for `k <= 3`, stride-4 / ±4 refinement above.
    pub fn default_for(k: usize) -> Self {
        if k <= 3 {
            Self::Exhaustive
        } else {
            Self::CoarseToFine {
                stride: 4,
                radius: 4,
                beam: 8,
            }
        }
    }
}

/// A partition together with the error it achieves.
#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    pub partition: Partition,
    pub error: f64,
}

fn check_dims(target: &SampledKernel, model: &AutocorrModel) -> Result<()> {
    if model.dim() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: target.len(),
            actual: model.dim(),
        });
    }
    Ok(())
}

/// Inclusive sample ranges `[start, end)` of each interval.
fn intervals(breakpoints: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    breakpoints
        .iter()
        .enumerate()
        .map(|(i, &p)| (if i == 0 { 0 } else { breakpoints[i - 1] + 1 }, p + 1))
}

/// Least-squares constants for fixed breakpoints, solved densely.
pub fn optimal_constants(
    target: &SampledKernel,
    breakpoints: &[usize],
    model: &AutocorrModel,
) -> Result<Partition> {
    check_dims(target, model)?;
    validate_breakpoints(breakpoints, Some(target.radius()))?;
    let n = target.len();
    let k = breakpoints.len();
    let w = target.values();

    let aw: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|t| model.entry(j, t) * w[t]).sum())
        .collect();
    let spans: Vec<(usize, usize)> = intervals(breakpoints).collect();
    let mut normal = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    for (a, &(a0, a1)) in spans.iter().enumerate() {
        rhs[a] = aw[a0..a1].iter().sum();
        for (b, &(b0, b1)) in spans.iter().enumerate() {
            let mut acc = 0.0;
            for j in a0..a1 {
                for t in b0..b1 {
                    acc += model.entry(j, t);
                }
            }
            normal[a * k + b] = acc;
        }
    }
    solve_in_place(&mut normal, &mut rhs).ok_or_else(|| {
        Error::DegeneratePartition(format!("normal equations singular for {breakpoints:?}"))
    })?;
    Partition::new(breakpoints.to_vec(), rhs)
}

/// Minimizes the quadratic-form error over breakpoints for `1 <= k <= 5`,
/// using [`SearchStrategy::default_for`].
pub fn search_partitions(
    target: &SampledKernel,
    k: usize,
    model: &AutocorrModel,
) -> Result<Partition> {
    search_partitions_with(target, k, model, SearchStrategy::default_for(k)).map(|f| f.partition)
}

pub fn search_partitions_with(
    target: &SampledKernel,
    k: usize,
    model: &AutocorrModel,
    strategy: SearchStrategy,
) -> Result<Fit> {
    if !(1..=MAX_K).contains(&k) {
        return Err(invalid(format!("k must be in [1, {MAX_K}], got {k}")));
    }
    check_dims(target, model)?;
    let r = target.radius();
    if k > r {
        return Err(invalid(format!(
            "k = {k} breakpoints do not fit a kernel of radius {r}"
        )));
    }
    let objective = Objective::new(target, model);

    let best = match strategy {
        SearchStrategy::Exhaustive => {
            let all: Vec<usize> = (1..=r).collect();
            objective.best_over(&vec![all; k], 1)
        }
        SearchStrategy::CoarseToFine {
            stride,
            radius,
            beam,
        } => {
            if stride == 0 || beam == 0 {
                return Err(invalid("stride and beam must be positive"));
            }
            let mut grid: Vec<usize> = (stride..=r).step_by(stride).collect();
            if grid.last() != Some(&r) {
                grid.push(r);
            }
            let seeds = if grid.len() >= k {
                objective.best_over(&vec![grid; k], beam)
            } else {
                objective.best_over(&vec![(1..=r).collect(); k], beam)
            };
            seeds
                .into_iter()
                .map(|seed| objective.refine(seed, radius, r))
                .min_by(Candidate::cmp)
                .into_iter()
                .collect()
        }
    };
    let best = best
        .into_iter()
        .next()
        .ok_or_else(|| Error::DegeneratePartition("no admissible breakpoint tuple".into()))?;

    let bps = best.breakpoints().to_vec();
    let partition = optimal_constants(target, &bps, model)?;
    let approx = partition.profile(target.len());
    let error = super::quadratic_error(target, &approx, model)?;
    Ok(Fit { partition, error })
}

#[derive(Clone, Copy, Debug)]
struct Candidate {
    error: f64,
    k: usize,
    bps: [usize; MAX_K],
}

impl Candidate {
    fn breakpoints(&self) -> &[usize] {
        &self.bps[..self.k]
    }

    /// Lower error first; ties go to the lexicographically smaller tuple.
    fn cmp(a: &Self, b: &Self) -> Ordering {
        a.error
            .total_cmp(&b.error)
            .then_with(|| a.breakpoints().cmp(b.breakpoints()))
    }
}

/// Keeps the `cap` best candidates, sorted.
#[derive(Clone, Debug)]
struct TopN {
    cap: usize,
    items: Vec<Candidate>,
}

impl TopN {
    fn new(cap: usize) -> Self {
        Self {
            cap,
            items: Vec::with_capacity(cap + 1),
        }
    }

    fn offer(&mut self, c: Candidate) {
        if self.items.len() == self.cap
            && Candidate::cmp(&c, &self.items[self.cap - 1]) != Ordering::Less
        {
            return;
        }
        let at = self
            .items
            .partition_point(|x| Candidate::cmp(x, &c) == Ordering::Less);
        self.items.insert(at, c);
        self.items.truncate(self.cap);
    }

    fn merge(mut self, other: Self) -> Self {
        for c in other.items {
            self.offer(c);
        }
        self
    }
}

struct Objective {
    n: usize,
    /// `sat[(i)*(n+1) + j] = Σ_{a<i, b<j} A[a][b]`
    sat: Vec<f64>,
    /// `aw_cum[i] = Σ_{a<i} (Aw)[a]`
    aw_cum: Vec<f64>,
    waw: f64,
}

impl Objective {
    fn new(target: &SampledKernel, model: &AutocorrModel) -> Self {
        let n = target.len();
        let w = target.values();
        let stride = n + 1;
        let mut sat = vec![0.0; stride * stride];
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += model.entry(i, j);
                sat[(i + 1) * stride + j + 1] = sat[i * stride + j + 1] + row;
            }
        }
        let aw: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|t| model.entry(j, t) * w[t]).sum())
            .collect();
        let mut aw_cum = vec![0.0; n + 1];
        for i in 0..n {
            aw_cum[i + 1] = aw_cum[i] + aw[i];
        }
        let waw = w.iter().zip(&aw).map(|(a, b)| a * b).sum();
        Self {
            n,
            sat,
            aw_cum,
            waw,
        }
    }

    #[inline]
    fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> f64 {
        let s = self.n + 1;
        self.sat[r1 * s + c1] - self.sat[r0 * s + c1] - self.sat[r1 * s + c0]
            + self.sat[r0 * s + c0]
    }

    fn error(&self, bps: &[usize]) -> Option<f64> {
        let k = bps.len();
        let mut spans = [(0usize, 0usize); MAX_K];
        for (slot, span) in spans.iter_mut().zip(intervals(bps)) {
            *slot = span;
        }
        let mut normal = [0.0; MAX_K * MAX_K];
        let mut rhs = [0.0; MAX_K];
        for a in 0..k {
            let (a0, a1) = spans[a];
            rhs[a] = self.aw_cum[a1] - self.aw_cum[a0];
            for b in a..k {
                let (b0, b1) = spans[b];
                let v = self.block(a0, a1, b0, b1);
                normal[a * k + b] = v;
                normal[b * k + a] = v;
            }
        }
        let b = rhs;
        solve_in_place(&mut normal[..k * k], &mut rhs[..k])?;
        let explained: f64 = b[..k].iter().zip(&rhs[..k]).map(|(x, c)| x * c).sum();
        Some(self.waw - explained)
    }

    /// Best `keep` strictly increasing tuples with `bps[i] ∈ choices[i]`.
    fn best_over(&self, choices: &[Vec<usize>], keep: usize) -> Vec<Candidate> {
        let k = choices.len();
        choices[0]
            .par_iter()
            .map(|&first| {
                let mut top = TopN::new(keep);
                let mut bps = [0usize; MAX_K];
                bps[0] = first;
                self.walk(choices, 1, &mut bps, &mut top);
                top
            })
            .reduce(|| TopN::new(keep), TopN::merge)
            .items
            .into_iter()
            .filter(|c| c.k == k)
            .collect()
    }

    fn walk(&self, choices: &[Vec<usize>], depth: usize, bps: &mut [usize; MAX_K], top: &mut TopN) {
        let k = choices.len();
        if depth == k {
            if let Some(error) = self.error(&bps[..k]) {
                top.offer(Candidate {
                    error,
                    k,
                    bps: *bps,
                });
            }
            return;
        }
        let prev = bps[depth - 1];
        let opts = &choices[depth];
        let start = opts.partition_point(|&p| p <= prev);
        for &p in &opts[start..] {
            bps[depth] = p;
            self.walk(choices, depth + 1, bps, top);
        }
    }

    fn refine(&self, seed: Candidate, radius: usize, r: usize) -> Candidate {
        let mut center = seed;
        loop {
            let choices: Vec<Vec<usize>> = center
                .breakpoints()
                .iter()
                .map(|&p| (p.saturating_sub(radius).max(1)..=(p + radius).min(r)).collect())
                .collect();
            let Some(best) = self.best_over(&choices, 1).into_iter().next() else {
                return center;
            };
            if Candidate::cmp(&best, &center) != Ordering::Less {
                return center;
            }
            center = best;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{build_autocorr, sample_gaussian, DEFAULT_DC_VALUE};

    #[test]
    fn piecewise_constant_target_is_recovered() {
        let values = vec![0.5, 0.5, 0.5, 0.3, 0.3, 0.1, 0.1, 0.1];
        let target = SampledKernel::new(values, 1.0).unwrap();
        let model = AutocorrModel::identity(7).unwrap();
        let p = optimal_constants(&target, &[2, 4, 7], &model).unwrap();
        for (c, want) in p.constants().iter().zip([0.5, 0.3, 0.1]) {
            assert!((c - want).abs() < 1e-14);
        }
        let e = crate::approx::quadratic_error(&target, &p.profile(8), &model).unwrap();
        assert!(e.abs() < 1e-28);
    }

    #[test]
    fn single_interval_is_the_mean() {
        let target = sample_gaussian(4.0, 12).unwrap();
        let model = AutocorrModel::identity(11).unwrap();
        let p = optimal_constants(&target, &[11], &model).unwrap();
        let mean = target.values().iter().sum::<f64>() / 12.0;
        assert!((p.constants()[0] - mean).abs() < 1e-15);
    }

    #[test]
    fn fast_and_dense_errors_agree() {
        let target = sample_gaussian(100.0 / std::f64::consts::PI, 100).unwrap();
        let model = build_autocorr(99, DEFAULT_DC_VALUE).unwrap();
        let obj = Objective::new(&target, &model);
        for bps in [
            &[23usize, 46, 76][..],
            &[19, 37, 56, 82],
            &[99],
            &[1, 2, 3, 4, 5],
        ] {
            let p = optimal_constants(&target, bps, &model).unwrap();
            let dense = crate::approx::quadratic_error(&target, &p.profile(100), &model).unwrap();
            let fast = obj.error(bps).unwrap();
            assert!(
                (dense - fast).abs() <= 1e-9 * dense.abs().max(1e-12),
                "{bps:?}: {dense} vs {fast}"
            );
        }
    }

    #[test]
    fn invalid_breakpoints_are_degenerate() {
        let target = sample_gaussian(4.0, 12).unwrap();
        let model = AutocorrModel::identity(11).unwrap();
        for bad in [&[][..], &[0, 4], &[4, 4], &[6, 3], &[4, 12]] {
            assert!(matches!(
                optimal_constants(&target, bad, &model),
                Err(Error::DegeneratePartition(_))
            ));
        }
    }

    #[test]
    fn k_out_of_range() {
        let target = sample_gaussian(4.0, 12).unwrap();
        let model = AutocorrModel::identity(11).unwrap();
        for k in [0, 6] {
            assert!(matches!(
                search_partitions(&target, k, &model),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn single_slice_target_found_exactly() {
        let mut values = vec![0.0; 15];
        values[..=6].iter_mut().for_each(|v| *v = 1.0 / 13.0);
        let target = SampledKernel::new(values, 2.0).unwrap();
        let model = build_autocorr(14, DEFAULT_DC_VALUE).unwrap();
        let fit = search_partitions_with(&target, 1, &model, SearchStrategy::Exhaustive).unwrap();
        assert_eq!(fit.partition.breakpoints(), &[6]);
        assert!((fit.partition.constants()[0] - 1.0 / 13.0).abs() < 1e-14);
        assert!(fit.error.abs() < 1e-15);
    }

    #[test]
    fn top_n_keeps_sorted_best() {
        let mk = |error, a| Candidate {
            error,
            k: 1,
            bps: [a, 0, 0, 0, 0],
        };
        let mut top = TopN::new(2);
        for c in [mk(3.0, 1), mk(1.0, 5), mk(1.0, 2), mk(2.0, 9)] {
            top.offer(c);
        }
        let got: Vec<(f64, usize)> = top.items.iter().map(|c| (c.error, c.bps[0])).collect();
        assert_eq!(got, vec![(1.0, 2), (1.0, 5)]);
    }
}
