//! Running-sum slice filtering.
//!
//! For a signal `f` with running sum `I(x) = Σ_{x' <= x} f(x')`, a slice of
//! radius `p` and weight `w` contributes `w · (I(x + p) − I(x − p − 1))` at `x`.
//! A kernel of `k` slices therefore costs `2k` additions and `k`
//! multiplications per sample (one addition for the running sum, `k`
//! differences, `k − 1` to accumulate), independent of the radii.
//!
//! Boundaries replicate the edge samples. This is done on the running sum
//! itself: `I(−1 − m) = −m·f(0)` and `I(n − 1 + m) = I(n − 1) + m·f(n − 1)`.
//! Each line is extended by `max_radius` entries on both sides so that every
//! output sample goes through the same inner loop.

use rayon::prelude::*;

use crate::approx::SliceKernel;
use crate::arith::{Arith, Axis, Plain};
use crate::error::{invalid, Error, Result};
use crate::image::Image;

/// A non-empty 1D signal of finite samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal1D(Vec<f64>);

impl Signal1D {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("a signal needs at least one sample"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("signal samples must be finite"));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// How samples outside `[0, n)` are defined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Boundary {
    /// `f(−j) = f(0)`, `f(n − 1 + j) = f(n − 1)`.
    #[default]
    Replicate,
    /// Zero outside the signal.
    Zero,
}

/// Running sum of a signal, extendable past both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct PrefixSum {
    sums: Vec<f64>,
    first: f64,
    last: f64,
    boundary: Boundary,
}

impl PrefixSum {
    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn with_boundary(mut self, boundary: Boundary) -> Self {
        self.boundary = boundary;
        self
    }

    /// `I(x)` for any integer `x`, with `I(−1) = 0`.
    pub fn at(&self, x: isize) -> f64 {
        let n = self.sums.len() as isize;
        if x < 0 {
            return match self.boundary {
                Boundary::Replicate => (x + 1) as f64 * self.first,
                Boundary::Zero => 0.0,
            };
        }
        if x >= n {
            let tail = self.sums[(n - 1) as usize];
            return match self.boundary {
                Boundary::Replicate => tail + (x - n + 1) as f64 * self.last,
                Boundary::Zero => tail,
            };
        }
        self.sums[x as usize]
    }

    /// Sum of the (extended) signal over `[lo, hi]`.
    pub fn window(&self, lo: isize, hi: isize) -> f64 {
        self.at(hi) - self.at(lo - 1)
    }
}

/// Inclusive running sum with replicate boundary.
pub fn prefix_sum(signal: &Signal1D) -> PrefixSum {
    let v = signal.values();
    let mut acc = 0.0;
    let sums = v
        .iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect();
    PrefixSum {
        sums,
        first: v[0],
        last: v[v.len() - 1],
        boundary: Boundary::Replicate,
    }
}

fn check_fits(kernel: &SliceKernel, len: usize) -> Result<()> {
    let radius = kernel.max_radius();
    if radius >= len {
        return Err(Error::KernelTooLarge { radius, len });
    }
    Ok(())
}

/// Per-line plan: slice windows as offsets into the extended running sum.
///
/// `ext[e]` holds `I(e − pad − 1)`, so output `x` reads
/// `ext[x + hi] − ext[x + lo]` with `hi = pad + 1 + p`, `lo = pad − p`.
#[derive(Clone, Debug)]
struct LinePlan {
    pad: usize,
    taps: Vec<(usize, usize, f64)>,
}

impl LinePlan {
    fn new(kernel: &SliceKernel) -> Self {
        let pad = kernel.max_radius();
        let taps = kernel
            .slices()
            .iter()
            .map(|s| (pad + 1 + s.radius, pad - s.radius, s.weight))
            .collect();
        Self { pad, taps }
    }

    fn ext_len(&self, n: usize) -> usize {
        n + 2 * self.pad + 1
    }

    /// Fills `ext` with the replicate-extended running sum of `src`.
    #[inline]
    fn extend<A: Arith>(&self, ar: &mut A, src: &[f64], ext: &mut [f64]) {
        let n = src.len();
        let pad = self.pad;
        let (first, last) = (src[0], src[n - 1]);

        ar.at(None);
        for m in 1..=pad {
            ext[pad - m] = ar.mul(-(m as f64), first);
        }
        ext[pad] = 0.0;
        ar.at(Some(0));
        ext[pad + 1] = first;
        for x in 1..n {
            ar.at(Some(x));
            ext[pad + 1 + x] = ar.add(ext[pad + x], src[x]);
        }
        ar.at(None);
        let tail = ext[pad + n];
        for m in 1..=pad {
            let step = ar.mul(m as f64, last);
            ext[pad + n + m] = ar.add(tail, step);
        }
    }

    /// Response at `x` from an extended running sum.
    #[inline(always)]
    fn respond<A: Arith>(&self, ar: &mut A, ext: &[f64], x: usize) -> f64 {
        let (hi, lo, w) = self.taps[0];
        let d = ar.sub(ext[x + hi], ext[x + lo]);
        let mut acc = ar.mul(w, d);
        for &(hi, lo, w) in &self.taps[1..] {
            let d = ar.sub(ext[x + hi], ext[x + lo]);
            let t = ar.mul(w, d);
            acc = ar.add(acc, t);
        }
        acc
    }

    #[inline]
    fn run<A: Arith>(&self, ar: &mut A, src: &[f64], ext: &mut [f64], out: &mut [f64]) {
        self.extend(ar, src, ext);
        for (x, o) in out.iter_mut().enumerate() {
            ar.at(Some(x));
            *o = self.respond(ar, ext, x);
        }
    }
}

/// Filters a signal with a slice kernel under replicate boundaries.
///
/// The kernel is applied as given; it preserves constants only when its DC
/// gain is 1.
pub fn slice_filter_1d(signal: &Signal1D, kernel: &SliceKernel) -> Result<Signal1D> {
    let n = signal.len();
    check_fits(kernel, n)?;
    let plan = LinePlan::new(kernel);
    let mut ext = vec![0.0; plan.ext_len(n)];
    let mut out = vec![0.0; n];
    plan.run(&mut Plain, signal.values(), &mut ext, &mut out);
    Ok(Signal1D(out))
}

/// Columns gathered per column-pass strip.
const STRIP: usize = 8;

pub(crate) fn separable_with<A: Arith>(
    ar: &mut A,
    image: &Image,
    kernel: &SliceKernel,
) -> Result<Image> {
    let (w, h) = (image.width(), image.height());
    check_fits(kernel, w)?;
    check_fits(kernel, h)?;
    let plan = LinePlan::new(kernel);
    let mut ext = vec![0.0; plan.ext_len(w.max(h))];
    let mut out = vec![0.0; w * h];

    for (y, (src, dst)) in image
        .pixels()
        .chunks_exact(w)
        .zip(out.chunks_exact_mut(w))
        .enumerate()
    {
        ar.begin_line(Axis::Row, y);
        plan.run(ar, src, &mut ext[..plan.ext_len(w)], dst);
    }

    // column pass over strips of STRIP columns, gathered into contiguous lines
    let mut lines = vec![0.0; STRIP * h];
    let mut result = vec![0.0; h];
    for x0 in (0..w).step_by(STRIP) {
        let cols = STRIP.min(w - x0);
        for y in 0..h {
            let row = &out[y * w + x0..y * w + x0 + cols];
            for (c, v) in row.iter().enumerate() {
                lines[c * h + y] = *v;
            }
        }
        for c in 0..cols {
            ar.begin_line(Axis::Column, x0 + c);
            plan.run(
                ar,
                &lines[c * h..(c + 1) * h],
                &mut ext[..plan.ext_len(h)],
                &mut result,
            );
            for (y, v) in result.iter().enumerate() {
                out[y * w + x0 + c] = *v;
            }
        }
    }
    Image::from_raw(w, h, out)
}

/// Rows first, then columns of the intermediate, single-threaded.
///
/// Scratch memory beyond the output is `O(max(width, height))`.
pub fn separable_filter_2d(image: &Image, kernel: &SliceKernel) -> Result<Image> {
    separable_with(&mut Plain, image, kernel)
}

/// Data-parallel variant of [`separable_filter_2d`] (rows, then columns,
/// distributed over the rayon pool). Bit-identical to the sequential version.
///
/// The column pass works on a transposed copy, so it needs one extra
/// image-sized buffer.
pub fn separable_filter_2d_par(image: &Image, kernel: &SliceKernel) -> Result<Image> {
    let (w, h) = (image.width(), image.height());
    check_fits(kernel, w)?;
    check_fits(kernel, h)?;
    let plan = LinePlan::new(kernel);

    let mut rows = vec![0.0; w * h];
    rows.par_chunks_mut(w)
        .zip(image.pixels().par_chunks(w))
        .for_each_init(
            || vec![0.0; plan.ext_len(w)],
            |ext, (dst, src)| plan.run(&mut Plain, src, ext, dst),
        );

    let transposed = transpose(&rows, w, h);
    let mut cols = vec![0.0; w * h];
    cols.par_chunks_mut(h)
        .zip(transposed.par_chunks(h))
        .for_each_init(
            || vec![0.0; plan.ext_len(h)],
            |ext, (dst, src)| plan.run(&mut Plain, src, ext, dst),
        );
    Image::from_raw(w, h, transpose(&cols, h, w))
}

/// Transposes a row-major `w × h` buffer into a row-major `h × w` one.
fn transpose(src: &[f64], w: usize, h: usize) -> Vec<f64> {
    const B: usize = 32;
    let mut dst = vec![0.0; w * h];
    for y0 in (0..h).step_by(B) {
        for x0 in (0..w).step_by(B) {
            for y in y0..(y0 + B).min(h) {
                for x in x0..(x0 + B).min(w) {
                    dst[x * h + y] = src[y * w + x];
                }
            }
        }
    }
    dst
}

/// Evaluates the separable filter at selected pixels only.
///
/// Running sums are computed for the rows the requested windows touch; the
/// column pass then runs over row-filtered values of the requested columns
/// only. Values are bit-identical to the corresponding pixels of
/// [`separable_filter_2d`].
pub fn filter_at(
    image: &Image,
    kernel: &SliceKernel,
    points: &[(usize, usize)],
) -> Result<Vec<f64>> {
    let (w, h) = (image.width(), image.height());
    check_fits(kernel, w)?;
    check_fits(kernel, h)?;
    if let Some(&(x, y)) = points.iter().find(|&&(x, y)| x >= w || y >= h) {
        return Err(invalid(format!("point ({x}, {y}) outside a {w}x{h} image")));
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let plan = LinePlan::new(kernel);
    let pad = plan.pad;

    // column x's running sum is needed up to row (max y + pad), clamped
    let last_row = points
        .iter()
        .map(|&(_, y)| (y + pad).min(h - 1))
        .max()
        .unwrap_or(0);
    let mut columns: Vec<usize> = points.iter().map(|&(x, _)| x).collect();
    columns.sort_unstable();
    columns.dedup();

    // row-filtered values, column-major over the needed columns
    let rows_needed = last_row + 1;
    let mut row_filtered = vec![0.0; columns.len() * rows_needed];
    let mut ext = vec![0.0; plan.ext_len(w.max(h))];
    for y in 0..rows_needed {
        let src = &image.pixels()[y * w..(y + 1) * w];
        plan.extend(&mut Plain, src, &mut ext[..plan.ext_len(w)]);
        for (ci, &x) in columns.iter().enumerate() {
            row_filtered[ci * rows_needed + y] = plan.respond(&mut Plain, &ext, x);
        }
    }

    // Rows beyond `last_row` only feed the right extension, which no
    // requested window reaches unless `last_row == h - 1`.
    let mut col_ext = vec![0.0; plan.ext_len(rows_needed)];
    let mut cached: Option<usize> = None;
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by_key(|&i| points[i].0);
    let mut values = vec![0.0; points.len()];
    for i in order {
        let (x, y) = points[i];
        let ci = columns.binary_search(&x).expect("column collected above");
        if cached != Some(ci) {
            let col = &row_filtered[ci * rows_needed..(ci + 1) * rows_needed];
            plan.extend(&mut Plain, col, &mut col_ext);
            cached = Some(ci);
        }
        values[i] = plan.respond(&mut Plain, &col_ext, y);
    }
    Ok(values)
}
