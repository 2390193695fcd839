//! Reference convolutions, error metrics and operation counting.

use std::f64::consts::PI;

use crate::approx::SliceKernel;
use crate::arith::Counting;
use crate::error::{invalid, Error, Result};
use crate::filter::{separable_with, Boundary, Signal1D};
use crate::image::Image;

/// PSNR reported for identical images.
pub const PSNR_IDENTICAL: f64 = f64::INFINITY;

/// Arithmetic totals over a set of pixels.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub additions: u64,
    pub multiplications: u64,
    pub pixels: u64,
}

impl OpCounter {
    pub fn adds_per_pixel(&self) -> f64 {
        self.additions as f64 / self.pixels as f64
    }

    pub fn muls_per_pixel(&self) -> f64 {
        self.multiplications as f64 / self.pixels as f64
    }
}

/// Centered dense convolution (odd-length kernel, `kernel[R]` at offset 0).
pub fn direct_convolve_1d(
    signal: &Signal1D,
    dense_kernel: &[f64],
    boundary: Boundary,
) -> Result<Signal1D> {
    if dense_kernel.len() % 2 == 0 {
        return Err(invalid(format!(
            "dense kernel must have odd length, got {}",
            dense_kernel.len()
        )));
    }
    let v = signal.values();
    let n = v.len() as isize;
    let r = (dense_kernel.len() / 2) as isize;
    let sample = |i: isize| -> f64 {
        match boundary {
            Boundary::Replicate => v[i.clamp(0, n - 1) as usize],
            Boundary::Zero if (0..n).contains(&i) => v[i as usize],
            Boundary::Zero => 0.0,
        }
    };
    let out = (0..n)
        .map(|x| {
            dense_kernel
                .iter()
                .enumerate()
                .map(|(j, k)| k * sample(x + j as isize - r))
                .sum()
        })
        .collect();
    Signal1D::new(out)
}

/// Truncation radius of the reference Gaussian, `ceil(π·σ)`.
pub fn gaussian_radius(sigma: f64) -> usize {
    (PI * sigma).ceil() as usize
}

/// Sampled Gaussian on `[−R, R]`, `R = ceil(π·σ)`, normalized to unit sum.
pub fn gaussian_taps(sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid(format!("sigma must be positive, got {sigma}")));
    }
    let r = gaussian_radius(sigma) as isize;
    let denom = 2.0 * sigma * sigma;
    let mut taps: Vec<f64> = (-r..=r)
        .map(|t| (-((t * t) as f64) / denom).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);
    Ok(taps)
}

/// Separable dense convolution with replicate boundaries; `taps` odd-length.
pub fn dense_separable_2d(image: &Image, taps: &[f64]) -> Result<Image> {
    if taps.len() % 2 == 0 {
        return Err(invalid("dense kernel must have odd length"));
    }
    let (w, h) = (image.width(), image.height());
    let r = taps.len() / 2;

    let mut tmp = vec![0.0; w * h];
    let mut padded = vec![0.0; w + 2 * r];
    for (src, dst) in image.pixels().chunks_exact(w).zip(tmp.chunks_exact_mut(w)) {
        padded[..r].fill(src[0]);
        padded[r..r + w].copy_from_slice(src);
        padded[r + w..].fill(src[w - 1]);
        for (x, d) in dst.iter_mut().enumerate() {
            *d = taps
                .iter()
                .zip(&padded[x..x + taps.len()])
                .map(|(t, v)| t * v)
                .sum();
        }
    }

    let mut out = vec![0.0; w * h];
    for y in 0..h {
        let dst = &mut out[y * w..(y + 1) * w];
        for (j, t) in taps.iter().enumerate() {
            let sy = (y + j).saturating_sub(r).min(h - 1);
            for (d, s) in dst.iter_mut().zip(&tmp[sy * w..(sy + 1) * w]) {
                *d += t * s;
            }
        }
    }
    Image::from_raw(w, h, out)
}

/// Reference Gaussian blur: dense taps of radius `ceil(π·σ)`, replicate edges.
pub fn exact_gaussian_2d(image: &Image, sigma: f64) -> Result<Image> {
    dense_separable_2d(image, &gaussian_taps(sigma)?)
}

/// Per-pixel op rates of dense separable filtering with radius `r`
/// (`h + w − 2` additions, `h + w` multiplications for an `h × w` kernel).
pub fn direct_op_rates(radius: usize) -> (f64, f64) {
    let side = (2 * radius + 1) as f64;
    (2.0 * side - 2.0, 2.0 * side)
}

fn same_dims(a: &Image, b: &Image) -> Result<()> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(())
}

pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    same_dims(a, b)?;
    let total: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(total / a.len() as f64)
}

/// `−10·log10(MSE)` for images in `[0, 1]`; [`PSNR_IDENTICAL`] when `MSE = 0`.
pub fn psnr(a: &Image, b: &Image) -> Result<f64> {
    Ok(psnr_from_mse(mse(a, b)?))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        PSNR_IDENTICAL
    } else {
        -10.0 * mse.log10()
    }
}

/// Runs the 2D running-sum filter with counting arithmetic and reports totals
/// over interior pixels.
pub fn count_ops(image: &Image, kernel: &SliceKernel) -> Result<OpCounter> {
    let mut counter = Counting::new(image.width(), image.height(), kernel.max_radius());
    separable_with(&mut counter, image, kernel)?;
    let pixels = counter.interior_pixels();
    if pixels == 0 {
        return Err(invalid(format!(
            "a {}x{} image has no interior pixels for radius {}",
            image.width(),
            image.height(),
            kernel.max_radius()
        )));
    }
    Ok(OpCounter {
        additions: counter.interior_additions,
        multiplications: counter.interior_multiplications,
        pixels,
    })
}
