//! Synthetic test images.
//!
//! `OneOverF` images stand in for natural photographs: their amplitude
//! spectrum falls off as `1/|f|` with random phases.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::{num_complex::Complex, FftDirection, FftPlanner};

use crate::error::{invalid, Error, Result};
use crate::image::Image;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    OneOverF,
    UniformNoise,
    Impulse,
    Constant,
}

impl SynthKind {
    pub const ALL: [SynthKind; 4] = [
        SynthKind::OneOverF,
        SynthKind::UniformNoise,
        SynthKind::Impulse,
        SynthKind::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SynthKind::OneOverF => "one-over-f",
            SynthKind::UniformNoise => "uniform-noise",
            SynthKind::Impulse => "impulse",
            SynthKind::Constant => "constant",
        }
    }
}

impl fmt::Display for SynthKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid(format!("unknown image kind {s:?}")))
    }
}

/// Generates a `width × height` image in `[0, 1]`; deterministic per seed.
///
/// `Impulse` is a single 1.0 at `(width/2, height/2)` on black, `Constant` is
/// 0.5 everywhere.
pub fn synthesize(kind: SynthKind, width: usize, height: usize, seed: u64) -> Result<Image> {
    if width == 0 || height == 0 {
        return Err(invalid(format!("empty image {width}x{height}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SynthKind::Constant => Ok(Image::filled(width, height, 0.5)),
        SynthKind::Impulse => {
            let (cx, cy) = (width / 2, height / 2);
            Ok(Image::from_fn(width, height, |x, y| {
                if (x, y) == (cx, cy) {
                    1.0
                } else {
                    0.0
                }
            }))
        }
        SynthKind::UniformNoise => Ok(Image::from_fn(width, height, |_, _| rng.random::<f64>())),
        SynthKind::OneOverF => one_over_f(width, height, &mut rng),
    }
}

fn one_over_f(width: usize, height: usize, rng: &mut ChaCha8Rng) -> Result<Image> {
    // Phases come from the spectrum of real white noise, which already has the
    // Hermitian symmetry a real-valued result needs.
    let mut spectrum: Vec<Complex<f64>> = (0..width * height)
        .map(|_| Complex::new(rng.sample(StandardNormal), 0.0))
        .collect();
    fft_2d(&mut spectrum, width, height, FftDirection::Forward);

    for v in 0..height {
        let fy = v.min(height - v) as f64 / height as f64;
        for u in 0..width {
            let fx = u.min(width - u) as f64 / width as f64;
            let f = (fx * fx + fy * fy).sqrt();
            let z = &mut spectrum[v * width + u];
            let mag = z.norm();
            *z = if f == 0.0 || mag == 0.0 {
                Complex::new(0.0, 0.0)
            } else {
                *z / (mag * f)
            };
        }
    }
    fft_2d(&mut spectrum, width, height, FftDirection::Inverse);

    let (lo, hi) = spectrum
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| {
            (lo.min(z.re), hi.max(z.re))
        });
    let span = hi - lo;
    let pixels = spectrum
        .iter()
        .map(|z| if span > 0.0 { (z.re - lo) / span } else { 0.5 })
        .collect();
    Image::from_raw(width, height, pixels)
}

/// In-place unnormalized 2D FFT of a row-major `width × height` buffer.
pub fn fft_2d(buf: &mut [Complex<f64>], width: usize, height: usize, dir: FftDirection) {
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft(width, dir);
    for row in buf.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft(height, dir);
    let mut col = vec![Complex::new(0.0, 0.0); height];
    for x in 0..width {
        for (y, c) in col.iter_mut().enumerate() {
            *c = buf[y * width + x];
        }
        col_fft.process(&mut col);
        for (y, c) in col.iter().enumerate() {
            buf[y * width + x] = *c;
        }
    }
}
