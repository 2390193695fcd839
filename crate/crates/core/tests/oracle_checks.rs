use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slicegauss::oracle::{direct_op_rates, gaussian_radius, gaussian_taps};
use slicegauss::synth::{fft_2d, synthesize, SynthKind};
use slicegauss::{
    count_ops, direct_convolve_1d, exact_gaussian_2d, mse, psnr, Boundary, Image, Signal1D, Slice,
    SliceKernel,
};

#[test]
fn direct_convolution_matches_double_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let v: Vec<f64> = (0..40).map(|_| rng.random()).collect();
    let kernel: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
    let s = Signal1D::new(v.clone()).unwrap();
    for boundary in [Boundary::Replicate, Boundary::Zero] {
        let got = direct_convolve_1d(&s, &kernel, boundary).unwrap();
        for x in 0..40i64 {
            let mut want = 0.0;
            for t in -3i64..=3 {
                let i = x + t;
                let sample = match boundary {
                    Boundary::Replicate => v[i.clamp(0, 39) as usize],
                    Boundary::Zero if (0..40).contains(&i) => v[i as usize],
                    Boundary::Zero => 0.0,
                };
                want += kernel[(t + 3) as usize] * sample;
            }
            assert!((got.values()[x as usize] - want).abs() < 1e-13);
        }
    }
}

#[test]
fn exact_gaussian_impulse_matches_2d_gaussian() {
    let sigma = 3.0;
    let mut px = vec![0.0; 32 * 32];
    px[16 * 32 + 16] = 1.0;
    let img = Image::from_raw(32, 32, px).unwrap();
    let out = exact_gaussian_2d(&img, sigma).unwrap();

    // non-separable evaluation of exp(−(x²+y²)/2σ²) on the same support
    let r = gaussian_radius(sigma) as i64;
    let mut total = 0.0;
    for dy in -r..=r {
        for dx in -r..=r {
            total += (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp();
        }
    }
    for y in 0..32i64 {
        for x in 0..32i64 {
            let (dx, dy) = (x - 16, y - 16);
            let want = if dx.abs() <= r && dy.abs() <= r {
                (-((dx * dx + dy * dy) as f64) / (2.0 * sigma * sigma)).exp() / total
            } else {
                0.0
            };
            assert!((out.get(x as usize, y as usize) - want).abs() < 1e-14);
        }
    }
}

/// Complementary error function (Numerical Recipes erfcc, |rel err| < 1.2e-7).
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.26551223
        + t * (1.00002368
            + t * (0.37409196
                + t * (0.09678418
                    + t * (-0.18628806
                        + t * (0.27886807
                            + t * (-1.13520398
                                + t * (1.48851587 + t * (-0.82215223 + t * 0.17087277))))))));
    let r = t * poly.exp();
    if x >= 0.0 {
        r
    } else {
        2.0 - r
    }
}

#[test]
fn truncated_mass_matches_continuous_tail() {
    for sigma in [2.0f64, 10.0, 50.0] {
        let r = gaussian_radius(sigma) as i64;
        let mass = |t: i64| (-((t * t) as f64) / (2.0 * sigma * sigma)).exp();
        let kept: f64 = (-r..=r).map(mass).sum();
        let all: f64 = (-40 * r..=40 * r).map(mass).sum();
        let lost = 1.0 - kept / all;
        // samples |t| <= R cover the continuous interval |t| < R + 1/2
        let want = erfc((r as f64 + 0.5) / (sigma * 2f64.sqrt()));
        assert!(
            (lost - want).abs() <= 0.2 * want,
            "sigma {sigma}: {lost} vs {want}"
        );
        let taps = gaussian_taps(sigma).unwrap();
        assert_eq!(taps.len() as i64, 2 * r + 1);
        assert!((taps.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn mse_matches_naive_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let a = Image::from_fn(8, 8, |_, _| rng.random());
    let b = Image::from_fn(8, 8, |_, _| rng.random());
    let mut want = 0.0;
    for y in 0..8 {
        for x in 0..8 {
            let d = a.get(x, y) - b.get(x, y);
            want += d * d;
        }
    }
    want /= 64.0;
    assert!((mse(&a, &b).unwrap() - want).abs() < 1e-15);
    assert!((psnr(&a, &b).unwrap() + 10.0 * want.log10()).abs() < 1e-12);
}

#[test]
fn op_rates_do_not_depend_on_size_or_sigma() {
    for k in [1, 3, 5] {
        for (side, sigma) in [(96, 2.0), (160, 9.0), (220, 20.0)] {
            let img = synthesize(SynthKind::UniformNoise, side, side + 17, 3).unwrap();
            let kernel = if k == 1 {
                let radius = (1.7 * sigma) as usize;
                let weight = 1.0 / (2 * radius + 1) as f64;
                SliceKernel::new(vec![Slice { radius, weight }], sigma).unwrap()
            } else {
                SliceKernel::gaussian(k, sigma).unwrap()
            };
            // colliding radii merge at small sigma, so count the slices kept
            let slices = kernel.k();
            if sigma >= 9.0 {
                assert_eq!(slices, k);
            }
            let c = count_ops(&img, &kernel).unwrap();
            assert_eq!(c.adds_per_pixel(), (4 * slices) as f64, "k {k} side {side}");
            assert_eq!(c.muls_per_pixel(), (2 * slices) as f64, "k {k} side {side}");
        }
    }
    assert_eq!(direct_op_rates(3), (12.0, 14.0));
}

#[test]
fn one_over_f_spectrum_has_unit_slope() {
    let n = 256;
    let img = synthesize(SynthKind::OneOverF, n, n, 42).unwrap();
    assert!(img.pixels().iter().all(|v| (0.0..=1.0).contains(v)));
    let mean = img.pixels().iter().sum::<f64>() / (n * n) as f64;
    let mut buf: Vec<_> = img
        .pixels()
        .iter()
        .map(|&v| rustfft::num_complex::Complex::new(v - mean, 0.0))
        .collect();
    fft_2d(&mut buf, n, n, rustfft::FftDirection::Forward);

    // radially averaged amplitude in integer frequency rings
    let mut sum = vec![0.0; n / 2];
    let mut count = vec![0usize; n / 2];
    for v in 0..n {
        for u in 0..n {
            let fu = u.min(n - u) as f64;
            let fv = v.min(n - v) as f64;
            let f = (fu * fu + fv * fv).sqrt().round() as usize;
            if f >= 1 && f < n / 2 {
                sum[f] += buf[v * n + u].norm();
                count[f] += 1;
            }
        }
    }
    let pts: Vec<(f64, f64)> = (2..n / 2)
        .map(|f| ((f as f64).ln(), (sum[f] / count[f] as f64).ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 1.0).abs() <= 0.15, "slope {slope}");
}

#[test]
fn synthesis_is_deterministic() {
    for kind in SynthKind::ALL {
        let a = synthesize(kind, 40, 30, 9).unwrap();
        let b = synthesize(kind, 40, 30, 9).unwrap();
        assert_eq!(a, b);
        assert!(a.pixels().iter().all(|v| (0.0..=1.0).contains(v)));
    }
    let a = synthesize(SynthKind::OneOverF, 40, 30, 9).unwrap();
    let b = synthesize(SynthKind::OneOverF, 40, 30, 10).unwrap();
    assert_ne!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mse_is_symmetric_and_shift_invariant(seed in any::<u64>(), c in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = Image::from_fn(9, 7, |_, _| rng.random());
        let b = Image::from_fn(9, 7, |_, _| rng.random());
        prop_assert_eq!(mse(&a, &b).unwrap(), mse(&b, &a).unwrap());
        prop_assert_eq!(psnr(&a, &b).unwrap(), psnr(&b, &a).unwrap());
        let shift = |img: &Image| Image::from_fn(9, 7, |x, y| img.get(x, y) + c);
        let m = mse(&a, &b).unwrap();
        prop_assert!((mse(&shift(&a), &shift(&b)).unwrap() - m).abs() <= 1e-12);
    }
}
