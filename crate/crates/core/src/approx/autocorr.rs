//! Autocorrelation model of natural images and the quadratic-form kernel error.
//!
//! Filtering a signal `x` with kernels `w` and `ŵ` gives outputs whose squared
//! difference is `(w − ŵ)ᵀ A (w − ŵ)` with `A[j][k]` the autocorrelation of `x`
//! at lag `j − k`. Natural images have a `1/u` amplitude spectrum, so the
//! model takes `Φ` as the inverse DFT of `1/u²`, completing the undefined DC
//! term with a fixed value.

use rustfft::{num_complex::Complex, FftPlanner};

use super::SampledKernel;
use crate::error::{invalid, Error, Result};

/// DC completion that makes `Φ₀ / Φᵣ ≈ 4/3` (uniform pixels in `[0, 1]`:
/// `E[x²] = 1/3` at lag 0, `E[x]² = 1/4` at large lags).
pub const DEFAULT_DC_VALUE: f64 = 16.5;

/// Even autocorrelation sequence `Φ₋ᵣ … Φᵣ` and the Toeplitz form it induces
/// on half-kernel vectors of length `r + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct AutocorrModel {
    /// `phi[r + j] = Φⱼ`.
    phi: Vec<f64>,
    radius: usize,
}

impl AutocorrModel {
    /// Builds a model from `Φ₋ᵣ … Φᵣ` (odd length, even symmetric).
    pub fn from_phi(phi: Vec<f64>) -> Result<Self> {
        if phi.len() < 3 || phi.len() % 2 == 0 {
            return Err(invalid(format!(
                "phi must have odd length 2r+1 >= 3, got {}",
                phi.len()
            )));
        }
        if phi.iter().any(|v| !v.is_finite()) {
            return Err(invalid("phi values must be finite"));
        }
        let radius = phi.len() / 2;
        let scale = phi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for j in 1..=radius {
            if (phi[radius + j] - phi[radius - j]).abs() > 1e-12 * scale {
                return Err(invalid(format!("phi is not even at lag {j}")));
            }
        }
        Ok(Self { phi, radius })
    }

    /// `A = I`: the quadratic form reduces to the plain l2 kernel error.
    pub fn identity(radius: usize) -> Result<Self> {
        if radius == 0 {
            return Err(invalid("model radius must be at least 1"));
        }
        let mut phi = vec![0.0; 2 * radius + 1];
        phi[radius] = 1.0;
        Self::from_phi(phi)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Side length of `A`, i.e. `r + 1`.
    pub fn dim(&self) -> usize {
        self.radius + 1
    }

    /// `Φⱼ` for `|j| <= r`.
    pub fn phi(&self, lag: isize) -> f64 {
        self.phi[(self.radius as isize + lag) as usize]
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phi
    }

    /// `A[j][k] = Φ_{j−k}`.
    #[inline]
    pub fn entry(&self, j: usize, k: usize) -> f64 {
        self.phi[self.radius + j - k]
    }

    /// Row-major `(r+1) × (r+1)` matrix.
    pub fn as_matrix(&self) -> Vec<f64> {
        let n = self.dim();
        let mut m = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                m.push(self.entry(j, k));
            }
        }
        m
    }
}

/// Builds `Φ` from the spectrum `S(u) = 1/u²` (`S(0) = dc_value`) on a length
/// `2r + 1` frequency grid, with frequencies taken as signed
/// `u ∈ [−r, r]`.
pub fn build_autocorr(r: usize, dc_value: f64) -> Result<AutocorrModel> {
    if r == 0 {
        return Err(invalid("autocorrelation radius must be at least 1"));
    }
    if !dc_value.is_finite() {
        return Err(invalid("dc value must be finite"));
    }
    let len = 2 * r + 1;
    let mut buf: Vec<Complex<f64>> = (0..len)
        .map(|u| {
            let freq = u.min(len - u);
            let s = if freq == 0 {
                dc_value
            } else {
                1.0 / (freq * freq) as f64
            };
            Complex::new(s, 0.0)
        })
        .collect();
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);

    let scale = 1.0 / len as f64;
    let mut phi = vec![0.0; len];
    phi[r] = buf[0].re * scale;
    for j in 1..=r {
        // lags j and -j come out equal up to rounding; store one value twice
        let v = 0.5 * (buf[j].re + buf[len - j].re) * scale;
        phi[r + j] = v;
        phi[r - j] = v;
    }
    AutocorrModel::from_phi(phi)
}

/// `E₂ = (w − ŵ)ᵀ A (w − ŵ)` over half-kernel samples `t = 0..=r`.
///
/// Both vectors are indexed by the non-negative offsets only; the mirrored
/// half is not folded in.
pub fn quadratic_error(
    target: &SampledKernel,
    approx_weights: &[f64],
    model: &AutocorrModel,
) -> Result<f64> {
    let n = target.len();
    if approx_weights.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: approx_weights.len(),
        });
    }
    if model.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: model.dim(),
        });
    }
    let diff: Vec<f64> = target
        .values()
        .iter()
        .zip(approx_weights)
        .map(|(w, a)| w - a)
        .collect();
    let mut total = 0.0;
    for (j, dj) in diff.iter().enumerate() {
        let row: f64 = diff
            .iter()
            .enumerate()
            .map(|(k, dk)| model.entry(j, k) * dk)
            .sum();
        total += dj * row;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_is_exactly_even() {
        for r in [1, 2, 7, 50, 100] {
            let m = build_autocorr(r, DEFAULT_DC_VALUE).unwrap();
            for j in 1..=r as isize {
                assert_eq!(m.phi(j), m.phi(-j));
            }
        }
    }

    #[test]
    fn lag_ratio_is_four_thirds() {
        let m = build_autocorr(100, DEFAULT_DC_VALUE).unwrap();
        let ratio = m.phi(0) / m.phi(100);
        assert!((ratio / (4.0 / 3.0) - 1.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn zero_radius_rejected() {
        assert!(matches!(
            build_autocorr(0, 16.5),
            Err(Error::InvalidArgument(_))
        ));
        assert!(AutocorrModel::identity(0).is_err());
    }

    #[test]
    fn odd_or_uneven_phi_rejected() {
        assert!(AutocorrModel::from_phi(vec![1.0, 2.0]).is_err());
        assert!(AutocorrModel::from_phi(vec![0.5, 1.0, 0.4]).is_err());
        assert!(AutocorrModel::from_phi(vec![0.5, 1.0, 0.5]).is_ok());
    }

    #[test]
    fn zero_residual_has_zero_error() {
        let g = crate::approx::sample_gaussian(3.0, 10).unwrap();
        let m = build_autocorr(9, DEFAULT_DC_VALUE).unwrap();
        assert_eq!(quadratic_error(&g, g.values(), &m).unwrap(), 0.0);
    }

    #[test]
    fn identity_model_is_squared_l2() {
        let g = crate::approx::sample_gaussian(3.0, 10).unwrap();
        let approx: Vec<f64> = (0..10).map(|i| 0.01 * i as f64).collect();
        let m = AutocorrModel::identity(9).unwrap();
        let want: f64 = g
            .values()
            .iter()
            .zip(&approx)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let got = quadratic_error(&g, &approx, &m).unwrap();
        assert!((got - want).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let g = crate::approx::sample_gaussian(3.0, 10).unwrap();
        let m = AutocorrModel::identity(9).unwrap();
        assert!(matches!(
            quadratic_error(&g, &[0.0; 9], &m),
            Err(Error::DimensionMismatch { .. })
        ));
        let m = AutocorrModel::identity(5).unwrap();
        assert!(matches!(
            quadratic_error(&g, &[0.0; 10], &m),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
