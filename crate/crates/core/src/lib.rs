//! Gaussian image filtering in a constant number of operations per pixel.
//!
//! A symmetric kernel is approximated by `k` overlapping constant "slices".
//! Each slice response is the difference of two running-sum lookups, so a
//! 1D pass costs `2k` additions and `k` multiplications per sample no matter
//! how wide the kernel is. Separable 2D filtering runs one pass over the rows
//! and one over the columns.
//!
//! The crate is split into:
//!
//! * [`approx`]: the piecewise-constant kernel optimizer. It weights kernel
//!   error by an autocorrelation model of natural images (1/u amplitude
//!   spectrum) so that the *output* l2 error is minimized, and rescales the
//!   result to any standard deviation.
//! * [`filter`]: the running-sum fast path.
//! * [`oracle`]: exact dense convolutions, MSE/PSNR and operation counting.
//! * [`image`], [`params`], [`synth`]: PGM I/O, parameter files and
//!   synthetic test images.

pub mod approx;
pub mod arith;
mod error;
pub mod filter;
pub mod image;
pub mod linalg;
pub mod oracle;
pub mod params;
pub mod synth;

pub use approx::{
    build_autocorr, optimal_constants, quadratic_error, sample_gaussian, scale_to_sigma,
    search_partitions, table_defaults, to_slices, AutocorrModel, Partition, SampledKernel, Slice,
    SliceKernel, DEFAULT_DC_VALUE, TABLE_SIGMA0,
};
pub use error::{Error, Result};
pub use filter::{
    filter_at, prefix_sum, separable_filter_2d, separable_filter_2d_par, slice_filter_1d, Boundary,
    PrefixSum, Signal1D,
};
pub use image::Image;
pub use oracle::{count_ops, direct_convolve_1d, exact_gaussian_2d, mse, psnr, OpCounter};
