//! Command implementations behind the `slicegauss` binary.
//!
//! Each `cmd_*` function does the work of one subcommand and returns a typed
//! error; `main` only parses arguments and maps errors to exit codes.

use std::io;
use std::path::{Path, PathBuf};

use slicegauss::approx::{search_partitions_with, SearchStrategy};
use slicegauss::params::{ErrorModel, KernelParams};
use slicegauss::synth::{synthesize, SynthKind};
use slicegauss::{
    build_autocorr, psnr, sample_gaussian, scale_to_sigma, separable_filter_2d,
    separable_filter_2d_par, table_defaults, to_slices, AutocorrModel, Image, SliceKernel,
    DEFAULT_DC_VALUE,
};

pub mod bench;

pub use bench::{cmd_bench, BenchConfig, BenchRecord, Method, CSV_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: slicegauss::Error,
    },
    #[error(transparent)]
    Core(#[from] slicegauss::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Corpus(String),
}

impl CliError {
    /// 2 for usage errors and missing inputs, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::File {
                source: slicegauss::Error::Io(e),
                ..
            } if e.kind() == io::ErrorKind::NotFound => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn at_path<T>(path: &Path, r: slicegauss::Result<T>) -> CliResult<T> {
    r.map_err(|source| CliError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_image(path: &Path) -> CliResult<(Image, u16)> {
    at_path(path, Image::read_pgm(path))
}

pub fn write_image(image: &Image, path: &Path, maxval: u16) -> CliResult<()> {
    at_path(path, image.write_pgm(path, maxval))
}

/// Slice kernel at `sigma` from a parameter file, or from the published
/// parameters for `k` when none is given.
pub fn kernel_for(
    sigma: f64,
    k: Option<usize>,
    params: Option<&KernelParams>,
) -> CliResult<SliceKernel> {
    let base = match (params, k) {
        (Some(p), Some(k)) if p.k != k => {
            return Err(CliError::Usage(format!(
                "--k {k} conflicts with a parameter file for k = {}",
                p.k
            )))
        }
        (Some(p), _) => p.slice_kernel()?,
        (None, Some(k @ 3..=5)) => {
            let (partition, sigma0) = table_defaults(k)?;
            to_slices(&partition, sigma0)?
        }
        (None, Some(k)) => {
            return Err(CliError::Usage(format!(
                "built-in parameters cover k = 3, 4, 5; pass --params for k = {k}"
            )))
        }
        (None, None) => return Err(CliError::Usage("give --k or --params".into())),
    };
    Ok(scale_to_sigma(&base, sigma)?)
}

/// Filters `input` into `output`, keeping the input's bit depth.
pub fn cmd_filter(
    input: &Path,
    output: &Path,
    sigma: f64,
    k: Option<usize>,
    params_path: Option<&Path>,
    parallel: bool,
) -> CliResult<()> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(CliError::Usage(format!(
            "--sigma must be positive, got {sigma}"
        )));
    }
    let params = params_path
        .map(|p| at_path(p, KernelParams::load(p)))
        .transpose()?;
    let kernel = kernel_for(sigma, k, params.as_ref())?;
    let (image, maxval) = read_image(input)?;
    let out = if parallel {
        separable_filter_2d_par(&image, &kernel)?
    } else {
        separable_filter_2d(&image, &kernel)?
    };
    write_image(&out, output, maxval)
}

/// Optimizer settings. The defaults fit 100 samples of a Gaussian with
/// σ0 = 100/π, matching the built-in parameters.
#[derive(Clone, Debug)]
pub struct OptimizeOptions {
    pub samples: usize,
    pub dc_value: f64,
    pub strategy: Option<SearchStrategy>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            samples: 100,
            dc_value: DEFAULT_DC_VALUE,
            strategy: None,
        }
    }
}

/// Searches the best `k`-slice partition under `model` and returns its
/// parameters. σ0 is `samples / π`, so the samples span `[0, π·σ0)`.
pub fn optimize(k: usize, model: ErrorModel, opts: &OptimizeOptions) -> CliResult<KernelParams> {
    if !(1..=slicegauss::approx::MAX_K).contains(&k) {
        return Err(CliError::Usage(format!("--k must be in 1..=5, got {k}")));
    }
    if opts.samples < k + 1 {
        return Err(CliError::Usage(format!(
            "--samples must exceed k, got {} for k = {k}",
            opts.samples
        )));
    }
    let sigma0 = opts.samples as f64 / std::f64::consts::PI;
    let target = sample_gaussian(sigma0, opts.samples)?;
    let a = match model {
        ErrorModel::Qf => build_autocorr(target.radius(), opts.dc_value)?,
        ErrorModel::L2 => AutocorrModel::identity(target.radius())?,
    };
    let strategy = opts
        .strategy
        .unwrap_or_else(|| SearchStrategy::default_for(k));
    let fit = search_partitions_with(&target, k, &a, strategy)?;
    Ok(KernelParams::new(&fit.partition, sigma0, model, fit.error)?)
}

pub fn cmd_optimize(
    k: usize,
    model: ErrorModel,
    output: &Path,
    opts: &OptimizeOptions,
) -> CliResult<KernelParams> {
    let params = optimize(k, model, opts)?;
    at_path(output, params.save(output))?;
    Ok(params)
}

pub fn cmd_synth(
    kind: SynthKind,
    width: usize,
    height: usize,
    seed: u64,
    output: &Path,
    maxval: u16,
) -> CliResult<()> {
    if width == 0 || height == 0 {
        return Err(CliError::Usage(format!("empty size {width}x{height}")));
    }
    let image = synthesize(kind, width, height, seed)?;
    write_image(&image, output, maxval)
}

/// PSNR in dB of `b` against `a`; infinite for identical images.
pub fn cmd_psnr(a: &Path, b: &Path) -> CliResult<f64> {
    let (x, _) = read_image(a)?;
    let (y, _) = read_image(b)?;
    Ok(psnr(&x, &y)?)
}
