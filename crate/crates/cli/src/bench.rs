//! Speed/accuracy benchmark over a corpus of PGM images.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use slicegauss::oracle::{direct_op_rates, gaussian_radius};
use slicegauss::params::ErrorModel;
use slicegauss::{
    count_ops, exact_gaussian_2d, psnr, scale_to_sigma, separable_filter_2d,
    separable_filter_2d_par, table_defaults, to_slices, Image, SliceKernel,
};

use crate::{optimize, read_image, CliError, CliResult, OptimizeOptions};

pub const CSV_HEADER: &str = "method,k,sigma,image_id,wall_time_ns,psnr_db,adds_per_px,muls_per_px";

/// One CSV row. `psnr_db` is infinite when the output equals the reference,
/// written as `inf`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub method: String,
    pub k: usize,
    pub sigma: f64,
    pub image_id: String,
    pub wall_time_ns: u64,
    pub psnr_db: f64,
    pub adds_per_px: f64,
    pub muls_per_px: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    SlicesQf,
    SlicesL2,
    Exact,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::SlicesQf, Method::SlicesL2, Method::Exact];

    pub fn tag(self) -> &'static str {
        match self {
            Method::SlicesQf => "slices-qf",
            Method::SlicesL2 => "slices-l2",
            Method::Exact => "exact",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.tag() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown method {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sigmas: Vec<f64>,
    pub ks: Vec<usize>,
    pub reps: usize,
    pub methods: Vec<Method>,
    /// Adds `+par` rows timed with the multi-threaded filter.
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sigmas: vec![2.0, 5.0, 10.0, 20.0, 40.0],
            ks: vec![3, 4, 5],
            reps: 5,
            methods: Method::ALL.to_vec(),
            parallel: false,
        }
    }
}

impl BenchConfig {
    fn check(&self) -> CliResult<()> {
        if self.reps < 3 {
            return Err(CliError::Usage(format!(
                "--reps must be at least 3, got {}",
                self.reps
            )));
        }
        if let Some(s) = self.sigmas.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(CliError::Usage(format!("sigma must be positive, got {s}")));
        }
        if let Some(k) = self.ks.iter().find(|k| !(1..=5).contains(*k)) {
            return Err(CliError::Usage(format!("k must be in 1..=5, got {k}")));
        }
        Ok(())
    }
}

/// Median wall time of `reps` runs in nanoseconds (at least 1), plus the
/// output of the last run.
pub fn time_median<T>(reps: usize, mut f: impl FnMut() -> CliResult<T>) -> CliResult<(u64, T)> {
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let out = f()?;
        times.push(start.elapsed().as_nanos() as u64);
        last = Some(out);
    }
    times.sort_unstable();
    Ok((
        times[times.len() / 2].max(1),
        last.expect("at least one run"),
    ))
}

/// All `.pgm` files in `dir`, sorted by name, keyed by file stem.
pub fn load_corpus(dir: &Path) -> CliResult<Vec<(String, Image)>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::File {
        path: dir.to_path_buf(),
        source: e.into(),
    })?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("pgm")))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Corpus(format!(
            "no .pgm images in {}",
            dir.display()
        )));
    }
    paths
        .iter()
        .map(|p| {
            let id = p
                .file_stem()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            Ok((id, read_image(p)?.0))
        })
        .collect()
}

type OpsKey = (Method, usize, u64, usize, usize);

/// Unscaled kernel for a slice method: published parameters for qf with
/// k in 3..=5, otherwise a fresh search.
fn base_kernel(method: Method, k: usize) -> CliResult<SliceKernel> {
    match (method, k) {
        (Method::SlicesQf, 3..=5) => {
            let (p, sigma0) = table_defaults(k)?;
            Ok(to_slices(&p, sigma0)?)
        }
        (Method::SlicesQf, _) => {
            Ok(optimize(k, ErrorModel::Qf, &OptimizeOptions::default())?.slice_kernel()?)
        }
        (Method::SlicesL2, _) => {
            Ok(optimize(k, ErrorModel::L2, &OptimizeOptions::default())?.slice_kernel()?)
        }
        (Method::Exact, _) => unreachable!("exact filtering has no slice kernel"),
    }
}

/// Runs the benchmark over preloaded images. Combinations whose kernel does
/// not fit the image are skipped with a note on stderr.
pub fn run_bench(images: &[(String, Image)], cfg: &BenchConfig) -> CliResult<Vec<BenchRecord>> {
    cfg.check()?;
    let slice_methods: Vec<Method> = cfg
        .methods
        .iter()
        .copied()
        .filter(|m| *m != Method::Exact)
        .collect();
    let mut bases = HashMap::new();
    for &m in &slice_methods {
        for &k in &cfg.ks {
            bases.insert((m, k), base_kernel(m, k)?);
        }
    }

    // (method, k, sigma bits, width, height) -> (adds, muls) per pixel
    let mut ops: HashMap<OpsKey, (f64, f64)> = HashMap::new();
    let mut rows = Vec::new();
    for (id, image) in images {
        let short = image.width().min(image.height());
        for &sigma in &cfg.sigmas {
            if gaussian_radius(sigma) >= short {
                eprintln!("skipping {id} at sigma {sigma}: reference kernel wider than the image");
                continue;
            }
            let (exact_ns, reference) =
                time_median(cfg.reps, || Ok(exact_gaussian_2d(image, sigma)?))?;
            if cfg.methods.contains(&Method::Exact) {
                let (adds, muls) = direct_op_rates(gaussian_radius(sigma));
                rows.push(BenchRecord {
                    method: Method::Exact.tag().into(),
                    k: 0,
                    sigma,
                    image_id: id.clone(),
                    wall_time_ns: exact_ns,
                    psnr_db: psnr(&reference, &reference)?,
                    adds_per_px: adds,
                    muls_per_px: muls,
                });
            }

            for &m in &slice_methods {
                for &k in &cfg.ks {
                    let kernel = match scale_to_sigma(&bases[&(m, k)], sigma) {
                        Ok(kernel) if kernel.max_radius() < short => kernel,
                        Ok(_) => {
                            eprintln!("skipping {id}: {m} k = {k} at sigma {sigma} is wider than the image");
                            continue;
                        }
                        Err(e) => {
                            eprintln!("skipping {m} k = {k} at sigma {sigma}: {e}");
                            continue;
                        }
                    };
                    let key = (m, k, sigma.to_bits(), image.width(), image.height());
                    let (adds, muls) = match ops.get(&key) {
                        Some(&r) => r,
                        None => {
                            let c = count_ops(image, &kernel)?;
                            let r = (c.adds_per_pixel(), c.muls_per_pixel());
                            ops.insert(key, r);
                            r
                        }
                    };
                    let mut variants = vec![(m.tag().to_string(), false)];
                    if cfg.parallel {
                        variants.push((format!("{}+par", m.tag()), true));
                    }
                    for (tag, par) in variants {
                        let (ns, out) = time_median(cfg.reps, || {
                            Ok(if par {
                                separable_filter_2d_par(image, &kernel)?
                            } else {
                                separable_filter_2d(image, &kernel)?
                            })
                        })?;
                        rows.push(BenchRecord {
                            method: tag,
                            k,
                            sigma,
                            image_id: id.clone(),
                            wall_time_ns: ns,
                            psnr_db: psnr(&reference, &out)?,
                            adds_per_px: adds,
                            muls_per_px: muls,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_csv(records: &[BenchRecord], out: impl Write) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv(input: impl std::io::Read) -> CliResult<Vec<BenchRecord>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

/// Loads the corpus, runs the benchmark and writes CSV to `csv_path`, or to
/// stdout when none is given.
pub fn cmd_bench(
    corpus: &Path,
    cfg: &BenchConfig,
    csv_path: Option<&Path>,
) -> CliResult<Vec<BenchRecord>> {
    cfg.check()?;
    let images = load_corpus(corpus)?;
    let rows = run_bench(&images, cfg)?;
    match csv_path {
        Some(p) => {
            let file = fs::File::create(p).map_err(|e| CliError::File {
                path: p.to_path_buf(),
                source: e.into(),
            })?;
            write_csv(&rows, std::io::BufWriter::new(file))?;
        }
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(rows)
}
