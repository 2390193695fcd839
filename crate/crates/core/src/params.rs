//! Kernel parameter files.
//!
//! A parameter file is TOML with these keys:
//!
//! ```toml
//! k = 3                          # number of slices
//! sigma0 = 31.830988618379067    # standard deviation the fit was made at
//! breakpoints = [23, 46, 75]     # p1 < ... < pk
//! constants = [0.0119, ...]      # one constant per interval
//! weights = [0.0050, ...]        # slice weights c(i) - c(i+1)
//! error_model = "qf"             # "qf" (autocorrelation) or "l2" (identity)
//! e2 = 1.5e-6                    # error achieved under that model
//! ```
//!
//! Constants may be on any positive scale; filtering renormalizes to unit DC
//! gain. On load, `weights` must agree with `constants`.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::approx::{to_slices, Partition, SliceKernel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorModel {
    /// Quadratic form weighted by the natural-image autocorrelation.
    Qf,
    /// Plain squared kernel error.
    L2,
}

impl ErrorModel {
    pub fn tag(self) -> &'static str {
        match self {
            ErrorModel::Qf => "qf",
            ErrorModel::L2 => "l2",
        }
    }
}

impl fmt::Display for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ErrorModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "qf" => Ok(ErrorModel::Qf),
            "l2" => Ok(ErrorModel::L2),
            _ => Err(Error::InvalidArgument(format!(
                "error model must be \"qf\" or \"l2\", got {s:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub k: usize,
    pub sigma0: f64,
    pub breakpoints: Vec<usize>,
    pub constants: Vec<f64>,
    pub weights: Vec<f64>,
    pub error_model: ErrorModel,
    pub e2: f64,
}

impl KernelParams {
    pub fn new(
        partition: &Partition,
        sigma0: f64,
        error_model: ErrorModel,
        e2: f64,
    ) -> Result<Self> {
        let slices = to_slices(partition, sigma0)?;
        Ok(Self {
            k: partition.k(),
            sigma0,
            breakpoints: partition.breakpoints().to_vec(),
            constants: partition.constants().to_vec(),
            weights: slices.slices().iter().map(|s| s.weight).collect(),
            error_model,
            e2,
        })
    }

    pub fn partition(&self) -> Result<Partition> {
        Partition::new(self.breakpoints.clone(), self.constants.clone())
    }

    /// Unnormalized slices at `sigma0`.
    pub fn slice_kernel(&self) -> Result<SliceKernel> {
        to_slices(&self.partition()?, self.sigma0)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Params(m));
        if self.k != self.breakpoints.len() || self.k != self.constants.len() {
            return bad(format!(
                "k = {} but {} breakpoints and {} constants",
                self.k,
                self.breakpoints.len(),
                self.constants.len()
            ));
        }
        if self.weights.len() != self.k {
            return bad(format!("k = {} but {} weights", self.k, self.weights.len()));
        }
        let kernel = self
            .slice_kernel()
            .map_err(|e| Error::Params(e.to_string()))?;
        let scale = self.constants.iter().fold(0.0f64, |a, c| a.max(c.abs()));
        for (i, (s, w)) in kernel.slices().iter().zip(&self.weights).enumerate() {
            if (s.weight - w).abs() > 1e-9 * scale.max(f64::MIN_POSITIVE) {
                return bad(format!(
                    "weight {i} is {w} but constants imply {}",
                    s.weight
                ));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("parameter struct always serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let p: Self = toml::from_str(text).map_err(|e| Error::Params(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_toml())?;
        Ok(())
    }
}
