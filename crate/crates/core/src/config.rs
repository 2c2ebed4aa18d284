use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Ranks over Q(i); irrational spectral points fall back to floats.
    Exact,
    /// Ranks in `Complex<f64>` everywhere, cross-checked against exact multiplicities.
    Float,
}

/// Numeric knobs shared by every operation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Relative pivot threshold for floating-point rank decisions.
    pub tol_rank: f64,
    /// Absolute tolerance for root location and wall tests.
    pub tol_root: f64,
    pub mode: Mode,
    pub parallelism: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { tol_rank: 1e-9, tol_root: 1e-8, mode: Mode::Exact, parallelism: 1 }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.tol_rank > 0.0 && self.tol_rank.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol_rank must be positive, got {}", self.tol_rank)));
        }
        if !(self.tol_root > 0.0 && self.tol_root.is_finite()) {
            return Err(Error::InvalidConfig(format!("tol_root must be positive, got {}", self.tol_root)));
        }
        if self.parallelism == 0 {
            return Err(Error::InvalidConfig("parallelism must be at least 1".into()));
        }
        Ok(())
    }
}
