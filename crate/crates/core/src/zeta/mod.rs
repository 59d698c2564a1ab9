//! Evaluation of zeta, its logarithm along the Littlewood path, and an
//! independent zero counter built on the Hardy Z function.

mod eval;
mod path;
mod zeros;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eval::{zeta_eval, zeta_eval_bounded, zeta_pole_free, ZetaValue};
pub use path::{log_zeta_littlewood_path, track_horizontal, track_vertical, LogZetaTrack, TrackAxis};
pub use zeros::{
    count_zeros, hardy_z, rvm_main, theta, BlockCheck, SignBracket, ZeroOrdinateList, ZeroScanCertificate,
};

/// A point sigma + i t with 0 < sigma <= 3 and t >= 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalStripPoint {
    pub sigma: f64,
    pub t: f64,
}

impl CriticalStripPoint {
    pub fn new(sigma: f64, t: f64) -> Result<Self> {
        let p = CriticalStripPoint { sigma, t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0 && self.sigma <= 3.0) {
            return Err(Error::InvalidConfig(format!("sigma = {} outside (0, 3]", self.sigma)));
        }
        if !(self.t.is_finite() && self.t >= 0.0) {
            return Err(Error::InvalidConfig(format!("t = {} must be finite and >= 0", self.t)));
        }
        Ok(())
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.sigma, self.t)
    }
}

/// Accuracy contract passed explicitly to every evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    /// Absolute error every zeta evaluation must meet.
    pub target_abs_error: f64,
    /// Extra decimal digits requested from inner evaluations of composite quantities.
    pub guard_digits: u32,
    /// Upper bound on the Euler–Maclaurin head length.
    pub max_series_terms: usize,
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy { target_abs_error: 1e-10, guard_digits: 2, max_series_terms: 2_000_000 }
    }
}

impl PrecisionPolicy {
    pub fn with_target(target_abs_error: f64) -> Self {
        PrecisionPolicy { target_abs_error, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_error > 0.0 && self.target_abs_error.is_finite()) {
            return Err(Error::InvalidConfig(format!("target_abs_error = {} must be positive", self.target_abs_error)));
        }
        if self.max_series_terms == 0 {
            return Err(Error::InvalidConfig("max_series_terms must be > 0".into()));
        }
        Ok(())
    }

    /// Target handed to inner zeta evaluations of composite quantities.
    pub fn inner(&self) -> PrecisionPolicy {
        PrecisionPolicy { target_abs_error: self.target_abs_error * 10f64.powi(-(self.guard_digits as i32)), ..*self }
    }

    /// |zeta| below this counts as a zero on the path.
    pub fn zero_threshold(&self) -> f64 {
        10.0 * self.target_abs_error
    }
}

/// Branch-tracked log zeta: real part log|zeta|, imaginary part pi * S.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogZetaValue {
    pub log_modulus: f64,
    pub arg_over_pi: f64,
    /// The averaging convention at a zero was applied.
    pub at_zero: bool,
}

impl LogZetaValue {
    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.log_modulus, std::f64::consts::PI * self.arg_over_pi)
    }
}
