//! The declarative experiment file.

use serde::{Deserialize, Serialize};

use crate::arith::log2;
use crate::error::{Error, Result};
use crate::resonator::{PrimeWindow, ResonatorSpec};
use crate::zeta::PrecisionPolicy;

/// What is being hunted or resonated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub n: u32,
    pub sigma: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub beta: f64,
    /// Shift; defaults to 1/(2 log log T).
    pub h: Option<f64>,
    pub sign: i8,
    /// Constant of the h floor for n = 0 on the critical line.
    pub c_floor: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection { n: 1, sigma: 0.5, big_t: 1e4, beta: 0.3, h: None, sign: 1, c_floor: 1.0 }
    }
}

impl RunSection {
    pub fn shift(&self) -> f64 {
        self.h.unwrap_or_else(|| 0.5 / log2(self.big_t))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// t step; defaults to min(1/log T, h/4).
    pub step: Option<f64>,
    pub chunk: usize,
    pub refine_top: usize,
    pub refine_factor: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { step: None, chunk: 4096, refine_top: 10, refine_factor: 8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrecisionSection {
    pub target: f64,
    pub guard_digits: u32,
}

impl Default for PrecisionSection {
    fn default() -> Self {
        PrecisionSection { target: 1e-8, guard_digits: 2 }
    }
}

impl PrecisionSection {
    pub fn policy(&self) -> PrecisionPolicy {
        PrecisionPolicy { target_abs_error: self.target, guard_digits: self.guard_digits, ..Default::default() }
    }
}

/// Resonator settings; T, beta and sigma come from [run].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResonatorSection {
    pub primes: Option<Vec<u64>>,
    /// (lower, upper]
    pub interval: Option<[f64; 2]>,
    pub support_cap: usize,
}

impl Default for ResonatorSection {
    fn default() -> Self {
        ResonatorSection { primes: None, interval: None, support_cap: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub run: RunSection,
    pub grid: GridSection,
    pub precision: PrecisionSection,
    pub resonator: ResonatorSection,
}

impl ExperimentConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn resonator_spec(&self) -> Result<ResonatorSpec> {
        let window_override = match (&self.resonator.primes, &self.resonator.interval) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig("set at most one of resonator.primes and resonator.interval".into()))
            }
            (Some(p), None) => Some(PrimeWindow::Primes(p.clone())),
            (None, Some([lower, upper])) => Some(PrimeWindow::Interval { lower: *lower, upper: *upper }),
            (None, None) => None,
        };
        Ok(ResonatorSpec {
            big_t: self.run.big_t,
            beta: self.run.beta,
            sigma: self.run.sigma,
            window_override,
            support_cap: self.resonator.support_cap,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_file_fills_defaults() {
        let c = ExperimentConfig::from_toml("[run]\nn = 2\nT = 5000.0\n[resonator]\nprimes = [7, 11]\n").unwrap();
        assert_eq!(c.run.n, 2);
        assert_eq!(c.run.big_t, 5000.0);
        assert_eq!(c.grid.chunk, 4096);
        assert_eq!(c.resonator.primes, Some(vec![7, 11]));
        let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml("[run]\nwidth = 3\n").is_err());
    }
}
