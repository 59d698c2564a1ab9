//! The resonator R(t) = sum_{m in M'} r(m) m^{-it}: prime window, weights f,
//! pruning, grid selection and Gaussian-weighted moments.

mod moment;

use std::f64::consts::E;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::lambda_sieve;
use crate::error::{Error, Result};
use crate::numeric::pairwise_sum_complex;

pub use moment::{
    error_sum_check, gaussian_moment, gaussian_pair_sum, one_sided_kernel, one_sided_moment, ErrorSumReport,
    MomentRequest, MomentValue, MomentWeight,
};

pub const RESONATOR_SCHEMA: &str = "resonator_v1";

/// Primes allowed in the support, replacing the default window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeWindow {
    /// Primes p with lower < p <= upper.
    Interval { lower: f64, upper: f64 },
    /// An explicit prime list.
    Primes(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonatorSpec {
    #[serde(rename = "T")]
    pub big_t: f64,
    pub beta: f64,
    pub sigma: f64,
    pub window_override: Option<PrimeWindow>,
    pub support_cap: usize,
}

impl ResonatorSpec {
    pub fn new(big_t: f64, beta: f64, sigma: f64) -> Self {
        ResonatorSpec { big_t, beta, sigma, window_override: None, support_cap: 1_000_000 }
    }

    /// (1 - beta)/2.
    pub fn kappa(&self) -> f64 {
        0.5 * (1.0 - self.beta)
    }

    /// floor(T^kappa).
    pub fn n_scale(&self) -> u64 {
        self.big_t.powf(self.kappa()).floor() as u64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.big_t > 1.0 && self.big_t.is_finite()) {
            return Err(Error::InvalidConfig(format!("T = {} must be finite and > 1", self.big_t)));
        }
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::InvalidConfig(format!("beta = {} outside [0, 1)", self.beta)));
        }
        let n = self.n_scale();
        let ln3 = (n as f64).ln().ln().ln();
        if !(ln3 > 0.0) {
            return Err(Error::ScaleTooSmall { n });
        }
        let upper = 0.5 + 1.0 / (n as f64).ln().ln();
        if !(self.sigma >= 0.5 && self.sigma <= upper) {
            return Err(Error::InvalidConfig(format!(
                "sigma = {} outside [1/2, 1/2 + 1/log log N] = [0.5, {upper:.4}]",
                self.sigma
            )));
        }
        if self.support_cap == 0 {
            return Err(Error::InvalidConfig("support_cap must be positive".into()));
        }
        Ok(())
    }
}

/// The iterated logarithms of N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleLogs {
    pub log_n: f64,
    pub log2_n: f64,
    pub log3_n: f64,
}

impl ScaleLogs {
    fn of(n: u64) -> Self {
        let log_n = (n as f64).ln();
        ScaleLogs { log_n, log2_n: log_n.ln(), log3_n: log_n.ln().ln() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub n_scale: u64,
    pub logs: ScaleLogs,
    /// The default window (lower, upper], whether or not it was used.
    pub default_window: (f64, f64),
    pub window_primes: Vec<u64>,
    /// floor((log log N)^{1/8}); 0 means no pruning.
    pub k_max: u32,
    pub alpha_k: Vec<f64>,
    /// |P_k| and |M_k| for k = 1..=k_max.
    pub p_k_sizes: Vec<usize>,
    pub m_k_sizes: Vec<usize>,
    pub support_size: usize,
    pub m_size: usize,
    pub m_prime_size: usize,
    /// sum over M of f(l)^2
    pub sum_f2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Resonator {
    pub schema: String,
    pub spec: ResonatorSpec,
    /// M', ascending
    pub support: Vec<u64>,
    pub coefficients: Vec<f64>,
    /// grid cell j of each m_j
    pub cells: Vec<i64>,
    /// M with f, ascending
    pub pruned_support: Vec<(u64, f64)>,
    pub provenance: Provenance,
}

/// (1 + 1/T)^j.
pub fn grid_point(big_t: f64, j: i64) -> f64 {
    (j as f64 * (1.0 / big_t).ln_1p()).exp()
}

/// The j with (1+1/T)^j <= n < (1+1/T)^{j+1}.
pub fn grid_cell(big_t: f64, n: u64) -> i64 {
    let x = n as f64;
    let mut j = (x.ln() / (1.0 / big_t).ln_1p()).floor() as i64;
    while grid_point(big_t, j) > x {
        j -= 1;
    }
    while grid_point(big_t, j + 1) <= x {
        j += 1;
    }
    j
}

fn window_primes(spec: &ResonatorSpec, logs: &ScaleLogs) -> Result<(Vec<u64>, (f64, f64))> {
    let base = logs.log_n * logs.log2_n;
    let default = (E * base, logs.log2_n.powf(0.125).exp() * base);
    let primes_in = |lower: f64, upper: f64| -> Result<Vec<u64>> {
        if !(upper > lower) || upper < 2.0 {
            return Ok(vec![]);
        }
        if upper > 1e9 {
            return Err(Error::InvalidConfig(format!("prime window upper end {upper} too large to sieve")));
        }
        let table = lambda_sieve((upper.floor() as u64).max(2))?;
        Ok(table.primes().filter(|&p| (p as f64) > lower && (p as f64) <= upper).collect())
    };
    let primes = match &spec.window_override {
        None => primes_in(default.0, default.1)?,
        Some(PrimeWindow::Interval { lower, upper }) => primes_in(*lower, *upper)?,
        Some(PrimeWindow::Primes(list)) => {
            let mut v = list.clone();
            v.sort_unstable();
            v.dedup();
            let top = v.last().copied().unwrap_or(2).max(2);
            let table = lambda_sieve(top)?;
            if let Some(&bad) = v.iter().find(|&&p| table.prime_power(p).map_or(true, |(_, k)| k != 1)) {
                return Err(Error::InvalidConfig(format!("{bad} in the window override is not prime")));
            }
            v
        }
    };
    if primes.is_empty() {
        let (lower, upper) = match &spec.window_override {
            Some(PrimeWindow::Interval { lower, upper }) => (*lower, *upper),
            _ => default,
        };
        return Err(Error::WindowEmpty { lower, upper });
    }
    Ok((primes, default))
}

/// Squarefree products of `primes` (with 1), ascending, as (n, prime index mask).
fn enumerate_support(primes: &[u64], cap: usize) -> Result<Vec<(u64, Vec<usize>)>> {
    let mut out: Vec<(u64, Vec<usize>)> = Vec::new();
    let mut stack: Vec<(u64, usize, Vec<usize>)> = vec![(1, 0, vec![])];
    while let Some((n, next, idx)) = stack.pop() {
        if out.len() >= cap {
            return Err(Error::SupportCapExceeded { cap });
        }
        for (i, &p) in primes.iter().enumerate().skip(next).rev() {
            let m = n.checked_mul(p).ok_or_else(|| {
                Error::InvalidConfig("support element overflows 64-bit integers; narrow the window".into())
            })?;
            let mut j = idx.clone();
            j.push(i);
            stack.push((m, i + 1, j));
        }
        out.push((n, idx));
    }
    out.sort_by_key(|x| x.0);
    Ok(out)
}

pub fn build_resonator(spec: &ResonatorSpec) -> Result<Resonator> {
    spec.validate()?;
    let n_scale = spec.n_scale();
    let logs = ScaleLogs::of(n_scale);
    let sigma = spec.sigma;
    let (primes, default_window) = window_primes(spec, &logs)?;

    let c = logs.log_n.powf(1.0 - sigma) * logs.log2_n.powf(sigma) / logs.log3_n.powf(1.0 - sigma);
    let mut f_p = Vec::with_capacity(primes.len());
    for &p in &primes {
        let lp = (p as f64).ln();
        let denom = lp - logs.log2_n - logs.log3_n;
        if !(denom > 0.0) {
            return Err(Error::NonpositiveWeight { prime: p });
        }
        f_p.push(c / ((p as f64).powf(sigma) * denom));
    }

    let k_max = logs.log2_n.powf(0.125).floor().max(0.0) as u32;
    let base = logs.log_n * logs.log2_n;
    let mut alpha_k = Vec::new();
    let mut p_k: Vec<Vec<bool>> = Vec::new();
    for k in 1..=k_max {
        let kf = k as f64;
        alpha_k.push(3.0 * logs.log_n.powf(2.0 - 2.0 * sigma) / (kf * kf * logs.log3_n.powf(2.0 - 2.0 * sigma)));
        let (lo, hi) = (kf.exp() * base, (kf + 1.0).exp() * base);
        p_k.push(primes.iter().map(|&p| (p as f64) > lo && (p as f64) <= hi).collect());
    }

    let support = enumerate_support(&primes, spec.support_cap)?;
    let mut m_k_sizes = vec![0usize; k_max as usize];
    let mut kept: Vec<(u64, f64)> = Vec::new();
    for (n, idx) in &support {
        let mut removed = false;
        for k in 0..k_max as usize {
            let count = idx.iter().filter(|&&i| p_k[k][i]).count() as f64;
            if count >= alpha_k[k] {
                m_k_sizes[k] += 1;
                removed = true;
            }
        }
        if !removed {
            let f: f64 = idx.iter().map(|&i| f_p[i]).product();
            kept.push((*n, f));
        }
    }

    // grid minima; kept is ascending so the first element of a cell is its minimum
    let cells_of: Vec<i64> = kept.iter().map(|&(n, _)| grid_cell(spec.big_t, n)).collect();
    let mut sup = Vec::new();
    let mut cells = Vec::new();
    for (i, &(n, _)) in kept.iter().enumerate() {
        if cells.last() != Some(&cells_of[i]) {
            sup.push(n);
            cells.push(cells_of[i]);
        }
    }
    let mut coefficients = Vec::with_capacity(sup.len());
    for &j in &cells {
        let lo = grid_point(spec.big_t, j - 1);
        let hi = grid_point(spec.big_t, j + 2);
        let start = kept.partition_point(|&(n, _)| (n as f64) < lo);
        let mut acc = 0.0;
        for &(n, f) in &kept[start..] {
            if n as f64 > hi {
                break;
            }
            acc += f * f;
        }
        coefficients.push(acc.sqrt());
    }
    let sum_f2 = kept.iter().map(|&(_, f)| f * f).sum();
    let provenance = Provenance {
        n_scale,
        logs,
        default_window,
        window_primes: primes.clone(),
        k_max,
        alpha_k,
        p_k_sizes: p_k.iter().map(|v| v.iter().filter(|&&b| b).count()).collect(),
        m_k_sizes,
        support_size: support.len(),
        m_size: kept.len(),
        m_prime_size: sup.len(),
        sum_f2,
    };
    Ok(Resonator {
        schema: RESONATOR_SCHEMA.into(),
        spec: spec.clone(),
        support: sup,
        coefficients,
        cells,
        pruned_support: kept,
        provenance,
    })
}

impl Resonator {
    /// R(t) = sum r(m) m^{-it}.
    pub fn evaluate(&self, t: f64) -> Complex64 {
        let parts: Vec<Complex64> = self
            .support
            .iter()
            .zip(&self.coefficients)
            .map(|(&m, &r)| r * Complex64::from_polar(1.0, -t * (m as f64).ln()))
            .collect();
        pairwise_sum_complex(&parts)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Resonator = serde_json::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if r.schema != RESONATOR_SCHEMA {
            return Err(Error::InvalidConfig(format!("unknown resonator schema {}", r.schema)));
        }
        Ok(r)
    }
}

/// R(t) for a built resonator.
pub fn evaluate_r(res: &Resonator, t: f64) -> Complex64 {
    res.evaluate(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(primes: &[u64]) -> ResonatorSpec {
        ResonatorSpec {
            window_override: Some(PrimeWindow::Primes(primes.to_vec())),
            ..ResonatorSpec::new(300.0, 0.0, 1.0)
        }
    }

    #[test]
    fn two_prime_window() {
        let r = build_resonator(&toy(&[101, 103])).unwrap();
        let all: Vec<u64> = r.pruned_support.iter().map(|x| x.0).collect();
        assert_eq!(all, vec![1, 101, 103, 10403]);
        assert_eq!(r.provenance.support_size, 4);
        // 101 and 103 share no grid cell at T = 300
        assert_eq!(r.support, vec![1, 101, 103, 10403]);
        assert!(r.coefficients.iter().all(|&c| c > 0.0));
    }

    #[test]
    fn empty_default_window() {
        let spec = ResonatorSpec::new(1e4, 0.3, 0.5);
        assert!(matches!(build_resonator(&spec), Err(Error::WindowEmpty { .. })));
    }

    #[test]
    fn grid_cells_bracket() {
        for n in [1u64, 2, 17, 1000, 123_457] {
            let j = grid_cell(300.0, n);
            assert!(grid_point(300.0, j) <= n as f64 && (n as f64) < grid_point(300.0, j + 1));
        }
    }

    #[test]
    fn two_element_modulus() {
        let r = build_resonator(&toy(&[101])).unwrap();
        let (r1, r2) = (r.coefficients[0], r.coefficients[1]);
        let t = 3.7;
        let want = r1 * r1 + r2 * r2 + 2.0 * r1 * r2 * (t * (101f64).ln()).cos();
        assert!((r.evaluate(t).norm_sqr() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn json_round_trip() {
        let r = build_resonator(&toy(&[101, 103, 107])).unwrap();
        let back = Resonator::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
