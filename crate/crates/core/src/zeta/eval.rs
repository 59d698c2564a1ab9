//! Euler–Maclaurin summation for zeta(s).
//!
//! zeta(s) = sum_{k<N} k^{-s} + N^{1-s}/(s-1) + N^{-s}/2 + sum_{j<=M} T_j(s) + R,
//! T_j(s) = B_{2j}/(2j)! * N^{1-s-2j} * prod_{i=0}^{2j-2} (s+i),
//! |R| <= |s+2M+1| / (sigma+2M+1) * |T_{M+1}(s)|   (Backlund, sigma > -(2M+1)).

use std::sync::OnceLock;

use num_complex::Complex64;

use super::PrecisionPolicy;
use crate::error::{Error, Result};
use crate::numeric::special::{bernoulli_over_factorial, BERNOULLI_TERMS};

const LN_TABLE_LEN: usize = 1 << 16;

fn ln_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (0..LN_TABLE_LEN).map(|k| if k == 0 { 0.0 } else { (k as f64).ln() }).collect())
}

#[inline]
fn ln_k(k: usize) -> f64 {
    if k < LN_TABLE_LEN {
        ln_table()[k]
    } else {
        (k as f64).ln()
    }
}

/// zeta(s) with a certified truncation bound and a rounding estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaValue {
    pub value: Complex64,
    pub truncation_bound: f64,
    pub rounding_estimate: f64,
    pub head_terms: usize,
    pub correction_terms: usize,
}

impl ZetaValue {
    pub fn error_bound(&self) -> f64 {
        self.truncation_bound + self.rounding_estimate
    }
}

/// zeta(s) to within `policy.target_abs_error`.
pub fn zeta_eval(s: Complex64, policy: &PrecisionPolicy) -> Result<Complex64> {
    zeta_eval_bounded(s, policy).map(|z| z.value)
}

/// Picks the head length N and the number M of correction terms.
fn choose_parameters(s: Complex64, budget: f64, max_terms: usize) -> Option<(usize, usize, f64)> {
    let b = bernoulli_over_factorial();
    let sigma = s.re;
    let mut n = ((s.im.abs() / (2.0 * std::f64::consts::PI)).ceil() as usize).max(2);
    loop {
        if n > max_terms {
            return None;
        }
        let nf = n as f64;
        let ln_n = nf.ln();
        // |prod_{i=0}^{2j-2} (s+i)| accumulated incrementally, in log form.
        let mut ln_prod = s.norm().ln();
        for j in 1..BERNOULLI_TERMS {
            // magnitude of T_{j+1}
            let ln_prod_next = ln_prod + (s + (2 * j - 1) as f64).norm().ln() + (s + (2 * j) as f64).norm().ln();
            let jn = j + 1;
            let ln_term = b[jn - 1].abs().ln() + (1.0 - sigma - 2.0 * jn as f64) * ln_n + ln_prod_next;
            let m = j;
            let denom = sigma + 2.0 * m as f64 + 1.0;
            if denom > 0.0 {
                let factor = (s + (2 * m + 1) as f64).norm() / denom;
                let bound = factor * ln_term.exp();
                if bound <= budget {
                    return Some((n, m, bound));
                }
            }
            ln_prod = ln_prod_next;
            // terms have started growing past usefulness
            if m > 8 && ln_term > 0.0 {
                break;
            }
        }
        n = (n as f64 * 1.15).ceil() as usize + 1;
    }
}

/// zeta(s) together with its error accounting.
///
/// Fails with `PrecisionUnreachable` when either the truncation bound or the
/// rounding estimate cannot be brought under half of the target.
pub fn zeta_eval_bounded(s: Complex64, policy: &PrecisionPolicy) -> Result<ZetaValue> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::PoleAtOne);
    }
    euler_maclaurin(s, policy, false)
}

/// (s - 1) zeta(s), which is entire; the target applies to the product.
///
/// Near s = 1 this keeps log|zeta| accurate where zeta itself is too large
/// for an absolute error target.
pub fn zeta_pole_free(s: Complex64, policy: &PrecisionPolicy) -> Result<Complex64> {
    euler_maclaurin(s, policy, true).map(|z| z.value)
}

fn euler_maclaurin(s: Complex64, policy: &PrecisionPolicy, pole_free: bool) -> Result<ZetaValue> {
    policy.validate()?;
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::InvalidConfig(format!("non-finite argument {s}")));
    }
    let target = policy.target_abs_error;
    let scale = if pole_free { (s - 1.0).norm().max(f64::MIN_POSITIVE) } else { 1.0 };
    let (n, m, truncation_bound) =
        choose_parameters(s, 0.5 * target / scale, policy.max_series_terms).ok_or_else(|| {
            Error::PrecisionUnreachable(format!(
                "Euler-Maclaurin needs more than {} head terms at s = {s}",
                policy.max_series_terms
            ))
        })?;

    let sigma = s.re;
    let t = s.im;
    let mut head = Complex64::new(0.0, 0.0);
    let mut rounding_sq = 0.0;
    // accumulate in blocks for a pairwise-like error profile at low cost
    let mut block = Complex64::new(0.0, 0.0);
    for k in 1..n {
        let lk = ln_k(k);
        let mag = (-sigma * lk).exp();
        let phase = t * lk;
        let (sn, cs) = phase.sin_cos();
        block += Complex64::new(mag * cs, -mag * sn);
        let unit = mag * (2.0 + phase.abs());
        rounding_sq += unit * unit;
        if k % 64 == 0 {
            head += block;
            block = Complex64::new(0.0, 0.0);
        }
    }
    head += block;

    let nf = n as f64;
    let ln_n = nf.ln();
    let n_pow = (-s * ln_n).exp(); // N^{-s}

    let b = bernoulli_over_factorial();
    // T_1 = b_1 s N^{-1-s}; T_{j+1} = T_j (s+2j-1)(s+2j) / N^2 * b_{j+1}/b_j
    let inv_n2 = 1.0 / (nf * nf);
    let mut term = s * n_pow / nf * b[0];
    let mut corr = term;
    for j in 1..m {
        term *= (s + (2 * j - 1) as f64) * (s + (2 * j) as f64) * (inv_n2 * b[j] / b[j - 1]);
        corr += term;
    }

    let regular = head + 0.5 * n_pow + corr;
    let eps = f64::EPSILON;
    let (value, rounding_estimate) = if pole_free {
        let polar = n_pow * nf;
        let v = (s - 1.0) * regular + polar;
        let r = eps * (scale * (rounding_sq.sqrt() + 8.0 * regular.norm() + 4.0 * corr.norm()) + 4.0 * polar.norm());
        (v, r)
    } else {
        let v = regular + n_pow * nf / (s - 1.0);
        (v, eps * (rounding_sq.sqrt() + 8.0 * v.norm() + 4.0 * corr.norm()))
    };
    if !(value.re.is_finite() && value.im.is_finite()) || !(rounding_estimate <= 0.5 * target) {
        return Err(Error::PrecisionUnreachable(format!(
            "rounding estimate {rounding_estimate:e} exceeds half of target {target:e} at s = {s}"
        )));
    }
    Ok(ZetaValue {
        value,
        truncation_bound: truncation_bound * scale,
        rounding_estimate,
        head_terms: n,
        correction_terms: m,
    })
}
