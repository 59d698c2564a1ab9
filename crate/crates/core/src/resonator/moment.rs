//! Gaussian-weighted moments of |R|^2 through exact pair transforms.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Resonator;
use crate::arith::{dirichlet_sum, lambda_sieve, DirichletKind, KernelParams};
use crate::error::{Error, Result};
use crate::iterates::IterateOrder;
use crate::numeric::{dawson, pairwise_sum, pairwise_sum_complex};

/// e^{-x^2/2} < 1e-320 beyond this many Gaussian widths.
const GAUSS_CUT: f64 = 38.5;

/// The weight G multiplying |R|^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentWeight {
    /// G = 1.
    Unit,
    /// G(t) = sum Lambda(n) c_n / (log n n^{sigma+it}) over prime powers n.
    Dirichlet {
        coefficients: Vec<(u64, f64)>,
        /// Bound on sum Lambda(n) c_n / (log n n^sigma) beyond the listed terms.
        tail_bound: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentRequest {
    #[serde(rename = "T")]
    pub big_t: f64,
    pub sigma: f64,
    pub weight: MomentWeight,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    pub value: f64,
    /// tail_bound times the G = 1 moment; zero for finite weights
    pub tail_error: f64,
}

fn logs(res: &Resonator) -> Vec<f64> {
    res.support.iter().map(|&m| (m as f64).ln()).collect()
}

/// sum_{j,k} r_j r_k T sqrt(2 pi) exp(-T^2 (log m_k - log m_j - lambda)^2 / 2).
pub fn gaussian_pair_sum(res: &Resonator, lambda: f64, big_t: f64) -> f64 {
    let l = logs(res);
    let r = &res.coefficients;
    let reach = GAUSS_CUT / big_t;
    let rows: Vec<f64> = (0..l.len())
        .into_par_iter()
        .map(|j| {
            let centre = l[j] + lambda;
            let start = l.partition_point(|&x| x < centre - reach);
            let mut acc = Vec::new();
            for k in start..l.len() {
                let x = l[k] - centre;
                if x > reach {
                    break;
                }
                acc.push(r[k] * (-0.5 * (big_t * x).powi(2)).exp());
            }
            r[j] * pairwise_sum(&acc)
        })
        .collect();
    big_t * (2.0 * PI).sqrt() * pairwise_sum(&rows)
}

/// int_0^inf e^{itx} e^{-t^2/(2T^2)} dt = T sqrt(pi/2) e^{-x^2 T^2/2} + i T sqrt 2 D(x T / sqrt 2).
pub fn one_sided_kernel(x: f64, big_t: f64) -> Complex64 {
    let y = x * big_t;
    Complex64::new(big_t * (0.5 * PI).sqrt() * (-0.5 * y * y).exp(), big_t * 2f64.sqrt() * dawson(y / 2f64.sqrt()))
}

/// int_0^inf m^{-it} |R(t)|^2 Phi(t/T) dt, with log m = `lambda`.
pub fn one_sided_moment(res: &Resonator, lambda: f64, big_t: f64) -> Complex64 {
    let l = logs(res);
    let r = &res.coefficients;
    let rows: Vec<Complex64> = (0..l.len())
        .into_par_iter()
        .map(|j| {
            let acc: Vec<Complex64> =
                (0..l.len()).map(|k| r[k] * one_sided_kernel(l[k] - l[j] - lambda, big_t)).collect();
            r[j] * pairwise_sum_complex(&acc)
        })
        .collect();
    pairwise_sum_complex(&rows)
}

/// int G(t) |R(t)|^2 Phi(t/T) dt over the real line.
pub fn gaussian_moment(res: &Resonator, req: &MomentRequest) -> Result<MomentValue> {
    if !(req.big_t > 0.0 && req.big_t.is_finite()) {
        return Err(Error::InvalidConfig(format!("T = {} must be positive", req.big_t)));
    }
    match &req.weight {
        MomentWeight::Unit => Ok(MomentValue { value: gaussian_pair_sum(res, 0.0, req.big_t), tail_error: 0.0 }),
        MomentWeight::Dirichlet { coefficients, tail_bound } => {
            if !(tail_bound.is_finite() && *tail_bound >= 0.0) {
                return Err(Error::TailNotCertified(format!(
                    "tail bound {tail_bound} is not a finite non-negative number"
                )));
            }
            let top = coefficients.iter().map(|c| c.0).max().unwrap_or(2).max(2);
            let table = lambda_sieve(top)?;
            let mut parts = Vec::with_capacity(coefficients.len());
            for &(n, c) in coefficients {
                if !(c >= 0.0 && c.is_finite()) {
                    return Err(Error::InvalidConfig(format!("c_{n} = {c} must be finite and >= 0")));
                }
                let lam = table.lambda(n);
                if lam == 0.0 {
                    return Err(Error::InvalidConfig(format!("{n} is not a prime power")));
                }
                let ln = (n as f64).ln();
                let a = lam * c / ln * (-req.sigma * ln).exp();
                parts.push(a * gaussian_pair_sum(res, ln, req.big_t));
            }
            let tail_error = tail_bound * gaussian_pair_sum(res, 0.0, req.big_t);
            Ok(MomentValue { value: pairwise_sum(&parts), tail_error })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSumReport {
    pub n: u32,
    pub sigma: f64,
    pub h: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub gamma: f64,
    /// sum over the tent support of c_m int_0^inf m^{-it} |R|^2 Phi dt
    pub lhs_value: Complex64,
    pub lhs: f64,
    /// h T (log T)^{2 gamma (1 - sigma)} / (log log T)^{n-1} sum_M f^2
    pub rhs: f64,
    pub ratio: f64,
    pub terms: usize,
}

/// The tent-weighted error sum with H = 0 against its unit-constant bound.
pub fn error_sum_check(
    res: &Resonator,
    kp: &KernelParams,
    n: IterateOrder,
    sigma: f64,
    h: f64,
    big_t: f64,
) -> Result<ErrorSumReport> {
    kp.validate()?;
    let needed = (2.0 * kp.alpha).exp().floor().max(2.0) as u64;
    let table = lambda_sieve(needed)?;
    let sum = dirichlet_sum(DirichletKind::A, kp, sigma, 0.0, h, n, &table)?;
    let parts: Vec<Complex64> =
        sum.terms.iter().map(|&(m, c)| c * one_sided_moment(res, (m as f64).ln(), big_t)).collect();
    let lhs_value = pairwise_sum_complex(&parts);
    let lhs = lhs_value.norm();
    let rhs = h * big_t * big_t.ln().powf(2.0 * kp.gamma * (1.0 - sigma)) / kp.log2t.powi(n.get() as i32 - 1)
        * res.provenance.sum_f2;
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(ErrorSumReport {
        n: n.get(),
        sigma,
        h,
        big_t,
        gamma: kp.gamma,
        lhs_value,
        lhs,
        rhs,
        ratio,
        terms: sum.terms.len(),
    })
}
