//! The resonated-moment chain: kernel sums integrated against |R|^2 Phi(t/T).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::hunt::theoretical_scale;
use crate::arith::{check_sign, dirichlet_sum, i_pow, lambda_sieve, DirichletKind, KernelParams, SignContext};
use crate::error::{Error, Result};
use crate::iterates::IterateOrder;
use crate::numeric::{gauss_legendre, pairwise_sum_complex};
use crate::resonator::{build_resonator, gaussian_pair_sum, one_sided_moment, Resonator};

/// One Dirichlet term and its resonated integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineTerm {
    pub m: u64,
    /// Lambda(m) w_m sin(h log m) / ((log m)^{n+1} m^sigma)
    pub coefficient: f64,
    /// int_0^inf m^{-it} |R|^2 Phi(t/T) dt
    pub one_sided: Complex64,
    /// int over the real line
    pub full_line: f64,
    /// int_0^{T^beta}, by quadrature
    pub head: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub n: u32,
    pub sigma: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub beta: f64,
    pub h: f64,
    pub kernel: KernelParams,
    pub resonator_size: usize,
    pub r0: f64,
    pub sum_f2: f64,
    pub terms_a: Vec<PipelineTerm>,
    pub terms_b: Vec<PipelineTerm>,
    /// 3 delta Im{i^{n+3} sum_a c_m I_m}
    pub a_part: f64,
    /// delta' Im{i^{n+2} sum_b c_m I_m}
    pub b_part: f64,
    /// b part for odd n, a part for even n
    pub main_term: f64,
    /// the other part, measured
    pub error_sum: f64,
    /// h T (log T)^{2 gamma (1 - sigma)} / (log log T)^{n-1} sum f^2
    pub error_sum_budget: f64,
    /// signed contribution of int_0^{T^beta}
    pub completion_head: f64,
    /// bound on the contribution of int_{T log T}^inf
    pub completion_tail_bound: f64,
    /// h T log log T sum f^2
    pub convolution_error_scale: f64,
    /// max |Re I_m - full_m / 2| / |full_m|
    pub symmetry_gap: f64,
    /// T log log T sum f^2
    pub normaliser: f64,
    /// (main + error - head - tail bound) / normaliser
    pub lower_bound: f64,
    pub theoretical_scale: f64,
    pub ratio_to_scale: f64,
    pub main_dominates: bool,
}

/// (gamma, delta, delta') for the parity of n.
pub fn pipeline_kernel(n: u32, sign: i8, big_t: f64) -> Result<KernelParams> {
    let order = IterateOrder::new(n)?;
    check_sign(order, sign, SignContext::VariationThm)?;
    if n % 2 == 1 {
        let dp = if n.div_ceil(2) % 2 == 0 { 1 } else { -1 };
        KernelParams::new(0.125, sign, dp, big_t)
    } else {
        KernelParams::new(2.0 / 3.0, sign, 0, big_t)
    }
}

/// int_0^x m^{-it} |R(t)|^2 Phi(t/T) dt by composite Gauss-Legendre.
fn head_integral(res: &Resonator, lambda: f64, x: f64, big_t: f64) -> Complex64 {
    let top = res.support.last().map_or(1.0, |&m| m as f64).ln() + lambda;
    let width = (0.5 / top.max(1.0)).min(x.max(1e-300));
    let panels = (x / width).ceil().max(1.0) as usize;
    let step = x / panels as f64;
    let rule = gauss_legendre(16);
    let mut parts = Vec::with_capacity(panels);
    for i in 0..panels {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t, w) in rule.mapped(i as f64 * step, (i + 1) as f64 * step) {
            let phi = (-0.5 * (t / big_t).powi(2)).exp();
            acc += w * res.evaluate(t).norm_sqr() * phi * Complex64::from_polar(1.0, -t * lambda);
        }
        parts.push(acc);
    }
    pairwise_sum_complex(&parts)
}

pub fn run_pipeline(cfg: &ExperimentConfig) -> Result<PipelineReport> {
    let r = &cfg.run;
    let (n, sigma, big_t, h) = (r.n, r.sigma, r.big_t, r.shift());
    let kp = pipeline_kernel(n, r.sign, big_t)?;
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::InvalidConfig(format!("h = {h} outside [0, 1]")));
    }
    let res = build_resonator(&cfg.resonator_spec()?)?;
    let order = IterateOrder::new(n)?;
    let table = lambda_sieve((kp.log2t + 2.0 * kp.alpha).exp().floor().max(2.0) as u64)?;
    let head_end = big_t.powf(r.beta);
    let terms = |kind: DirichletKind| -> Result<Vec<PipelineTerm>> {
        let sum = dirichlet_sum(kind, &kp, sigma, 0.0, h, order, &table)?;
        Ok(sum
            .terms
            .iter()
            .filter(|t| t.1 != 0.0)
            .map(|&(m, c)| {
                let lambda = (m as f64).ln();
                PipelineTerm {
                    m,
                    coefficient: c,
                    one_sided: one_sided_moment(&res, lambda, big_t),
                    full_line: gaussian_pair_sum(&res, lambda, big_t),
                    head: head_integral(&res, lambda, head_end, big_t),
                }
            })
            .collect())
    };
    let terms_a = terms(DirichletKind::A)?;
    let terms_b = if kp.delta_prime == 0 { vec![] } else { terms(DirichletKind::B)? };
    let combine = |ts: &[PipelineTerm], f: &dyn Fn(&PipelineTerm) -> Complex64| -> Complex64 {
        pairwise_sum_complex(&ts.iter().map(|t| t.coefficient * f(t)).collect::<Vec<_>>())
    };
    let project_a = |z: Complex64| (3.0 * kp.delta as f64 * i_pow(n + 3) * z).im;
    let project_b = |z: Complex64| (kp.delta_prime as f64 * i_pow(n + 2) * z).im;
    let a_part = project_a(combine(&terms_a, &|t| t.one_sided));
    let b_part = project_b(combine(&terms_b, &|t| t.one_sided));
    let head = project_a(combine(&terms_a, &|t| t.head)) + project_b(combine(&terms_b, &|t| t.head));

    let r0 = res.evaluate(0.0).re;
    let sum_f2 = res.provenance.sum_f2;
    // |int_X^inf| <= R(0)^2 int_X^inf Phi(t/T) dt, erfc(y) <= e^{-y^2}/(y sqrt pi)
    let y = big_t.ln() / 2f64.sqrt();
    let phi_tail = big_t * (0.5 * PI).sqrt() * (-y * y).exp() / (y * PI.sqrt());
    let coef_mass: f64 = terms_a.iter().map(|t| 3.0 * t.coefficient.abs()).sum::<f64>()
        + terms_b.iter().map(|t| t.coefficient.abs()).sum::<f64>();
    let completion_tail_bound = coef_mass * r0 * r0 * phi_tail;
    let symmetry_gap = terms_a
        .iter()
        .chain(&terms_b)
        .map(|t| (t.one_sided.re - 0.5 * t.full_line).abs() / t.full_line.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let (main_term, error_sum) = if n % 2 == 1 { (b_part, a_part) } else { (a_part, b_part) };
    let log2t = kp.log2t;
    let normaliser = big_t * log2t * sum_f2;
    let lower_bound = (main_term + error_sum - head - completion_tail_bound) / normaliser;
    let scale = if h > 0.0 { theoretical_scale(n, h, big_t) } else { 0.0 };
    let error_mag = error_sum.abs() + head.abs() + completion_tail_bound;
    Ok(PipelineReport {
        n,
        sigma,
        big_t,
        beta: r.beta,
        h,
        kernel: kp,
        resonator_size: res.support.len(),
        r0,
        sum_f2,
        terms_a,
        terms_b,
        a_part,
        b_part,
        main_term,
        error_sum,
        error_sum_budget: h * big_t * big_t.ln().powf(2.0 * kp.gamma * (1.0 - sigma)) / log2t.powi(n as i32 - 1)
            * sum_f2,
        completion_head: head,
        completion_tail_bound,
        convolution_error_scale: h * normaliser,
        symmetry_gap,
        normaliser,
        lower_bound,
        theoretical_scale: scale,
        ratio_to_scale: if scale > 0.0 { lower_bound / scale } else { 0.0 },
        main_dominates: main_term > error_mag,
    })
}
