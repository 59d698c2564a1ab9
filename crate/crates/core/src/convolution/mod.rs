//! Two-sided evaluation of the convolution identities: a kernel integral of
//! shift differences on one side, a finite weighted Dirichlet sum on the other.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{combined_kernel, dirichlet_sum, i_pow, lambda_sieve, tent_sum, DirichletKind, KernelParams};
use crate::error::{Error, Result};
use crate::iterates::{
    iterate_state, ArgumentSource, CriticalLineArgument, IterateOrder, IterateState, TrackedArgument,
};
use crate::numeric::gauss_legendre;
use crate::numeric::quad::panel_edges;
use crate::zeta::{count_zeros, track_vertical, PrecisionPolicy};

const ORDER: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// Kernel integral of Delta_h log zeta against (sin alpha u / u)^2 e^{iHu}.
    Lemma22,
    /// Kernel integral of Delta_h S_n against the combined kernel.
    Prop24,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionReport {
    pub identity: Identity,
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: Complex64,
    pub quad_error: f64,
    pub paper_error_budget: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub t: f64,
    pub h: f64,
    pub sigma: f64,
    pub n: Option<u32>,
    pub alpha: f64,
    #[serde(rename = "H")]
    pub h_shift: f64,
    pub kernel: Option<KernelParams>,
    /// Half-width (log T)^3 of the u-range.
    pub u_range: f64,
    pub panels: usize,
    /// Dirichlet terms on the right-hand side.
    pub rhs_terms: usize,
}

impl ConvolutionReport {
    /// |residual| <= quad_error + budget with unit constant.
    pub fn within_budget(&self) -> bool {
        self.residual.norm() <= self.quad_error + self.paper_error_budget
    }
}

/// Composite Gauss–Legendre over `panels`, nodes visited in ascending order.
fn composite<F>(panels: &[(f64, f64)], mut f: F) -> Result<Complex64>
where
    F: FnMut(f64) -> Result<Complex64>,
{
    let rule = gauss_legendre(ORDER);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(a, b) in panels {
        let mut part = Complex64::new(0.0, 0.0);
        for (x, w) in rule.mapped(a, b) {
            part += w * f(x)?;
        }
        acc += part;
    }
    Ok(acc)
}

fn halve(panels: &[(f64, f64)]) -> Vec<(f64, f64)> {
    panels
        .iter()
        .flat_map(|&(a, b)| {
            let m = 0.5 * (a + b);
            [(a, m), (m, b)]
        })
        .collect()
}

fn check_common(sigma_ok: bool, sigma: f64, t: f64, h: f64, big_t: f64) -> Result<f64> {
    if !sigma_ok {
        return Err(Error::InvalidConfig(format!("sigma = {sigma} outside the identity's range")));
    }
    if !(0.0..=1.0).contains(&h) {
        return Err(Error::InvalidConfig(format!("h = {h} outside [0, 1]")));
    }
    if !(big_t > std::f64::consts::E.powf(std::f64::consts::E)) {
        return Err(Error::InvalidConfig(format!("T = {big_t} too small")));
    }
    let range = big_t.ln().powi(3);
    if t > big_t * big_t.ln() {
        return Err(Error::InvalidConfig(format!("t = {t} exceeds T log T")));
    }
    if !(t - range - h > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "t = {t} must exceed (log T)^3 + h = {} so the window stays above the real axis",
            range + h
        )));
    }
    Ok(range)
}

/// The convolution identity for log zeta at one point.
pub fn lemma22_eval(
    sigma: f64,
    t: f64,
    h: f64,
    alpha: f64,
    h_shift: f64,
    big_t: f64,
    policy: &PrecisionPolicy,
) -> Result<ConvolutionReport> {
    let range = check_common(sigma > 0.5 && sigma <= 2.0, sigma, t, h, big_t)?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidConfig(format!("alpha = {alpha} must be positive")));
    }
    let width = (0.5 * PI / (alpha + h_shift.abs())).min(0.5 * PI);
    let panels = panel_edges(&[-range, range], width);
    let inner = policy.inner();
    let track = if h > 0.0 { Some(track_vertical(sigma, &[t - range - h, t + range + h], &inner)?) } else { None };
    let mut min_zeta = f64::INFINITY;
    let mut integrand = |u: f64| -> Result<Complex64> {
        let Some(tr) = &track else { return Ok(Complex64::new(0.0, 0.0)) };
        let up = tr.eval(t + u + h)?;
        let down = tr.eval(t + u - h)?;
        min_zeta = min_zeta.min(up.re.exp()).min(down.re.exp());
        let fejer = if u == 0.0 { alpha * alpha } else { ((alpha * u).sin() / u).powi(2) };
        Ok((up - down) * fejer * Complex64::from_polar(1.0, h_shift * u))
    };
    let coarse = composite(&panels, &mut integrand)?;
    let fine = composite(&halve(&panels), &mut integrand)?;
    // zeta errors enter through |d log zeta| <= |d zeta|/|zeta|, against int (sin au/u)^2 = pi a
    let propagated = if track.is_some() { 2.0 * inner.target_abs_error / min_zeta * PI * alpha } else { 0.0 };
    let quad_error = (fine - coarse).norm() + propagated;

    let top = (h_shift + 2.0 * alpha).exp().floor().max(2.0);
    let table = lambda_sieve(top as u64)?;
    let sum = tent_sum(alpha, h_shift, sigma, t, h, 1, &table)?;
    let rhs = Complex64::new(0.0, -PI) * sum.value;
    let budget = h * (1.0 + (2.0 * sigma - 1.0).ln().abs()) * (2.0 * alpha + h_shift.abs()).exp() / range;
    Ok(ConvolutionReport {
        identity: Identity::Lemma22,
        lhs: fine,
        rhs,
        residual: fine - rhs,
        quad_error,
        paper_error_budget: budget,
        big_t,
        t,
        h,
        sigma,
        n: None,
        alpha,
        h_shift,
        kernel: None,
        u_range: range,
        panels: panels.len(),
        rhs_terms: sum.terms.len(),
    })
}

/// S on [lo, hi] together with the zero list up to hi.
fn argument_source(
    sigma: f64,
    lo: f64,
    hi: f64,
    policy: &PrecisionPolicy,
) -> Result<(Box<dyn ArgumentSource>, Arc<crate::zeta::ZeroOrdinateList>)> {
    let zeros = Arc::new(count_zeros(hi, policy)?);
    if sigma == 0.5 {
        Ok((Box::new(CriticalLineArgument::new(zeros.clone())), zeros))
    } else {
        Ok((Box::new(TrackedArgument::new(sigma, lo, hi, Some(zeros.clone()), policy)?), zeros))
    }
}

/// Delta_h S_n(sigma, y) at ascending ordinates `ys`.
fn shift_differences(
    n: u32,
    ys: &[f64],
    h: f64,
    src: &dyn ArgumentSource,
    anchor: &IterateState,
) -> Result<(Vec<f64>, f64)> {
    let mut out = Vec::with_capacity(ys.len());
    let mut state = anchor.clone();
    for &y in ys {
        let lo = y - h;
        if n == 0 {
            out.push(src.s(y + h)? - src.s(lo)?);
            continue;
        }
        state = state.shift(lo - state.t, src)?;
        let up = state.shift(2.0 * h, src)?;
        out.push(up.values[n as usize - 1] - state.values[n as usize - 1]);
    }
    Ok((out, state.est_error))
}

/// The convolution identity for S_n at one point.
pub fn prop24_eval(
    n: IterateOrder,
    sigma: f64,
    t: f64,
    h: f64,
    kp: &KernelParams,
    big_t: f64,
    policy: &PrecisionPolicy,
) -> Result<ConvolutionReport> {
    kp.validate()?;
    let k = n.get();
    let sigma_ok = if k >= 1 { (0.5..1.0).contains(&sigma) } else { sigma > 0.5 && sigma < 1.0 };
    let range = check_common(sigma_ok, sigma, t, h, big_t)?;
    let quarter = 0.25 * 2.0 * PI / kp.log2t.max(kp.gamma * kp.log2t);
    let (lo, hi) = (t - range - h, t + range + h);

    let (lhs, quad_error, panels) = if h == 0.0 {
        (0.0, 0.0, 0)
    } else {
        let (src, zeros) = argument_source(sigma, lo, hi, policy)?;
        // S_n(t + u +- h) has kinks where t + u +- h crosses an ordinate
        let mut breaks = vec![-range, range];
        for &g in zeros.between(lo, hi) {
            for b in [g - t - h, g - t + h] {
                if b > -range && b < range {
                    breaks.push(b);
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let panels = panel_edges(&breaks, quarter.min(1.0));
        let anchor = if k >= 1 {
            iterate_state(k, sigma, lo, policy)?
        } else {
            IterateState { t: lo, values: vec![], est_error: 0.0 }
        };
        let eval = |panels: &[(f64, f64)]| -> Result<(f64, f64)> {
            let rule = gauss_legendre(ORDER);
            let mut us = Vec::new();
            let mut ws = Vec::new();
            for &(a, b) in panels {
                for (x, w) in rule.mapped(a, b) {
                    us.push(x);
                    ws.push(w);
                }
            }
            let ys: Vec<f64> = us.iter().map(|u| t + u).collect();
            let (d, err) = shift_differences(k, &ys, h, src.as_ref(), &anchor)?;
            let mut acc = 0.0;
            for ((u, w), dv) in us.iter().zip(&ws).zip(&d) {
                acc += w * dv * combined_kernel(*u, kp);
            }
            Ok((acc, err))
        };
        let (coarse, e1) = eval(&panels)?;
        let (fine, e2) = eval(&halve(&panels))?;
        // est_error of S_n values times the kernel mass, bounded by 5 pi alpha
        let kernel_mass = 5.0 * PI * kp.alpha;
        (fine, (fine - coarse).abs() + (e1.max(e2) + anchor.est_error) * 2.0 * kernel_mass, panels.len())
    };

    let needed = (kp.log2t + 2.0 * kp.alpha).exp().floor().max(2.0) as u64;
    let table = lambda_sieve(needed)?;
    let sa = dirichlet_sum(DirichletKind::A, kp, sigma, t, h, n, &table)?;
    let sb = dirichlet_sum(DirichletKind::B, kp, sigma, t, h, n, &table)?;
    let rhs =
        (3.0 * kp.delta as f64 * i_pow(k + 3) * sa.value).im + (kp.delta_prime as f64 * i_pow(k + 2) * sb.value).im;
    let budget = h * kp.log2t;
    Ok(ConvolutionReport {
        identity: Identity::Prop24,
        lhs: Complex64::new(lhs, 0.0),
        rhs: Complex64::new(rhs, 0.0),
        residual: Complex64::new(lhs - rhs, 0.0),
        quad_error,
        paper_error_budget: budget,
        big_t,
        t,
        h,
        sigma,
        n: Some(k),
        alpha: kp.alpha,
        h_shift: kp.h_shift,
        kernel: Some(*kp),
        u_range: range,
        panels,
        rhs_terms: sa.terms.len() + sb.terms.len(),
    })
}
