//! The normalising constants delta_{n, sigma}.
//!
//! Even n = 2k has the closed form (-1)^{k-1} (1-sigma)^{2k} / (2k)!.
//! Odd n = 2k-1 reduces to a single integral,
//! (-1)^{k-1}/pi int_sigma^inf (u-sigma)^{2k-2}/(2k-2)! log|zeta(u)| du,
//! which is log-singular at u = 1. Two independent schemes are provided.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::IterateOrder;
use crate::error::{Error, Result};
use crate::numeric::{adaptive_gauss_legendre, tanh_sinh};
use crate::zeta::{zeta_pole_free, PrecisionPolicy};

/// How a delta constant was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaRoute {
    ClosedFormEven,
    QuadratureOdd,
}

/// Quadrature scheme for odd n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DeltaScheme {
    /// Geometrically graded Gauss–Legendre panels accumulating at u = 1.
    #[default]
    GradedPanels,
    /// log|u-1| subtracted in closed form, tanh-sinh on the smooth rest.
    Subtraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaConstant {
    pub n: u32,
    pub sigma: f64,
    pub value: f64,
    pub route: DeltaRoute,
    pub est_error: f64,
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Upper bound for int_V^inf (v-sigma)^m/m! * (-2 log(1 - 2^{1-v})) dv, V >= 2.
///
/// Uses -log(1-x) <= x/(1-x) and the closed form of
/// int_V^inf (v-sigma)^m/m! e^{-c(v-1)} dv with c = log 2.
pub(crate) fn log_zeta_tail_bound(sigma: f64, m: u32, v_cut: f64) -> f64 {
    let c = std::f64::consts::LN_2;
    let x = (v_cut - sigma).max(0.0);
    let mut sum = 0.0;
    let mut pow = 1.0; // x^j / j!
    for j in 0..=m {
        if j > 0 {
            pow *= x / j as f64;
        }
        sum += pow / c.powi((m - j + 1) as i32);
    }
    let lead = 2.0 / (1.0 - (1.0 - v_cut).exp2());
    lead * (-c * (v_cut - 1.0)).exp() * sum
}

/// Smallest integer cut-off V >= 2 whose tail bound is below `tol`.
pub(crate) fn tail_cutoff(sigma: f64, m: u32, tol: f64) -> (f64, f64) {
    let mut v = 2.0;
    loop {
        let b = log_zeta_tail_bound(sigma, m, v);
        if b <= tol || v > 400.0 {
            return (v, b);
        }
        v += 1.0;
    }
}

/// log|zeta(u)| for real u, accurate near the pole.
fn log_abs_zeta_real(u: f64, policy: &PrecisionPolicy) -> Result<f64> {
    if u == 1.0 {
        return Ok(f64::INFINITY);
    }
    if (u - 1.0).abs() >= 1.0 {
        return Ok(crate::zeta::zeta_eval(Complex64::new(u, 0.0), policy)?.norm().ln());
    }
    let w = zeta_pole_free(Complex64::new(u, 0.0), policy)?;
    Ok(w.norm().ln() - (u - 1.0).abs().ln())
}

/// delta_{n, sigma} with the default scheme.
pub fn delta_constant(n: IterateOrder, sigma: f64, policy: &PrecisionPolicy) -> Result<DeltaConstant> {
    delta_constant_with(n, sigma, DeltaScheme::default(), policy)
}

pub fn delta_constant_with(
    n: IterateOrder,
    sigma: f64,
    scheme: DeltaScheme,
    policy: &PrecisionPolicy,
) -> Result<DeltaConstant> {
    let n = n.get();
    if n == 0 {
        return Err(Error::InvalidConfig("delta_{n,sigma} is defined for n >= 1".into()));
    }
    if !(0.5..=1.0).contains(&sigma) {
        return Err(Error::InvalidConfig(format!("delta_{{n,sigma}} needs 1/2 <= sigma <= 1, got {sigma}")));
    }
    if n % 2 == 0 {
        let k = n / 2;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        let value = sign * (1.0 - sigma).powi(n as i32) / factorial(n);
        return Ok(DeltaConstant { n, sigma, value, route: DeltaRoute::ClosedFormEven, est_error: 0.0 });
    }
    let k = n.div_ceil(2);
    let m = n - 1;
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let tol = policy.target_abs_error * PI;
    let (v_cut, tail) = tail_cutoff(sigma, m, 0.25 * tol);
    let inner = policy.inner();
    let mf = factorial(m);
    let weight = move |u: f64| (u - sigma).powi(m as i32) / mf;
    let (integral, quad_err) = match scheme {
        DeltaScheme::GradedPanels => graded(sigma, v_cut, &weight, 0.5 * tol, &inner)?,
        DeltaScheme::Subtraction => subtraction(sigma, m, v_cut, &weight, 0.5 * tol, &inner)?,
    };
    Ok(DeltaConstant {
        n,
        sigma,
        value: sign * integral / PI,
        route: DeltaRoute::QuadratureOdd,
        est_error: (quad_err + tail) / PI,
    })
}

fn graded(
    sigma: f64,
    v_cut: f64,
    weight: &dyn Fn(f64) -> f64,
    tol: f64,
    policy: &PrecisionPolicy,
) -> Result<(f64, f64)> {
    const LEVELS: i32 = 40;
    let mut edges = Vec::new();
    if sigma < 1.0 {
        let d = 1.0 - sigma;
        edges.push(sigma);
        for j in 1..=LEVELS {
            edges.push(1.0 - d * 0.5f64.powi(j));
        }
    }
    edges.push(1.0);
    for j in (1..=LEVELS).rev() {
        edges.push(1.0 + 0.5f64.powi(j));
    }
    let mut v = 2.0;
    while v <= v_cut {
        edges.push(v);
        v += 1.0;
    }
    let panels = edges.len() - 1;
    let share = tol / panels as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    for w in edges.windows(2) {
        let q =
            adaptive_gauss_legendre(|u| Ok(weight(u) * log_abs_zeta_real(u, policy)?), w[0], w[1], share, 12, 200_000)?;
        value += q.value;
        error += q.error;
    }
    Ok((value, error))
}

/// int_a^b x^i log|x| dx.
fn power_log_integral(i: u32, a: f64, b: f64) -> f64 {
    let f = |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            let p = (i + 1) as f64;
            x.powi(i as i32 + 1) / p * (x.abs().ln() - 1.0 / p)
        }
    };
    f(b) - f(a)
}

fn subtraction(
    sigma: f64,
    m: u32,
    v_cut: f64,
    weight: &dyn Fn(f64) -> f64,
    tol: f64,
    policy: &PrecisionPolicy,
) -> Result<(f64, f64)> {
    // int_sigma^2 w(u) log|u-1| du with x = u - 1, a = sigma - 1:
    // (x - a)^m / m! = sum_i x^i (-a)^{m-i} / (i! (m-i)!)
    let a = sigma - 1.0;
    let mut singular = 0.0;
    for i in 0..=m {
        let c = (-a).powi((m - i) as i32) / (factorial(i) * factorial(m - i));
        singular += c * power_log_integral(i, a, 1.0);
    }
    let smooth = tanh_sinh(
        |u| {
            let w = zeta_pole_free(Complex64::new(u, 0.0), policy)?;
            Ok(weight(u) * w.norm().ln())
        },
        sigma,
        2.0,
        0.5 * tol,
        14,
    )?;
    let far = if v_cut > 2.0 {
        tanh_sinh(|u| Ok(weight(u) * log_abs_zeta_real(u, policy)?), 2.0, v_cut, 0.5 * tol, 14)?
    } else {
        crate::numeric::Quadrature { value: 0.0, error: 0.0, evaluations: 0 }
    };
    Ok((smooth.value - singular + far.value, smooth.error + far.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(n: u32) -> IterateOrder {
        IterateOrder::new(n).unwrap()
    }

    #[test]
    fn even_closed_form() {
        let p = PrecisionPolicy::default();
        assert_eq!(delta_constant(ord(2), 0.5, &p).unwrap().value, 0.125);
        assert_eq!(delta_constant(ord(4), 0.5, &p).unwrap().value, -1.0 / 384.0);
        assert_eq!(delta_constant(ord(6), 1.0, &p).unwrap().value, 0.0);
    }

    #[test]
    fn tail_bound_dominates_log_zeta() {
        for &v in &[2.0, 2.5, 4.0, 10.0] {
            let lz = log_abs_zeta_real(v, &PrecisionPolicy::default()).unwrap();
            assert!(lz <= -2.0 * (1.0 - (1.0 - v).exp2()).ln(), "v={v}");
        }
        // closed form against direct quadrature of the bound itself
        let (sigma, m, vc) = (0.5, 2u32, 3.0);
        let q = adaptive_gauss_legendre(
            |v| Ok((v - sigma).powi(2) / 2.0 * -2.0 * (1.0 - (1.0 - v).exp2()).ln()),
            vc,
            200.0,
            1e-12,
            20,
            1_000_000,
        )
        .unwrap();
        let b = log_zeta_tail_bound(sigma, m, vc);
        assert!(b >= q.value && b < 1.5 * q.value, "{b} vs {}", q.value);
    }

    #[test]
    fn odd_schemes_agree() {
        let p = PrecisionPolicy::with_target(1e-10);
        for &(n, sigma) in &[(1, 0.5), (1, 0.75), (3, 0.5), (1, 1.0)] {
            let a = delta_constant_with(ord(n), sigma, DeltaScheme::GradedPanels, &p).unwrap();
            let b = delta_constant_with(ord(n), sigma, DeltaScheme::Subtraction, &p).unwrap();
            assert!((a.value - b.value).abs() < 1e-9, "n={n} sigma={sigma}: {} vs {}", a.value, b.value);
        }
    }
}
