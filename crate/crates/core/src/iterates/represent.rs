//! S_n(sigma, t) = (1/pi) Im{ i^n/(n-1)! int_sigma^inf (v-sigma)^{n-1} log zeta(v+it) dv }.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::delta::tail_cutoff;
use crate::error::{Error, Result};
use crate::numeric::adaptive_gauss_legendre;
use crate::zeta::{track_horizontal, zeta_eval, LogZetaTrack, PrecisionPolicy};

/// Im{i^n z}.
pub(crate) fn rotate_im(n: u32, z: Complex64) -> f64 {
    match n % 4 {
        0 => z.im,
        1 => z.re,
        2 => -z.im,
        _ => -z.re,
    }
}

/// k! as a float.
pub fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Value and error estimate of
/// (1/pi) Im{ i^n/(n-1)! int_sigma^upper (v-sigma)^{n-1} log zeta(v+it) dv },
/// with `upper = None` meaning the full half line (tail bounded analytically).
pub(crate) fn representation_integral(
    n: u32,
    sigma: f64,
    t: f64,
    upper: Option<f64>,
    tol: f64,
    policy: &PrecisionPolicy,
) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::InvalidConfig("the representation route needs n >= 1".into()));
    }
    if t <= 0.0 {
        return Err(Error::InvalidConfig("the representation route needs t > 0".into()));
    }
    let m = n - 1;
    let scale = PI * factorial(m);
    let inner = policy.inner();
    let (v_cut, tail) = match upper {
        Some(u) => (u, 0.0),
        None => tail_cutoff(sigma, m, 0.25 * tol * scale),
    };
    // only the imaginary part needs the tracked branch
    let track: Option<LogZetaTrack> =
        if n % 2 == 0 && sigma < 2.0 { Some(track_horizontal(t, sigma, &[], &inner)?) } else { None };
    let log_zeta = |v: f64| -> Result<Complex64> {
        match &track {
            Some(tr) if v < 2.0 => tr.eval(v),
            _ => Ok(zeta_eval(Complex64::new(v, t), &inner)?.ln()),
        }
    };

    let mut edges = vec![sigma];
    let top = v_cut.min(2.0).max(sigma);
    if top > sigma {
        // graded towards sigma, where a nearby zero makes log|zeta| log-singular
        for j in (0..12).rev() {
            edges.push(sigma + (top - sigma) * 0.5f64.powi(j));
        }
    }
    let mut v = top.floor() + 1.0;
    while v < v_cut {
        edges.push(v);
        v += 1.0;
    }
    if v_cut > top {
        edges.push(v_cut);
    }
    let panels = (edges.len() - 1).max(1);
    let share = 0.5 * tol * scale / panels as f64;
    let mut value = 0.0;
    let mut error = 0.0;
    for w in edges.windows(2) {
        let q = adaptive_gauss_legendre(
            |v| Ok((v - sigma).powi(m as i32) * rotate_im(n, log_zeta(v)?)),
            w[0],
            w[1],
            share,
            10,
            400_000,
        )?;
        value += q.value;
        error += q.error;
    }
    // zeta errors propagate through |d log zeta| <= |d zeta| / |zeta|
    let propagated = inner.target_abs_error * 10.0 * (v_cut - sigma).powi(n as i32) / (n as f64);
    Ok((value / scale, (error + tail + propagated) / scale))
}
