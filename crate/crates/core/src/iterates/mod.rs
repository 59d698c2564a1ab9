//! S(sigma, t), its iterates S_n by two independent routes, the constants
//! delta_{n, sigma} and shift differences.

mod delta;
mod represent;
mod sweep;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::adaptive_gauss_legendre;
use crate::zeta::{count_zeros, log_zeta_littlewood_path, rvm_main, CriticalStripPoint, PrecisionPolicy};

pub use delta::{delta_constant, delta_constant_with, DeltaConstant, DeltaRoute, DeltaScheme};
pub use represent::factorial;
pub use sweep::{
    forward_sweep, ArgumentSource, CriticalLineArgument, IterateState, SweepGrid, SweepRow, TrackedArgument,
};

/// Default ceiling on n; factorial prefactors degrade conditioning beyond it.
pub const DEFAULT_MAX_ORDER: u32 = 8;

/// Iterate index n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IterateOrder(u32);

impl IterateOrder {
    pub fn new(n: u32) -> Result<Self> {
        Self::with_max(n, DEFAULT_MAX_ORDER)
    }

    /// Accepts n up to an explicit ceiling.
    pub fn with_max(n: u32, max: u32) -> Result<Self> {
        if n > max {
            return Err(Error::InvalidConfig(format!("iterate order {n} exceeds the maximum {max}")));
        }
        Ok(IterateOrder(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Weighted integral of log zeta over the horizontal half line.
    Representation,
    /// delta constants plus an integral of S over [0, t].
    Recursive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterateValue {
    pub n: IterateOrder,
    pub point: CriticalStripPoint,
    pub value: f64,
    pub route: Route,
    pub est_error: f64,
}

/// A shift t +- h.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftPair {
    pub t: f64,
    pub h: f64,
}

impl ShiftPair {
    pub fn new(t: f64, h: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&h) {
            return Err(Error::InvalidConfig(format!("shift h = {h} outside [0, 1]")));
        }
        if !(t - h > 0.0) {
            return Err(Error::InvalidConfig(format!("shift needs t - h > 0 (t = {t}, h = {h})")));
        }
        Ok(ShiftPair { t, h })
    }
}

/// S(sigma, t) = arg zeta(sigma + i t) / pi.
pub fn s_value(p: CriticalStripPoint, policy: &PrecisionPolicy) -> Result<f64> {
    Ok(log_zeta_littlewood_path(p, policy)?.arg_over_pi)
}

/// S_n(sigma, t) by the chosen route.
pub fn sn_value(
    n: IterateOrder,
    p: CriticalStripPoint,
    route: Route,
    policy: &PrecisionPolicy,
) -> Result<IterateValue> {
    p.validate()?;
    policy.validate()?;
    let k = n.get();
    let done = |value: f64, est_error: f64| IterateValue { n, point: p, value, route, est_error };
    if k >= 1 && p.t == 0.0 {
        let d = delta_constant(n, p.sigma, policy)?;
        return Ok(done(d.value, d.est_error));
    }
    if k == 0 {
        if route == Route::Representation {
            return Err(Error::InvalidConfig("the representation route needs n >= 1".into()));
        }
        return Ok(done(s_value(p, policy)?, policy.target_abs_error));
    }
    let (value, err) = match route {
        Route::Representation => {
            represent::representation_integral(k, p.sigma, p.t, None, policy.target_abs_error, policy)?
        }
        Route::Recursive => recursive(k, p, policy)?,
    };
    Ok(done(value, err))
}

/// sum_j delta_j t^{n-j}/(n-j)! + int_0^t (t-tau)^{n-1}/(n-1)! S(sigma, tau) dtau.
fn recursive(n: u32, p: CriticalStripPoint, policy: &PrecisionPolicy) -> Result<(f64, f64)> {
    let (sigma, t) = (p.sigma, p.t);
    let mut value = 0.0;
    let mut err = 0.0;
    for j in 1..=n {
        let d = delta_constant(IterateOrder(j), sigma, policy)?;
        let w = t.powi((n - j) as i32) / factorial(n - j);
        value += d.value * w;
        err += d.est_error * w;
    }
    let zeros = count_zeros(t, policy)?;
    if sigma == 0.5 {
        let src = CriticalLineArgument::new(Arc::new(zeros));
        let (mom, e) = src.moments(0.0, t, n - 1)?;
        return Ok((value + mom[n as usize - 1], err + e));
    }
    let inner = policy.inner();
    let mut edges = vec![0.0];
    edges.extend(zeros.between(0.0, t).iter().copied());
    edges.push(t);
    let share = 0.5 * policy.target_abs_error / (edges.len() - 1) as f64;
    let fm = factorial(n - 1);
    for w in edges.windows(2) {
        let q = adaptive_gauss_legendre(
            |tau| {
                let s = s_value(CriticalStripPoint::new(sigma, tau)?, &inner)?;
                Ok((t - tau).powi(n as i32 - 1) / fm * s)
            },
            w[0],
            w[1],
            share,
            10,
            200_000,
        )?;
        value += q.value;
        err += q.error;
    }
    Ok((value, err + inner.target_abs_error * t.powi(n as i32) / factorial(n)))
}

/// S_1..S_m at (sigma, t) by the representation route, as a sweep anchor.
pub fn iterate_state(m: u32, sigma: f64, t: f64, policy: &PrecisionPolicy) -> Result<IterateState> {
    let mut values = Vec::with_capacity(m as usize);
    let mut est_error = 0.0;
    for j in 1..=m {
        let v = sn_value(
            IterateOrder::with_max(j, u32::MAX)?,
            CriticalStripPoint::new(sigma, t)?,
            Route::Representation,
            policy,
        )?;
        values.push(v.value);
        est_error += v.est_error;
    }
    Ok(IterateState { t, values, est_error })
}

/// Delta_h S_n(sigma, t) = S_n(sigma, t + h) - S_n(sigma, t - h).
pub fn delta_h_sn(
    n: IterateOrder,
    p: CriticalStripPoint,
    h: f64,
    route: Route,
    policy: &PrecisionPolicy,
) -> Result<f64> {
    let pair = ShiftPair::new(p.t, h)?;
    if pair.h == 0.0 {
        return Ok(0.0);
    }
    let up = sn_value(n, CriticalStripPoint::new(p.sigma, p.t + h)?, route, policy)?;
    let down = sn_value(n, CriticalStripPoint::new(p.sigma, p.t - h)?, route, policy)?;
    Ok(up.value - down.value)
}

/// (1/pi) Im{ i^n/(n-1)! int_sigma^2 (v-sigma)^{n-1} Delta_h log zeta(v+it) dv },
/// which equals Delta_h S_n up to O(h).
pub fn delta_h_sn_strip(n: IterateOrder, p: CriticalStripPoint, h: f64, policy: &PrecisionPolicy) -> Result<f64> {
    let pair = ShiftPair::new(p.t, h)?;
    if n.get() == 0 {
        return Err(Error::InvalidConfig("the strip representation needs n >= 1".into()));
    }
    if pair.h == 0.0 {
        return Ok(0.0);
    }
    let tol = policy.target_abs_error;
    let up = represent::representation_integral(n.get(), p.sigma, p.t + h, Some(2.0), tol, policy)?;
    let down = represent::representation_integral(n.get(), p.sigma, p.t - h, Some(2.0), tol, policy)?;
    Ok(up.0 - down.0)
}

/// N(t) - [main(t) + S(1/2, t)], which is O(1/t).
pub fn rvm_residual(t: f64, policy: &PrecisionPolicy) -> Result<f64> {
    if !(t >= 2.0) {
        return Err(Error::InvalidConfig(format!("rvm residual needs t >= 2, got {t}")));
    }
    let zeros = count_zeros(t, policy)?;
    let counted = zeros.count(t);
    let s = s_value(CriticalStripPoint::new(0.5, t)?, policy)?;
    let formula = rvm_main(t) + s;
    let r = counted - formula;
    if r.abs() >= 0.5 {
        return Err(Error::ReconciliationFailure { t, counted, formula });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ord(n: u32) -> IterateOrder {
        IterateOrder::new(n).unwrap()
    }

    fn pt(sigma: f64, t: f64) -> CriticalStripPoint {
        CriticalStripPoint::new(sigma, t).unwrap()
    }

    #[test]
    fn order_ceiling() {
        assert!(IterateOrder::new(8).is_ok());
        assert!(IterateOrder::new(9).is_err());
        assert!(IterateOrder::with_max(12, 12).is_ok());
    }

    #[test]
    fn s_at_twenty_matches_zero_count() {
        let p = PrecisionPolicy::default();
        let s = s_value(pt(0.5, 20.0), &p).unwrap();
        let formula = 1.0 - rvm_main(20.0);
        // the O(1/t) term is below 0.01 at t = 20
        assert!((s - formula).abs() < 0.01, "{s} vs {formula}");
    }

    #[test]
    fn t_zero_gives_delta() {
        let p = PrecisionPolicy::default();
        for route in [Route::Representation, Route::Recursive] {
            let v = sn_value(ord(2), pt(0.5, 0.0), route, &p).unwrap();
            assert_eq!(v.value, 0.125);
        }
    }

    #[test]
    fn routes_agree_off_the_line() {
        let p = PrecisionPolicy::with_target(1e-9);
        let a = sn_value(ord(1), pt(0.6, 30.0), Route::Representation, &p).unwrap();
        let b = sn_value(ord(1), pt(0.6, 30.0), Route::Recursive, &p).unwrap();
        assert!((a.value - b.value).abs() < 1e-6, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn residual_rounds_to_zero() {
        let p = PrecisionPolicy::default();
        for t in [30.0, 50.0, 14.134725141734693] {
            assert_eq!(rvm_residual(t, &p).unwrap().round(), 0.0);
        }
    }
}
