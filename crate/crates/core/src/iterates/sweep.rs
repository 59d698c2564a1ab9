//! Marching the iterates along a t-grid.
//!
//! Between two ordinates the Taylor formula with integral remainder gives
//! S_j(t+d) = sum_{i<j} S_{j-i}(t) d^i/i! + int_t^{t+d} (t+d-tau)^{j-1}/(j-1)! S(tau) dtau,
//! so only weighted integrals of S itself are ever needed. On the critical
//! line those come from the zero list in closed form apart from theta.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::represent::factorial;
use crate::error::{Error, Result};
use crate::numeric::gauss_legendre;
use crate::zeta::{theta, track_vertical, LogZetaTrack, PrecisionPolicy, ZeroOrdinateList};

/// S(sigma, .) on some ordinate range, with its weighted integrals.
pub trait ArgumentSource: Sync {
    fn sigma(&self) -> f64;

    /// S(sigma, t).
    fn s(&self, t: f64) -> Result<f64>;

    /// int_a^b (b-tau)^k/k! S(sigma, tau) dtau for k = 0..=kmax, a <= b,
    /// with one error estimate covering all of them.
    fn moments(&self, a: f64, b: f64, kmax: u32) -> Result<(Vec<f64>, f64)>;

    /// Points in (a, b) where S jumps or turns sharply.
    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64>;
}

/// theta quadrature: panel width and order by height.
fn theta_rule(a: f64) -> (f64, usize) {
    if a >= 10.0 {
        (1.0, 8)
    } else {
        (0.25, 16)
    }
}

/// S(1/2, .) from a certified zero list.
#[derive(Debug, Clone)]
pub struct CriticalLineArgument {
    zeros: Arc<ZeroOrdinateList>,
}

impl CriticalLineArgument {
    pub fn new(zeros: Arc<ZeroOrdinateList>) -> Self {
        CriticalLineArgument { zeros }
    }

    pub fn zeros(&self) -> &ZeroOrdinateList {
        &self.zeros
    }

    fn check_range(&self, b: f64) -> Result<()> {
        if b > self.zeros.t_max + ZeroOrdinateList::tie_tolerance(b) {
            return Err(Error::InvalidConfig(format!(
                "ordinate {b} beyond the zero list (t_max = {})",
                self.zeros.t_max
            )));
        }
        Ok(())
    }
}

impl ArgumentSource for CriticalLineArgument {
    fn sigma(&self) -> f64 {
        0.5
    }

    fn s(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        if t <= 0.0 {
            return Err(Error::InvalidConfig("S(1/2, t) needs t > 0".into()));
        }
        Ok(self.zeros.s_on_line(t))
    }

    fn moments(&self, a: f64, b: f64, kmax: u32) -> Result<(Vec<f64>, f64)> {
        self.check_range(b)?;
        if !(a <= b) || a < 0.0 {
            return Err(Error::InvalidConfig(format!("moment interval [{a}, {b}] is not ordered in [0, inf)")));
        }
        let below = self.zeros.ordinates.partition_point(|&g| g <= a) as f64;
        let inside = self.zeros.between(a, b);
        let len = b - a;
        let mut out = Vec::with_capacity(kmax as usize + 1);
        // theta part by composite Gauss–Legendre, all weights at once
        let mut theta_part = vec![0.0; kmax as usize + 1];
        if len > 0.0 {
            let (width, order) = theta_rule(a);
            let pieces = (len / width).ceil().max(1.0) as usize;
            let rule = gauss_legendre(order);
            let h = len / pieces as f64;
            for p in 0..pieces {
                let lo = a + h * p as f64;
                let hi = if p + 1 == pieces { b } else { lo + h };
                for (x, w) in rule.mapped(lo, hi) {
                    let th = w * theta(x);
                    let mut pow = 1.0;
                    for (k, slot) in theta_part.iter_mut().enumerate() {
                        if k > 0 {
                            pow *= (b - x) / k as f64;
                        }
                        *slot += th * pow;
                    }
                }
            }
        }
        for k in 0..=kmax {
            let f = factorial(k + 1);
            let p = (k + 1) as i32;
            let mut v = below * len.powi(p) / f;
            for &g in inside {
                v += (b - g).powi(p) / f;
            }
            v -= len.powi(p) / f;
            v -= theta_part[k as usize] / std::f64::consts::PI;
            out.push(v);
        }
        Ok((out, 1e-14 * (1.0 + len) * (1.0 + b)))
    }

    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        self.zeros.between(a, b).to_vec()
    }
}

/// S(sigma, .) for sigma > 1/2 from a vertical log zeta track.
#[derive(Debug, Clone)]
pub struct TrackedArgument {
    sigma: f64,
    track: LogZetaTrack,
    zeros: Option<Arc<ZeroOrdinateList>>,
}

impl TrackedArgument {
    /// Tracks [lo, hi]; `zeros` (ordinates on the critical line) only guide
    /// panel placement.
    pub fn new(
        sigma: f64,
        lo: f64,
        hi: f64,
        zeros: Option<Arc<ZeroOrdinateList>>,
        policy: &PrecisionPolicy,
    ) -> Result<Self> {
        if !(sigma > 0.5) {
            return Err(Error::InvalidConfig(format!("tracked argument needs sigma > 1/2, got {sigma}")));
        }
        let track = track_vertical(sigma, &[lo, hi], &policy.inner())?;
        Ok(TrackedArgument { sigma, track, zeros })
    }

    fn panel_width(&self) -> f64 {
        (self.sigma - 0.5).clamp(0.02, 0.25)
    }
}

impl ArgumentSource for TrackedArgument {
    fn sigma(&self) -> f64 {
        self.sigma
    }

    fn s(&self, t: f64) -> Result<f64> {
        Ok(self.track.eval(t)?.im / std::f64::consts::PI)
    }

    fn moments(&self, a: f64, b: f64, kmax: u32) -> Result<(Vec<f64>, f64)> {
        let mut edges = vec![a];
        edges.extend(self.breakpoints(a, b));
        edges.push(b);
        let panels = crate::numeric::quad::panel_edges(&edges, self.panel_width());
        let fine = gauss_legendre(12);
        let coarse = gauss_legendre(8);
        let mut hi_acc = vec![0.0; kmax as usize + 1];
        let mut lo_acc = vec![0.0; kmax as usize + 1];
        for (p, q) in panels {
            for (rule, acc) in [(fine, &mut hi_acc), (coarse, &mut lo_acc)] {
                for (x, w) in rule.mapped(p, q) {
                    let sv = w * self.s(x)?;
                    let mut pow = 1.0;
                    for (k, slot) in acc.iter_mut().enumerate() {
                        if k > 0 {
                            pow *= (b - x) / k as f64;
                        }
                        *slot += sv * pow;
                    }
                }
            }
        }
        let err = hi_acc.iter().zip(&lo_acc).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        Ok((hi_acc, err + 1e-13 * (b - a)))
    }

    fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        self.zeros.as_ref().map(|z| z.between(a, b).to_vec()).unwrap_or_default()
    }
}

/// S_1, ..., S_m at one ordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterateState {
    pub t: f64,
    /// values[j - 1] = S_j(sigma, t)
    pub values: Vec<f64>,
    pub est_error: f64,
}

impl IterateState {
    /// S_j; S_0 is taken from the source.
    pub fn get(&self, j: u32, src: &dyn ArgumentSource) -> Result<f64> {
        if j == 0 {
            src.s(self.t)
        } else {
            Ok(self.values[j as usize - 1])
        }
    }

    /// Advances to t + d, d >= 0.
    pub fn shift(&self, d: f64, src: &dyn ArgumentSource) -> Result<IterateState> {
        let m = self.values.len();
        if m == 0 || d == 0.0 {
            return Ok(IterateState { t: self.t + d, ..self.clone() });
        }
        let (mom, err) = src.moments(self.t, self.t + d, m as u32 - 1)?;
        let mut values = Vec::with_capacity(m);
        for j in 1..=m {
            let mut v = mom[j - 1];
            let mut pow = 1.0;
            for i in 0..j {
                if i > 0 {
                    pow *= d / i as f64;
                }
                v += self.values[j - i - 1] * pow;
            }
            values.push(v);
        }
        Ok(IterateState { t: self.t + d, values, est_error: self.est_error + err })
    }
}

/// One grid point of a forward-difference sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    /// S_n(t)
    pub sn: f64,
    /// S_n(t + h) - S_n(t)
    pub delta: f64,
    /// h^{-1} (S_{n+1}(t + h) - S_{n+1}(t))
    pub mean_next: f64,
    /// max and min of S_n over the quadrature nodes in [t, t + h]
    pub sample_max: f64,
    pub sample_min: f64,
    /// |h^{-1} sum_i w_i S_n(u_i) - mean_next|
    pub quad_gap: f64,
    pub est_error: f64,
}

impl SweepRow {
    /// max_u S_n(u) >= h^{-1} Delta S_{n+1} >= min_u S_n(u), up to the
    /// quadrature gap.
    pub fn mean_value_holds(&self, slack: f64) -> bool {
        let tol = self.quad_gap + slack;
        self.sample_max >= self.mean_next - tol && self.sample_min <= self.mean_next + tol
    }
}

/// Grid and window of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub n: u32,
    pub start: f64,
    pub step: f64,
    pub count: usize,
    pub h: f64,
    /// Points per independently anchored chunk.
    pub chunk: usize,
}

impl SweepGrid {
    pub fn point(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }
}

const NODE_ORDER: usize = 8;

/// Evaluates one row given the state (S_1..S_{n+1}) at its ordinate.
fn sweep_row(state: &IterateState, n: u32, h: f64, src: &dyn ArgumentSource) -> Result<SweepRow> {
    let t = state.t;
    let mut edges = vec![t];
    edges.extend(src.breakpoints(t, t + h));
    edges.push(t + h);
    let rule = gauss_legendre(NODE_ORDER);
    let mut cur = state.clone();
    let mut weighted = 0.0;
    let mut smax = f64::NEG_INFINITY;
    let mut smin = f64::INFINITY;
    for w in edges.windows(2) {
        for (x, wt) in rule.mapped(w[0], w[1]) {
            cur = cur.shift(x - cur.t, src)?;
            let v = cur.get(n, src)?;
            weighted += wt * v;
            smax = smax.max(v);
            smin = smin.min(v);
        }
    }
    let end = cur.shift(t + h - cur.t, src)?;
    let sn = state.get(n, src)?;
    let sn_end = if n == 0 { src.s(t + h)? } else { end.values[n as usize - 1] };
    let mean_next = (end.values[n as usize] - state.values[n as usize]) / h;
    Ok(SweepRow {
        t,
        sn,
        delta: sn_end - sn,
        mean_next,
        sample_max: smax,
        sample_min: smin,
        quad_gap: (weighted / h - mean_next).abs(),
        est_error: end.est_error,
    })
}

/// Forward differences Delta S_n over a grid.
///
/// The grid is cut into fixed chunks, each anchored independently by
/// `anchor(t)`, which must return S_1..S_{n+1} at t. Chunks run in parallel
/// and the result does not depend on the worker count.
pub fn forward_sweep<A>(grid: &SweepGrid, src: &dyn ArgumentSource, anchor: A) -> Result<Vec<SweepRow>>
where
    A: Fn(f64) -> Result<IterateState> + Sync,
{
    if !(grid.h > 0.0 && grid.step > 0.0 && grid.chunk > 0) {
        return Err(Error::InvalidConfig("sweep needs h > 0, step > 0 and chunk > 0".into()));
    }
    let chunks: Vec<usize> = (0..grid.count).step_by(grid.chunk).collect();
    let parts: Vec<Result<Vec<SweepRow>>> = chunks
        .par_iter()
        .map(|&first| {
            let last = (first + grid.chunk).min(grid.count);
            let mut state = anchor(grid.point(first))?;
            if state.values.len() != grid.n as usize + 1 {
                return Err(Error::InvalidConfig("anchor must return S_1..S_{n+1}".into()));
            }
            let mut rows = Vec::with_capacity(last - first);
            for i in first..last {
                let t = grid.point(i);
                if i > first {
                    state = state.shift(t - state.t, src)?;
                    state.t = t;
                }
                rows.push(sweep_row(&state, grid.n, grid.h, src)?);
            }
            Ok(rows)
        })
        .collect();
    let mut out = Vec::with_capacity(grid.count);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
