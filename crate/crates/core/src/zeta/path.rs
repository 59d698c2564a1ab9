//! Continuous branch of log zeta.
//!
//! At sigma >= 2 the principal logarithm is the continuous one, since
//! |zeta(s) - 1| <= zeta(2) - 1 < 1 there. Below that the branch is carried
//! step by step: each step is split at its midpoint and both half increments
//! must have argument below pi/2, otherwise the step is halved.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

use num_complex::Complex64;

use super::{zeta_eval, CriticalStripPoint, LogZetaValue, PrecisionPolicy};
use crate::error::{Error, Result};

const MIN_STEP: f64 = 1e-6;
const MAX_STEP: f64 = 0.25;
const ZERO_EPS: f64 = 1e-4;

/// Direction of a tracked segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrackAxis {
    /// s = x + i t
    Horizontal { t: f64 },
    /// s = sigma + i x
    Vertical { sigma: f64 },
}

impl TrackAxis {
    fn point(&self, x: f64) -> Complex64 {
        match *self {
            TrackAxis::Horizontal { t } => Complex64::new(x, t),
            TrackAxis::Vertical { sigma } => Complex64::new(sigma, x),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Node {
    x: f64,
    zeta: Complex64,
    log: Complex64,
}

/// A branch chart of log zeta along a segment: every accepted step point
/// with its zeta value and continuous logarithm. Values between points are
/// obtained relative to the nearest point.
#[derive(Debug, Clone)]
pub struct LogZetaTrack {
    axis: TrackAxis,
    nodes: Vec<Node>,
    policy: PrecisionPolicy,
}

/// Outcome of walking a segment.
enum Walk {
    Done,
    /// |zeta| fell below the zero threshold at this coordinate.
    Zero(f64),
}

struct Walker<'a> {
    axis: TrackAxis,
    policy: &'a PrecisionPolicy,
    threshold: f64,
    step: f64,
}

impl Walker<'_> {
    fn zeta(&self, x: f64) -> Result<Complex64> {
        zeta_eval(self.axis.point(x), self.policy)
    }

    /// Walks from the last node to `target`, pushing accepted nodes.
    fn walk_to(&mut self, nodes: &mut Vec<Node>, target: f64) -> Result<Walk> {
        loop {
            let cur = *nodes.last().expect("walker needs an anchor");
            let remaining = target - cur.x;
            if remaining == 0.0 {
                return Ok(Walk::Done);
            }
            let dir = remaining.signum();
            let mut step = self.step.min(remaining.abs());
            loop {
                let x1 = if step == remaining.abs() { target } else { cur.x + dir * step };
                let z1 = self.zeta(x1)?;
                if z1.norm() < self.threshold {
                    return Ok(Walk::Zero(x1));
                }
                let whole = (z1 / cur.zeta).ln();
                let accepted = if whole.im.abs() < FRAC_PI_8 && step <= MAX_STEP {
                    Some(whole)
                } else {
                    let xm = 0.5 * (cur.x + x1);
                    let zm = self.zeta(xm)?;
                    if zm.norm() < self.threshold {
                        return Ok(Walk::Zero(xm));
                    }
                    let d1 = (zm / cur.zeta).ln();
                    let d2 = (z1 / zm).ln();
                    let sum = d1 + d2;
                    let consistent = ((sum.im - whole.im) / std::f64::consts::TAU).round() == 0.0;
                    if d1.im.abs() < FRAC_PI_2 && d2.im.abs() < FRAC_PI_2 && consistent {
                        Some(sum)
                    } else {
                        None
                    }
                };
                match accepted {
                    Some(d) => {
                        let log = Complex64::new(z1.norm().ln(), cur.log.im + d.im);
                        nodes.push(Node { x: x1, zeta: z1, log });
                        let rate = d.norm() / step;
                        self.step = if rate > 0.0 { (0.6 / rate).clamp(MIN_STEP, MAX_STEP) } else { MAX_STEP };
                        break;
                    }
                    None => {
                        step *= 0.5;
                        if step < MIN_STEP {
                            return Err(Error::StepCollapse {
                                min_step: MIN_STEP,
                                location: format!("{}", self.axis.point(cur.x)),
                            });
                        }
                    }
                }
            }
        }
    }
}

fn anchor_node(axis: TrackAxis, x: f64, policy: &PrecisionPolicy) -> Result<Node> {
    let zeta = zeta_eval(axis.point(x), policy)?;
    Ok(Node { x, zeta, log: zeta.ln() })
}

impl LogZetaTrack {
    pub fn axis(&self) -> TrackAxis {
        self.axis
    }

    /// Covered coordinate range.
    pub fn range(&self) -> (f64, f64) {
        (self.nodes[0].x, self.nodes[self.nodes.len() - 1].x)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn nearest(&self, x: f64) -> &Node {
        let i = self.nodes.partition_point(|n| n.x < x);
        if i == 0 {
            return &self.nodes[0];
        }
        if i == self.nodes.len() {
            return &self.nodes[i - 1];
        }
        let (a, b) = (&self.nodes[i - 1], &self.nodes[i]);
        if x - a.x <= b.x - x {
            a
        } else {
            b
        }
    }

    /// log zeta at coordinate `x` on the tracked branch.
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        let (lo, hi) = self.range();
        if let TrackAxis::Horizontal { t } = self.axis {
            if x >= 2.0 {
                return Ok(zeta_eval(Complex64::new(x, t), &self.policy)?.ln());
            }
        }
        if x < lo - 1e-12 || x > hi + 1e-12 {
            return Err(Error::InvalidConfig(format!("coordinate {x} outside tracked range [{lo}, {hi}]")));
        }
        let node = self.nearest(x);
        if node.x == x {
            return Ok(node.log);
        }
        let z = zeta_eval(self.axis.point(x), &self.policy)?;
        let d = (z / node.zeta).ln();
        Ok(Complex64::new(z.norm().ln(), node.log.im + d.im))
    }
}

/// Tracks log zeta(v + i t) from v = 2 down to `v_min`, passing through
/// every waypoint in [v_min, 2].
pub fn track_horizontal(t: f64, v_min: f64, waypoints: &[f64], policy: &PrecisionPolicy) -> Result<LogZetaTrack> {
    if t == 0.0 {
        return Err(Error::InvalidConfig("horizontal track at t = 0 meets the pole".into()));
    }
    let axis = TrackAxis::Horizontal { t };
    let mut nodes = vec![anchor_node(axis, 2.0, policy)?];
    if v_min < 2.0 {
        let mut stops: Vec<f64> = waypoints.iter().copied().filter(|&v| v < 2.0 && v > v_min).collect();
        stops.sort_by(|a, b| b.total_cmp(a));
        stops.dedup();
        stops.push(v_min);
        let mut walker = Walker { axis, policy, threshold: policy.zero_threshold(), step: MAX_STEP };
        for &v in &stops {
            if let Walk::Zero(x) = walker.walk_to(&mut nodes, v)? {
                return Err(Error::PrecisionUnreachable(format!(
                    "zeta vanishes to working precision at {} on the horizontal track",
                    axis.point(x)
                )));
            }
        }
    }
    nodes.reverse();
    Ok(LogZetaTrack { axis, nodes, policy: *policy })
}

/// Tracks log zeta(sigma + i tau) upward through ascending positive
/// `waypoints`, anchored by the Littlewood path at the first one.
///
/// The segment must be free of zeros; on the critical line use the zero
/// list instead.
pub fn track_vertical(sigma: f64, waypoints: &[f64], policy: &PrecisionPolicy) -> Result<LogZetaTrack> {
    let first =
        *waypoints.first().ok_or_else(|| Error::InvalidConfig("vertical track needs at least one waypoint".into()))?;
    if !(first > 0.0) {
        return Err(Error::InvalidConfig(format!("vertical track needs positive ordinates, got {first}")));
    }
    let axis = TrackAxis::Vertical { sigma };
    let anchor = log_zeta_littlewood_path(CriticalStripPoint::new(sigma, first)?, policy)?;
    if anchor.at_zero {
        return Err(Error::PrecisionUnreachable(format!("vertical track anchored at a zero ({sigma}, {first})")));
    }
    let zeta = zeta_eval(axis.point(first), policy)?;
    let mut nodes = vec![Node { x: first, zeta, log: anchor.as_complex() }];
    let mut walker = Walker { axis, policy, threshold: policy.zero_threshold(), step: MAX_STEP };
    let mut prev = first;
    for &w in &waypoints[1..] {
        if w < prev {
            return Err(Error::InvalidConfig("vertical waypoints must ascend".into()));
        }
        if w == prev {
            continue;
        }
        if let Walk::Zero(x) = walker.walk_to(&mut nodes, w)? {
            return Err(Error::StepCollapse { min_step: MIN_STEP, location: format!("zero near {}", axis.point(x)) });
        }
        prev = w;
    }
    Ok(LogZetaTrack { axis, nodes, policy: *policy })
}

/// log zeta at `sigma + i t` along 2 -> 2 + i t -> sigma + i t, or `None`
/// when a zero sits on the horizontal segment.
fn path_value(sigma: f64, t: f64, policy: &PrecisionPolicy) -> Result<Option<Complex64>> {
    let axis = TrackAxis::Horizontal { t };
    if sigma >= 2.0 {
        let z = zeta_eval(axis.point(sigma), policy)?;
        if z.norm() < policy.zero_threshold() {
            return Ok(None);
        }
        return Ok(Some(z.ln()));
    }
    let mut nodes = vec![anchor_node(axis, 2.0, policy)?];
    let mut walker = Walker { axis, policy, threshold: policy.zero_threshold(), step: MAX_STEP };
    match walker.walk_to(&mut nodes, sigma)? {
        Walk::Done => Ok(Some(nodes.last().unwrap().log)),
        Walk::Zero(_) => Ok(None),
    }
}

/// Branch-tracked log zeta at `p`, with S(sigma, t) = arg_over_pi.
///
/// When zeta vanishes on the horizontal segment the mean of the values at
/// t - eps and t + eps is returned and `at_zero` is set.
pub fn log_zeta_littlewood_path(p: CriticalStripPoint, policy: &PrecisionPolicy) -> Result<LogZetaValue> {
    p.validate()?;
    policy.validate()?;
    if p.sigma < 0.5 {
        return Err(Error::InvalidConfig(format!("Littlewood path needs sigma >= 1/2, got {}", p.sigma)));
    }
    if p.t <= 0.0 {
        return Err(Error::InvalidConfig("t = 0 is excluded: the pole lies on the path".into()));
    }
    if let Some(l) = path_value(p.sigma, p.t, policy)? {
        return Ok(LogZetaValue { log_modulus: l.re, arg_over_pi: l.im / std::f64::consts::PI, at_zero: false });
    }
    let mut eps = ZERO_EPS.min(0.5 * p.t);
    for _ in 0..20 {
        let lo = path_value(p.sigma, p.t - eps, policy)?;
        let hi = path_value(p.sigma, p.t + eps, policy)?;
        if let (Some(a), Some(b)) = (lo, hi) {
            let m = 0.5 * (a + b);
            return Ok(LogZetaValue { log_modulus: m.re, arg_over_pi: m.im / std::f64::consts::PI, at_zero: true });
        }
        eps *= 2.0;
    }
    Err(Error::PrecisionUnreachable(format!("could not leave the zero at ({}, {})", p.sigma, p.t)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pol() -> PrecisionPolicy {
        PrecisionPolicy::with_target(1e-11)
    }

    #[test]
    fn arg_vanishes_near_two() {
        let v = log_zeta_littlewood_path(CriticalStripPoint::new(2.0, 1e-9).unwrap(), &pol()).unwrap();
        assert!(v.arg_over_pi.abs() < 1e-8);
    }

    #[test]
    fn below_pole_arg_tends_to_minus_one() {
        // for sigma < 1 the path passes above the pole, so arg zeta -> -pi
        let v =
            log_zeta_littlewood_path(CriticalStripPoint::new(0.6, 1e-4).unwrap(), &PrecisionPolicy::with_target(1e-9))
                .unwrap();
        assert!((v.arg_over_pi + 1.0).abs() < 1e-3, "{v:?}");
    }

    #[test]
    fn recomposes_to_zeta() {
        for &(s, t) in &[(0.5, 20.0), (0.55, 101.3), (0.9, 7.0), (1.5, 300.0)] {
            let v = log_zeta_littlewood_path(CriticalStripPoint::new(s, t).unwrap(), &pol()).unwrap();
            let z = zeta_eval(Complex64::new(s, t), &pol()).unwrap();
            assert!((v.as_complex().exp() - z).norm() < 1e-9, "({s},{t})");
        }
    }

    #[test]
    fn averaging_at_first_zero() {
        let g1 = 14.134725141734693;
        let v = log_zeta_littlewood_path(CriticalStripPoint::new(0.5, g1).unwrap(), &pol()).unwrap();
        assert!(v.at_zero);
        // one-sided values: N - 1 - theta/pi with N = 0 and 1
        let lo = log_zeta_littlewood_path(CriticalStripPoint::new(0.5, g1 - 1e-4).unwrap(), &pol()).unwrap();
        let hi = log_zeta_littlewood_path(CriticalStripPoint::new(0.5, g1 + 1e-4).unwrap(), &pol()).unwrap();
        assert!((hi.arg_over_pi - lo.arg_over_pi - 1.0).abs() < 1e-3);
        assert!((v.arg_over_pi - 0.5 * (lo.arg_over_pi + hi.arg_over_pi)).abs() < 1e-12);
    }

    #[test]
    fn vertical_track_matches_path() {
        let taus: Vec<f64> = (0..=40).map(|k| 30.0 + 0.5 * k as f64).collect();
        let track = track_vertical(0.6, &taus, &pol()).unwrap();
        for &tau in &[30.0, 37.25, 44.0, 50.0] {
            let direct = log_zeta_littlewood_path(CriticalStripPoint::new(0.6, tau).unwrap(), &pol()).unwrap();
            let tracked = track.eval(tau).unwrap();
            assert!((tracked - direct.as_complex()).norm() < 1e-9, "tau={tau}");
        }
    }

    #[test]
    fn horizontal_track_matches_path() {
        let track = track_horizontal(50.0, 0.5, &[0.7, 1.1], &pol()).unwrap();
        for &v in &[0.5, 0.61, 1.0, 1.7, 2.5] {
            let direct = log_zeta_littlewood_path(CriticalStripPoint::new(v, 50.0).unwrap(), &pol()).unwrap();
            assert!((track.eval(v).unwrap() - direct.as_complex()).norm() < 1e-9, "v={v}");
        }
    }
}
