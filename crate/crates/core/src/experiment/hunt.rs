//! Extreme-value hunts for sign * (S_n(sigma, t + h) - S_n(sigma, t)).

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::arith::{check_sign, log2, log3, SignContext};
use crate::error::{Error, Result};
use crate::iterates::{
    forward_sweep, iterate_state, ArgumentSource, CriticalLineArgument, IterateOrder, SweepGrid, SweepRow,
    TrackedArgument,
};
use crate::zeta::count_zeros;

/// h (log T)^{1/2} (log log log T)^{1/2} / (log log T)^{n - 1/2}.
pub fn theoretical_scale(n: u32, h: f64, big_t: f64) -> f64 {
    h * big_t.ln().sqrt() * log3(big_t).sqrt() / log2(big_t).powf(n as f64 - 0.5)
}

/// c (log T)^{-1/2} (log log T)^{-1/2} (log log log T)^{-1/2}.
pub fn h_floor(c: f64, big_t: f64) -> f64 {
    c / (big_t.ln() * log2(big_t) * log3(big_t)).sqrt()
}

/// Best value for one sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignBest {
    pub sign: i8,
    pub admissible: bool,
    pub best_t: f64,
    pub best_value: f64,
    pub ratio: f64,
    /// max over rows of sign * h^{-1} Delta S_{n+1}, a lower bound for max sign * S_n
    pub mean_value_bound: f64,
    /// max over sampled u of sign * S_n(u)
    pub sampled_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridStats {
    pub start: f64,
    pub end: f64,
    pub step: f64,
    pub count: usize,
    pub chunk: usize,
    pub refined_points: usize,
    pub zeros_used: usize,
    pub max_est_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValueCheck {
    pub checked: usize,
    pub violations: usize,
    /// largest ratio of the violation margin to the allowed slack; <= 1 means no violation
    pub worst_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuntReport {
    pub n: u32,
    pub sigma: f64,
    #[serde(rename = "T")]
    pub big_t: f64,
    pub beta: f64,
    pub h: f64,
    pub sign: i8,
    pub best_t: f64,
    pub best_value: f64,
    pub theoretical_scale: f64,
    pub ratio: f64,
    pub by_sign: Vec<SignBest>,
    pub grid: GridStats,
    pub mean_value: MeanValueCheck,
    /// Kept out of the serialized report so re-runs compare byte for byte.
    #[serde(skip)]
    pub wall_time_s: f64,
}

/// Report plus the rows behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct HuntOutcome {
    pub report: HuntReport,
    pub rows: Vec<SweepRow>,
    pub refined: Vec<SweepRow>,
}

/// Checks the configuration against the theorem ranges; the sign first.
pub fn validate_hunt(cfg: &ExperimentConfig) -> Result<()> {
    let r = &cfg.run;
    let n = IterateOrder::new(r.n)?;
    check_sign(n, r.sign, SignContext::VariationThm)?;
    if !(r.big_t > std::f64::consts::E.powf(std::f64::consts::E) && r.big_t.is_finite()) {
        return Err(Error::InvalidConfig(format!("T = {} must exceed e^e", r.big_t)));
    }
    if !(0.0..1.0).contains(&r.beta) {
        return Err(Error::InvalidConfig(format!("beta = {} outside [0, 1)", r.beta)));
    }
    let l2 = log2(r.big_t);
    let sigma_hi = 0.5 + 1.0 / l2;
    if !(r.sigma >= 0.5 && r.sigma <= sigma_hi) {
        return Err(Error::InvalidConfig(format!("sigma = {} outside [1/2, {sigma_hi:.6}]", r.sigma)));
    }
    let h = r.shift();
    if !(h > 0.0 && h <= 1.0 / l2) {
        return Err(Error::InvalidConfig(format!("h = {h} outside (0, 1/log log T = {:.6}]", 1.0 / l2)));
    }
    if r.n == 0 && r.sigma == 0.5 {
        if !(r.c_floor > 0.0) {
            return Err(Error::InvalidConfig(format!("c_floor = {} must be positive", r.c_floor)));
        }
        let floor = h_floor(r.c_floor, r.big_t);
        if h < floor {
            return Err(Error::InvalidConfig(format!("h = {h} below the n = 0 floor {floor:.6} (c = {})", r.c_floor)));
        }
    }
    let step = cfg.grid.step.unwrap_or(f64::INFINITY);
    if !(step > 0.0) || cfg.grid.chunk == 0 || cfg.grid.refine_factor == 0 {
        return Err(Error::InvalidConfig("grid step, chunk and refine_factor must be positive".into()));
    }
    if r.big_t.powf(r.beta) >= r.big_t {
        return Err(Error::InvalidConfig("empty t-range [T^beta, T]".into()));
    }
    cfg.precision.policy().validate()
}

pub(crate) fn argument_source(
    sigma: f64,
    lo: f64,
    hi: f64,
    cfg: &ExperimentConfig,
) -> Result<(Box<dyn ArgumentSource>, usize)> {
    let policy = cfg.precision.policy();
    let zeros = Arc::new(count_zeros(hi + 1.0, &policy)?);
    let used = zeros.len();
    if sigma == 0.5 {
        Ok((Box::new(CriticalLineArgument::new(zeros)), used))
    } else {
        Ok((Box::new(TrackedArgument::new(sigma, lo, hi + 1.0, Some(zeros), &policy)?), used))
    }
}

fn best_for(sign: i8, rows: &[&SweepRow]) -> (f64, f64) {
    let s = sign as f64;
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for r in rows {
        let v = s * r.delta;
        if v > best.1 || (v == best.1 && r.t < best.0) {
            best = (r.t, v);
        }
    }
    best
}

pub fn run_hunt(cfg: &ExperimentConfig) -> Result<HuntOutcome> {
    validate_hunt(cfg)?;
    let clock = Instant::now();
    let r = &cfg.run;
    let (n, sigma, big_t, h) = (r.n, r.sigma, r.big_t, r.shift());
    let policy = cfg.precision.policy();
    let start = big_t.powf(r.beta);
    let step = cfg.grid.step.unwrap_or_else(|| (1.0 / big_t.ln()).min(0.25 * h));
    let count = ((big_t - start) / step).floor() as usize + 1;
    let grid = SweepGrid { n, start, step, count, h, chunk: cfg.grid.chunk };
    let (src, zeros_used) = argument_source(sigma, start - 1.0, big_t + h + step, cfg)?;
    let anchor = |t: f64| iterate_state(n + 1, sigma, t, &policy);
    let rows = forward_sweep(&grid, src.as_ref(), anchor)?;

    let mut refined = Vec::new();
    if cfg.grid.refine_top > 0 {
        let fine = step / cfg.grid.refine_factor as f64;
        let mut centres: Vec<f64> = Vec::new();
        for sign in [1i8, -1] {
            let mut order: Vec<&SweepRow> = rows.iter().collect();
            order.sort_by(|a, b| (sign as f64 * b.delta).total_cmp(&(sign as f64 * a.delta)).then(a.t.total_cmp(&b.t)));
            centres.extend(order.iter().take(cfg.grid.refine_top).map(|row| row.t));
        }
        centres.sort_by(f64::total_cmp);
        centres.dedup();
        for c in centres {
            let lo = (c - step).max(start);
            let hi = (c + step).min(big_t);
            let m = ((hi - lo) / fine).floor() as usize + 1;
            let sub = SweepGrid { n, start: lo, step: fine, count: m, h, chunk: m };
            refined.extend(forward_sweep(&sub, src.as_ref(), anchor)?);
        }
    }

    let all: Vec<&SweepRow> = rows.iter().chain(refined.iter()).collect();
    let scale = theoretical_scale(n, h, big_t);
    let by_sign: Vec<SignBest> = [1i8, -1]
        .into_iter()
        .map(|sign| {
            let (best_t, best_value) = best_for(sign, &all);
            let s = sign as f64;
            let mean_value_bound = all.iter().map(|row| s * row.mean_next).fold(f64::NEG_INFINITY, f64::max);
            let sampled_max = all
                .iter()
                .map(|row| if sign > 0 { row.sample_max } else { -row.sample_min })
                .fold(f64::NEG_INFINITY, f64::max);
            SignBest {
                sign,
                admissible: check_sign(IterateOrder::new(n).expect("validated"), sign, SignContext::VariationThm)
                    .is_ok(),
                best_t,
                best_value,
                ratio: best_value / scale,
                mean_value_bound,
                sampled_max,
            }
        })
        .collect();
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for row in &all {
        if !row.mean_value_holds(row.est_error) {
            violations += 1;
        }
        let slack = row.quad_gap + row.est_error;
        let margin = (row.mean_next - row.sample_max).max(row.sample_min - row.mean_next);
        if slack > 0.0 {
            worst = worst.max(margin / slack);
        } else if margin > 0.0 {
            worst = f64::INFINITY;
        }
    }
    let chosen = by_sign.iter().find(|b| b.sign == r.sign).copied().expect("both signs evaluated");
    let report = HuntReport {
        n,
        sigma,
        big_t,
        beta: r.beta,
        h,
        sign: r.sign,
        best_t: chosen.best_t,
        best_value: chosen.best_value,
        theoretical_scale: scale,
        ratio: chosen.ratio,
        by_sign,
        grid: GridStats {
            start,
            end: grid.point(count - 1),
            step,
            count,
            chunk: cfg.grid.chunk,
            refined_points: refined.len(),
            zeros_used,
            max_est_error: all.iter().map(|row| row.est_error).fold(0.0, f64::max),
        },
        mean_value: MeanValueCheck { checked: all.len(), violations, worst_margin: worst },
        wall_time_s: clock.elapsed().as_secs_f64(),
    };
    Ok(HuntOutcome { report, rows, refined })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_by_hand() {
        let big_t: f64 = 1e6;
        let l1 = big_t.ln();
        let l2 = l1.ln();
        let l3 = l2.ln();
        let h = 1.0 / l2;
        let want = h * (l1 * l3).sqrt() / l2.sqrt();
        assert!((theoretical_scale(1, h, big_t) - want).abs() < 1e-15 * want);
    }

    #[test]
    fn rejects_bad_sign_and_low_h() {
        let mut c = ExperimentConfig::default();
        c.run.n = 2;
        c.run.sign = -1;
        assert!(matches!(validate_hunt(&c), Err(Error::InvalidSign { .. })));
        c.run.n = 0;
        assert!(matches!(validate_hunt(&c), Err(Error::InvalidConfig(_))));
        c.run.sign = -1;
        c.run.h = Some(0.01);
        assert!(matches!(validate_hunt(&c), Err(Error::InvalidConfig(_))));
        c.run.h = Some(0.3);
        assert!(validate_hunt(&c).is_ok());
    }
}
