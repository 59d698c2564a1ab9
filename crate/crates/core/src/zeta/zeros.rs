//! Hardy Z function and a zero counter on the critical line.
//!
//! Zeros are located by sign changes of Z on a grid a quarter of the mean
//! zero spacing wide, refined by the Illinois method. Completeness is checked
//! block by block against theta(t)/pi + 1 + S(t), with S taken from the
//! Littlewood path, so a missed pair of close zeros shows up as an integer
//! mismatch and triggers a finer rescan.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{log_zeta_littlewood_path, zeta_eval, CriticalStripPoint, PrecisionPolicy};
use crate::error::{Error, Result};
use crate::numeric::ln_gamma;

const BLOCK_WIDTH: f64 = 40.0;
const MAX_RESCANS: u32 = 8;

/// Riemann–Siegel theta: Im ln Gamma(1/4 + i t/2) - (t/2) ln pi.
pub fn theta(t: f64) -> f64 {
    if t < 0.0 {
        return -theta(-t);
    }
    ln_gamma(Complex64::new(0.25, 0.5 * t)).im - 0.5 * t * PI.ln()
}

/// Z(t) = exp(i theta(t)) zeta(1/2 + i t), real for real t.
pub fn hardy_z(t: f64, policy: &PrecisionPolicy) -> Result<f64> {
    let z = zeta_eval(Complex64::new(0.5, t), policy)?;
    let (s, c) = theta(t).sin_cos();
    Ok(c * z.re - s * z.im)
}

/// Smooth main term t/2pi log(t/2pi) - t/2pi + 7/8.
pub fn rvm_main(t: f64) -> f64 {
    let x = t / TAU;
    x * x.ln() - x + 0.875
}

/// A sign change of Z that brackets one ordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignBracket {
    pub lo: f64,
    pub hi: f64,
    pub z_lo: f64,
    pub z_hi: f64,
}

/// Count reconciliation at the end of a scan block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockCheck {
    pub t: f64,
    pub counted: f64,
    /// theta(t)/pi + 1 + S(1/2, t)
    pub formula: f64,
    pub step: f64,
    pub rescans: u32,
}

/// How the ordinates were certified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ZeroScanCertificate {
    pub brackets: Vec<SignBracket>,
    pub blocks: Vec<BlockCheck>,
    pub z_evaluations: usize,
    /// End of the last reconciled block.
    pub scanned_to: f64,
}

/// Ascending zero ordinates in (0, t_max].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ZeroOrdinateList {
    pub t_max: f64,
    pub ordinates: Vec<f64>,
    pub method: ZeroScanCertificate,
}

impl ZeroOrdinateList {
    /// Ordinates closer than this to `t` are treated as sitting at `t`.
    pub fn tie_tolerance(t: f64) -> f64 {
        1e-9 * (1.0 + t.abs())
    }

    /// N(t) with weight 1/2 for an ordinate at t.
    pub fn count(&self, t: f64) -> f64 {
        let tol = Self::tie_tolerance(t);
        let below = self.ordinates.partition_point(|&g| g < t - tol);
        let upto = self.ordinates.partition_point(|&g| g <= t + tol);
        below as f64 + 0.5 * (upto - below) as f64
    }

    /// Number of ordinates strictly below `t`.
    pub fn count_below(&self, t: f64) -> usize {
        self.ordinates.partition_point(|&g| g < t)
    }

    /// S(1/2, t) = N(t) - 1 - theta(t)/pi, valid for 0 < t <= t_max.
    pub fn s_on_line(&self, t: f64) -> f64 {
        self.count(t) - 1.0 - theta(t) / PI
    }

    /// Ordinates inside the open interval (a, b).
    pub fn between(&self, a: f64, b: f64) -> &[f64] {
        let lo = self.ordinates.partition_point(|&g| g <= a);
        let hi = self.ordinates.partition_point(|&g| g < b);
        &self.ordinates[lo..hi.max(lo)]
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }
}

fn scan_step(t: f64) -> f64 {
    0.25 * TAU / (t / TAU).ln().max(1.0)
}

fn illinois(lo: f64, hi: f64, z_lo: f64, z_hi: f64, policy: &PrecisionPolicy, evals: &mut usize) -> Result<f64> {
    let (mut a, mut b, mut fa, mut fb) = (lo, hi, z_lo, z_hi);
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= 1e-13 * (1.0 + b.abs()) {
            break;
        }
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a && c < b { c } else { 0.5 * (a + b) };
        let fc = hardy_z(c, policy)?;
        *evals += 1;
        if fc == 0.0 {
            return Ok(c);
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Ordinates found by sign changes in (a, b], with their brackets.
fn scan_block(
    a: f64,
    b: f64,
    step: f64,
    policy: &PrecisionPolicy,
    evals: &mut usize,
) -> Result<(Vec<f64>, Vec<SignBracket>)> {
    let pieces = ((b - a) / step).ceil().max(1.0) as usize;
    let h = (b - a) / pieces as f64;
    let mut roots = Vec::new();
    let mut brackets = Vec::new();
    let mut x0 = a;
    let mut z0 = hardy_z(a, policy)?;
    *evals += 1;
    for i in 1..=pieces {
        let x1 = if i == pieces { b } else { a + h * i as f64 };
        let z1 = hardy_z(x1, policy)?;
        *evals += 1;
        if z1 == 0.0 {
            roots.push(x1);
            brackets.push(SignBracket { lo: x1, hi: x1, z_lo: 0.0, z_hi: 0.0 });
        } else if z0 != 0.0 && (z0 > 0.0) != (z1 > 0.0) {
            roots.push(illinois(x0, x1, z0, z1, policy, evals)?);
            brackets.push(SignBracket { lo: x0, hi: x1, z_lo: z0, z_hi: z1 });
        }
        x0 = x1;
        z0 = z1;
    }
    Ok((roots, brackets))
}

/// Extends `list` by whole blocks until it covers `until`.
///
/// Blocks have fixed edges (multiples of the block width), so every
/// ordinate is independent of how far the scan was asked to go.
fn extend_scan(list: &mut ZeroOrdinateList, until: f64, policy: &PrecisionPolicy) -> Result<()> {
    let mut a = list.method.scanned_to;
    while a < until {
        let b = a + BLOCK_WIDTH;
        let base_step = scan_step(b);
        let mut rescans = 0;
        loop {
            let step = base_step / f64::powi(2.0, rescans as i32);
            let (roots, brackets) = scan_block(a, b, step, policy, &mut list.method.z_evaluations)?;
            // a root sitting exactly on the shared edge was already recorded
            let fresh: Vec<(f64, SignBracket)> = roots
                .into_iter()
                .zip(brackets)
                .filter(|(g, _)| *g > 0.0 && list.ordinates.last().map_or(true, |&l| *g > l))
                .collect();
            let before = list.ordinates.len();
            list.ordinates.extend(fresh.iter().map(|(g, _)| *g));
            let counted = list.count(b);
            let s = log_zeta_littlewood_path(CriticalStripPoint::new(0.5, b)?, policy)?.arg_over_pi;
            let formula = theta(b) / PI + 1.0 + s;
            if (counted - formula).abs() < 0.5 {
                list.method.brackets.extend(fresh.into_iter().map(|(_, br)| br));
                list.method.blocks.push(BlockCheck { t: b, counted, formula, step, rescans });
                break;
            }
            list.ordinates.truncate(before);
            rescans += 1;
            if rescans > MAX_RESCANS {
                return Err(Error::ReconciliationFailure { t: b, counted, formula });
            }
        }
        a = b;
        list.method.scanned_to = b;
    }
    list.t_max = list.method.scanned_to;
    Ok(())
}

fn policy_key(policy: &PrecisionPolicy) -> (u64, u64) {
    (policy.target_abs_error.to_bits(), policy.max_series_terms as u64)
}

/// Zero ordinates in (0, t_max] with a reconciliation certificate.
///
/// Scans are memoised per precision target. Because block edges are fixed,
/// a memoised scan returns bit-identical ordinates to a fresh one.
pub fn count_zeros(t_max: f64, policy: &PrecisionPolicy) -> Result<ZeroOrdinateList> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), ZeroOrdinateList>>> = OnceLock::new();
    policy.validate()?;
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidConfig(format!("t_max = {t_max} must be finite and >= 0")));
    }
    if t_max == 0.0 {
        return Ok(ZeroOrdinateList::default());
    }
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut full = {
        let guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard.get(&policy_key(policy)).cloned().unwrap_or_default()
    };
    if full.method.scanned_to < t_max {
        extend_scan(&mut full, t_max, policy)?;
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        let slot = guard.entry(policy_key(policy)).or_default();
        if slot.method.scanned_to < full.method.scanned_to {
            *slot = full.clone();
        }
    }
    let keep = full.ordinates.partition_point(|&g| g <= t_max + ZeroOrdinateList::tie_tolerance(t_max));
    let mut out = ZeroOrdinateList {
        t_max,
        ordinates: full.ordinates[..keep].to_vec(),
        method: ZeroScanCertificate {
            brackets: full.method.brackets[..keep].to_vec(),
            blocks: full.method.blocks.iter().filter(|b| b.t - BLOCK_WIDTH < t_max).copied().collect(),
            z_evaluations: full.method.z_evaluations,
            scanned_to: full.method.scanned_to,
        },
    };
    // final reconciliation exactly at t_max
    let counted = out.count(t_max);
    let s = log_zeta_littlewood_path(CriticalStripPoint::new(0.5, t_max)?, policy)?.arg_over_pi;
    let formula = theta(t_max) / PI + 1.0 + s;
    if (counted - formula).abs() >= 0.5 {
        return Err(Error::ReconciliationFailure { t: t_max, counted, formula });
    }
    out.method.blocks.push(BlockCheck { t: t_max, counted, formula, step: 0.0, rescans: 0 });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pol() -> PrecisionPolicy {
        PrecisionPolicy::with_target(1e-10)
    }

    #[test]
    fn theta_reference_values() {
        // theta(t)/pi + 1 - main(t): 0.0037 at t = 2, 6.6e-5 at t = 100 (mpmath)
        assert!((theta(2.0) / PI + 1.0 - rvm_main(2.0) - 0.0037).abs() < 1e-4);
        assert!((theta(100.0) / PI + 1.0 - rvm_main(100.0) - 6.6e-5).abs() < 1e-6);
        assert_eq!(theta(0.0), 0.0);
    }

    #[test]
    fn z_is_real_and_vanishes_at_first_zero() {
        let g1 = 14.134725141734693;
        assert!(hardy_z(g1, &pol()).unwrap().abs() < 1e-8);
        let z = zeta_eval(Complex64::new(0.5, 20.0), &pol()).unwrap();
        let rot = Complex64::from_polar(1.0, theta(20.0)) * z;
        assert!(rot.im.abs() < 1e-9);
    }

    #[test]
    fn small_ranges() {
        assert!(count_zeros(0.0, &pol()).unwrap().is_empty());
        assert!(count_zeros(14.0, &pol()).unwrap().is_empty());
        let one = count_zeros(15.0, &pol()).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one.ordinates[0] - 14.134725141734693).abs() < 1e-9);
    }

    #[test]
    fn first_ten_zeros() {
        let want = [
            14.134725141734693,
            21.022039638771555,
            25.010857580145688,
            30.424876125859513,
            32.935061587739189,
            37.586178158825671,
            40.918719012147495,
            43.327073280914999,
            48.005150881167159,
            49.773832477672302,
        ];
        let list = count_zeros(50.0, &pol()).unwrap();
        assert_eq!(list.len(), 10);
        for (g, w) in list.ordinates.iter().zip(want) {
            assert!((g - w).abs() < 1e-9, "{g} vs {w}");
        }
        assert_eq!(list.count(30.0), 3.0);
        assert_eq!(list.count(want[2]), 2.5);
    }

    #[test]
    fn s_from_zero_list_matches_path() {
        let list = count_zeros(60.0, &pol()).unwrap();
        for &t in &[20.0, 33.3, 59.0] {
            let s = log_zeta_littlewood_path(CriticalStripPoint::new(0.5, t).unwrap(), &pol()).unwrap();
            assert!((list.s_on_line(t) - s.arg_over_pi).abs() < 1e-9, "t={t}");
        }
        assert!((list.s_on_line(20.0) + 0.3778003514).abs() < 1e-9);
    }
}
