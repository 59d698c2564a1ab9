//! Prime power tables, tent weights, the sign-definite kernel, weighted
//! Dirichlet sums and the admissible sign tables.

mod sieve;

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iterates::IterateOrder;
use crate::numeric::pairwise_sum_complex;

pub use sieve::{lambda_sieve, PrimePowerTable};

/// Tent weight max{0, 2 alpha - |H - log m|}; ties at the edge give 0.
pub fn w_weight(m: u64, alpha: f64, h_shift: f64) -> f64 {
    (2.0 * alpha - (h_shift - (m as f64).ln()).abs()).max(0.0)
}

/// log log x.
pub fn log2(x: f64) -> f64 {
    x.ln().ln()
}

/// log log log x.
pub fn log3(x: f64) -> f64 {
    x.ln().ln().ln()
}

/// Parameters of the tent weights and the combined kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub alpha: f64,
    #[serde(rename = "H")]
    pub h_shift: f64,
    pub gamma: f64,
    pub delta: i8,
    pub delta_prime: i8,
    #[serde(rename = "log2T")]
    pub log2t: f64,
}

impl KernelParams {
    /// alpha = gamma log log T, H = 0, validated for admissibility.
    pub fn new(gamma: f64, delta: i8, delta_prime: i8, big_t: f64) -> Result<Self> {
        if !(big_t > std::f64::consts::E) {
            return Err(Error::InvalidConfig(format!("T = {big_t} must exceed e")));
        }
        let log2t = log2(big_t);
        let kp = KernelParams { alpha: gamma * log2t, h_shift: 0.0, gamma, delta, delta_prime, log2t };
        kp.validate()?;
        Ok(kp)
    }

    /// Either 0 < gamma <= 1/2 with delta' = +-1, or 1/2 < gamma <= 1 with delta' = 0.
    pub fn validate(&self) -> Result<()> {
        if self.delta != 1 && self.delta != -1 {
            return Err(Error::InvalidConfig(format!("delta = {} must be +-1", self.delta)));
        }
        let ok = if self.gamma > 0.0 && self.gamma <= 0.5 {
            self.delta_prime == 1 || self.delta_prime == -1
        } else if self.gamma > 0.5 && self.gamma <= 1.0 {
            self.delta_prime == 0
        } else {
            false
        };
        if !ok {
            return Err(Error::InvalidConfig(format!(
                "inadmissible kernel parameters gamma = {}, delta' = {}",
                self.gamma, self.delta_prime
            )));
        }
        if !(self.alpha > 0.0 && self.log2t > 0.0) {
            return Err(Error::InvalidConfig("alpha and log log T must be positive".into()));
        }
        Ok(())
    }
}

/// (sin(gamma u L)/u)^2 (3 delta + 2 delta' sin(u L)), L = log log T.
pub fn combined_kernel(u: f64, kp: &KernelParams) -> f64 {
    let a = kp.gamma * kp.log2t;
    if u == 0.0 {
        return 3.0 * kp.delta as f64 * a * a;
    }
    let fejer = ((a * u).sin() / u).powi(2);
    let factor = 3.0 * kp.delta as f64 + 2.0 * kp.delta_prime as f64 * (u * kp.log2t).sin();
    fejer * factor
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DirichletKind {
    /// Tent centred at H = 0.
    A,
    /// Tent centred at H = log log T.
    B,
}

/// sum_m c_m m^{-it} with real coefficients c_m over the tent support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedDirichletSum {
    pub kind: Option<DirichletKind>,
    /// (m, c_m) in ascending m
    pub terms: Vec<(u64, f64)>,
    pub value: Complex64,
}

/// sum_m Lambda(m) w_m(alpha, H) sin(h log m) / ((log m)^power m^{sigma+it}).
pub fn tent_sum(
    alpha: f64,
    h_shift: f64,
    sigma: f64,
    t: f64,
    h: f64,
    power: u32,
    table: &PrimePowerTable,
) -> Result<WeightedDirichletSum> {
    if !(h >= 0.0) {
        return Err(Error::InvalidConfig(format!("h = {h} must be >= 0")));
    }
    let top = h_shift + 2.0 * alpha;
    let needed_f = top.exp().floor();
    if needed_f > table.limit() as f64 {
        let needed = if needed_f >= u64::MAX as f64 { u64::MAX } else { needed_f as u64 };
        return Err(Error::TableTooSmall { needed, limit: table.limit() });
    }
    let lo = ((h_shift - 2.0 * alpha).exp().floor() as u64).max(2);
    let hi = needed_f as u64;
    let mut terms = Vec::new();
    let mut parts = Vec::new();
    for m in lo..=hi {
        let lam = table.lambda(m);
        if lam == 0.0 {
            continue;
        }
        let w = w_weight(m, alpha, h_shift);
        if w == 0.0 {
            continue;
        }
        let lm = (m as f64).ln();
        let c = lam * w * (h * lm).sin() / lm.powi(power as i32) * (-sigma * lm).exp();
        terms.push((m, c));
        parts.push(c * Complex64::from_polar(1.0, -t * lm));
    }
    Ok(WeightedDirichletSum { kind: None, terms, value: pairwise_sum_complex(&parts) })
}

/// The a_m (H = 0) or b_m (H = log log T) sum with power (log m)^{n+1}.
#[allow(clippy::too_many_arguments)]
pub fn dirichlet_sum(
    kind: DirichletKind,
    kp: &KernelParams,
    sigma: f64,
    t: f64,
    h: f64,
    n: IterateOrder,
    table: &PrimePowerTable,
) -> Result<WeightedDirichletSum> {
    let h_shift = match kind {
        DirichletKind::A => 0.0,
        DirichletKind::B => kp.log2t,
    };
    let mut s = tent_sum(kp.alpha, h_shift, sigma, t, h, n.get() + 1, table)?;
    s.kind = Some(kind);
    Ok(s)
}

/// i^k.
pub fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Which theorem's sign convention applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignContext {
    /// Variation of S_n: odd n free, even n forced to (-1)^{(n+2)/2}.
    VariationThm,
    /// Values of S_n: even n free, odd n forced to (-1)^{(n+3)/2}.
    OmegaCor,
}

/// Admissible signs delta_n.
pub fn sign_table(n: IterateOrder, context: SignContext) -> BTreeSet<i8> {
    let n = n.get();
    let forced = |e: u32| if e % 2 == 0 { 1 } else { -1 };
    match context {
        SignContext::VariationThm if n % 2 == 1 => [-1, 1].into(),
        SignContext::VariationThm => [forced((n + 2) / 2)].into(),
        SignContext::OmegaCor if n % 2 == 0 => [-1, 1].into(),
        SignContext::OmegaCor => [forced((n + 3) / 2)].into(),
    }
}

/// Rejects a sign outside the table.
pub fn check_sign(n: IterateOrder, sign: i8, context: SignContext) -> Result<()> {
    if sign_table(n, context).contains(&sign) {
        Ok(())
    } else {
        Err(Error::InvalidSign { n: n.get(), sign: sign as i32, context: format!("{context:?}") })
    }
}
