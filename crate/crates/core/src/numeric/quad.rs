//! Gauss–Legendre and tanh–sinh rules.
//!
//! Rules are built once per order and cached. The adaptive driver bisects
//! panels and splits the absolute error budget evenly between halves.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const MAX_ORDER: usize = 128;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi's initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached `n`-point rule, 1 <= n <= 128.
pub fn gauss_legendre(n: usize) -> &'static GaussLegendre {
    static RULES: [OnceLock<GaussLegendre>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];
    assert!((1..=MAX_ORDER).contains(&n), "Gauss-Legendre order {n} out of range");
    RULES[n].get_or_init(|| GaussLegendre::compute(n))
}

/// Result of a quadrature with its error estimate and cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive bisection with a fixed Gauss–Legendre rule per panel.
///
/// A panel is accepted when the rule on the whole panel agrees with the sum
/// over its halves to within the panel's share of `tol`.
pub fn adaptive_gauss_legendre<F>(
    mut f: F,
    a: f64,
    b: f64,
    tol: f64,
    order: usize,
    max_evaluations: usize,
) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(Quadrature { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let rule = gauss_legendre(order);
    let mut evals = 0usize;
    let apply = |f: &mut F, lo: f64, hi: f64, evals: &mut usize| -> Result<f64> {
        let mut acc = 0.0;
        for (x, w) in rule.mapped(lo, hi) {
            acc += w * f(x)?;
        }
        *evals += rule.order();
        Ok(acc)
    };

    let whole = apply(&mut f, a, b, &mut evals)?;
    // Explicit stack keeps the summation order deterministic (left to right).
    let mut stack = vec![(a, b, whole, tol, 0u32)];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut accepted: Vec<(f64, f64, f64, f64)> = Vec::new();
    while let Some((lo, hi, coarse, budget, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = apply(&mut f, lo, mid, &mut evals)?;
        let right = apply(&mut f, mid, hi, &mut evals)?;
        let fine = left + right;
        let diff = (fine - coarse).abs();
        if diff <= budget || depth >= 48 || (hi - lo) < 1e-14 * (1.0 + lo.abs()) {
            accepted.push((lo, hi, fine, diff));
        } else {
            if evals > max_evaluations {
                return Err(Error::QuadratureBudgetExceeded(format!(
                    "{evals} evaluations on [{a}, {b}] without reaching tol {tol:e}"
                )));
            }
            stack.push((mid, hi, right, 0.5 * budget, depth + 1));
            stack.push((lo, mid, left, 0.5 * budget, depth + 1));
        }
    }
    accepted.sort_by(|x, y| x.0.total_cmp(&y.0));
    for (_, _, v, e) in accepted {
        value += v;
        error += e;
    }
    // panels stopped by the depth limit are only acceptable if the total
    // still meets the tolerance
    if error > tol + 1e-14 * value.abs() {
        return Err(Error::QuadratureBudgetExceeded(format!(
            "estimated error {error:e} on [{a}, {b}] exceeds tol {tol:e}"
        )));
    }
    Ok(Quadrature { value, error, evaluations: evals })
}

/// Double-exponential rule on [a, b]; tolerates integrable endpoint behaviour.
///
/// Levels are refined until two successive estimates agree to `tol`.
pub fn tanh_sinh<F>(mut f: F, a: f64, b: f64, tol: f64, max_level: u32) -> Result<Quadrature>
where
    F: FnMut(f64) -> Result<f64>,
{
    use std::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let t_max = 4.0;
    let mut evals = 0usize;
    // Sum over abscissae kh for k odd at each new level; level 0 uses all k.
    let mut eval_at = |t: f64, evals: &mut usize| -> Result<f64> {
        let sh = FRAC_PI_2 * t.sinh();
        let ch = sh.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        // distance from the nearer endpoint, computed without cancellation
        let dist = 1.0 / (sh.abs().exp() * ch);
        let point = if t == 0.0 {
            mid
        } else if t < 0.0 {
            a + half * dist
        } else {
            b - half * dist
        };
        if point <= a || point >= b || w == 0.0 {
            return Ok(0.0);
        }
        *evals += 1;
        Ok(w * f(point)?)
    };

    let mut h = 1.0;
    let mut sum = eval_at(0.0, &mut evals)?;
    let mut k = 1.0;
    while k * h <= t_max {
        sum += eval_at(k * h, &mut evals)? + eval_at(-k * h, &mut evals)?;
        k += 1.0;
    }
    let mut estimate = half * h * sum;
    for _level in 1..=max_level {
        h *= 0.5;
        let mut k = 1.0;
        while k * h <= t_max {
            sum += eval_at(k * h, &mut evals)? + eval_at(-k * h, &mut evals)?;
            k += 2.0;
        }
        let next = half * h * sum;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= tol {
            return Ok(Quadrature { value: estimate, error: diff, evaluations: evals });
        }
    }
    Err(Error::QuadratureBudgetExceeded(format!("tanh-sinh on [{a}, {b}] did not reach {tol:e} in {max_level} levels")))
}

/// Equal subdivision of each interval between consecutive breakpoints so that
/// no panel is wider than `max_width`; returns the panel edges.
pub fn panel_edges(breaks: &[f64], max_width: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let pieces = ((hi - lo) / max_width).ceil().max(1.0) as usize;
        let step = (hi - lo) / pieces as f64;
        for i in 0..pieces {
            let a = lo + step * i as f64;
            let b = if i + 1 == pieces { hi } else { lo + step * (i + 1) as f64 };
            out.push((a, b));
        }
    }
    out
}
