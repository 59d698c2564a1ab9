//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zetalab::arith::{combined_kernel, i_pow, sign_table, KernelParams, SignContext};
use zetalab::convolution::lemma22_eval;
use zetalab::experiment::{emit_outputs, replay, run_experiment, ExperimentConfig, ExperimentKind, ExperimentReport};
use zetalab::iterates::{delta_constant, delta_constant_with, s_value, sn_value, DeltaScheme, IterateOrder, Route};
use zetalab::resonator::{
    build_resonator, error_sum_check, gaussian_moment, grid_point, MomentRequest, MomentWeight, PrimeWindow,
    ResonatorSpec,
};
use zetalab::zeta::{count_zeros, rvm_main, CriticalStripPoint, PrecisionPolicy};

type Outcome = Result<String, String>;

fn ord(n: u32) -> IterateOrder {
    IterateOrder::new(n).unwrap()
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn c1_zero_counts() -> Outcome {
    let clock = Instant::now();
    let p = PrecisionPolicy::with_target(1e-10);
    let mut parts = Vec::new();
    for t in [30.0, 50.0, 100.0] {
        let counted = count_zeros(t, &p).map_err(|e| e.to_string())?.count_below(t);
        let s = s_value(CriticalStripPoint::new(0.5, t).unwrap(), &p).map_err(|e| e.to_string())?;
        let rebuilt = (rvm_main(t) + s).round() as usize;
        ensure(rebuilt == counted, format!("t={t}: round(main + S) = {rebuilt}, sign changes {counted}"))?;
        parts.push(format!("N({t})={counted}"));
    }
    let took = clock.elapsed();
    ensure(took < Duration::from_secs(120), format!("took {took:?}"))?;
    Ok(format!("{} in {:.1}s", parts.join(" "), took.as_secs_f64()))
}

fn c2_routes() -> Outcome {
    let clock = Instant::now();
    let p = PrecisionPolicy::with_target(1e-9);
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        for sigma in [0.5, 0.55, 0.6] {
            for t in [10.0, 20.0, 30.0, 50.0] {
                let at = CriticalStripPoint::new(sigma, t).unwrap();
                let a = sn_value(ord(n), at, Route::Representation, &p).map_err(|e| e.to_string())?;
                let b = sn_value(ord(n), at, Route::Recursive, &p).map_err(|e| e.to_string())?;
                let gap = (a.value - b.value).abs();
                ensure(gap < 1e-6, format!("n={n} sigma={sigma} t={t}: gap {gap:e}"))?;
                worst = worst.max(gap);
            }
        }
    }
    let took = clock.elapsed();
    ensure(took < Duration::from_secs(600), format!("took {took:?}"))?;
    Ok(format!("max gap {worst:.2e} over 36 points in {:.1}s", took.as_secs_f64()))
}

fn c3_deltas() -> Outcome {
    let p = PrecisionPolicy::with_target(1e-10);
    let d2 = delta_constant(ord(2), 0.5, &p).map_err(|e| e.to_string())?.value;
    let d4 = delta_constant(ord(4), 0.5, &p).map_err(|e| e.to_string())?.value;
    ensure((d2 - 0.125).abs() <= 2.0 * f64::EPSILON * 0.125, format!("delta_2 = {d2:e}"))?;
    ensure((d4 + 1.0 / 384.0).abs() <= 2.0 * f64::EPSILON / 384.0, format!("delta_4 = {d4:e}"))?;
    let a = delta_constant_with(ord(1), 0.5, DeltaScheme::GradedPanels, &p).map_err(|e| e.to_string())?.value;
    let b = delta_constant_with(ord(1), 0.5, DeltaScheme::Subtraction, &p).map_err(|e| e.to_string())?.value;
    ensure((a - b).abs() < 1e-8, format!("delta_1 schemes {a} vs {b}"))?;
    Ok(format!("delta_2={d2}, delta_4={d4:e}, delta_1 {a:.12} vs {b:.12}"))
}

fn c4_lemma22() -> Outcome {
    let p = PrecisionPolicy::with_target(1e-9);
    let mut worst: f64 = 0.0;
    for t in [1000.0, 1500.0, 2000.0] {
        for h in [0.0, 0.01, 0.05] {
            let r = lemma22_eval(0.75, t, h, 1.0, 0.0, 1e4, &p).map_err(|e| e.to_string())?;
            ensure(
                r.within_budget(),
                format!("t={t} h={h}: residual {:e} > {:e}", r.residual.norm(), r.quad_error + r.paper_error_budget),
            )?;
            if h == 0.0 {
                ensure(
                    r.rhs == Complex64::new(0.0, 0.0) && r.lhs.norm() <= r.quad_error,
                    format!("t={t}: h=0 lhs {:e}", r.lhs.norm()),
                )?;
            } else {
                worst = worst.max(r.residual.norm() / (r.quad_error + r.paper_error_budget));
            }
        }
    }
    Ok(format!("9 points, worst residual/budget {worst:.2e}"))
}

fn c5_phases() -> Outcome {
    let i = Complex64::new(0.0, 1.0);
    for n in 0..=7u32 {
        for k in [n + 3, n + 2] {
            let direct = (0..k).fold(Complex64::new(1.0, 0.0), |acc, _| acc * i);
            ensure(i_pow(k) == direct, format!("i^{k}"))?;
        }
        let pm: BTreeSet<i8> = [-1, 1].into();
        let var: BTreeSet<i8> = if n % 2 == 0 { [(-1f64).powi((n as i32 + 2) / 2) as i8].into() } else { pm.clone() };
        let cor: BTreeSet<i8> = if n % 2 == 1 { [(-1f64).powi((n as i32 + 3) / 2) as i8].into() } else { pm.clone() };
        ensure(sign_table(ord(n), SignContext::VariationThm) == var, format!("variation table n={n}"))?;
        ensure(sign_table(ord(n), SignContext::OmegaCor) == cor, format!("corollary table n={n}"))?;
        // the parity reductions used when choosing the kernel
        if n % 2 == 1 {
            ensure(i_pow(n + 2) == (-1f64).powi((n as i32 + 1) / 2) * i, format!("i^(n+2) n={n}"))?;
        } else {
            ensure(i_pow(n + 3) == (-1f64).powi((n as i32 + 2) / 2) * i, format!("i^(n+3) n={n}"))?;
        }
    }
    Ok("n = 0..7 prefactors and both sign tables".into())
}

fn c6_kernel_signs() -> Outcome {
    let big_t = 1e4f64;
    let range = big_t.ln().powi(3);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for (gamma, delta, dp) in
        [(0.125, 1, 1), (0.125, 1, -1), (0.125, -1, 1), (0.125, -1, -1), (2.0 / 3.0, 1, 0), (2.0 / 3.0, -1, 0)]
    {
        let kp = KernelParams::new(gamma, delta, dp, big_t).map_err(|e| e.to_string())?;
        for _ in 0..100_000 {
            let u: f64 = rng.gen_range(-range..range);
            let k = combined_kernel(u, &kp);
            ensure(delta as f64 * k >= 0.0, format!("delta={delta} delta'={dp} u={u}: {k}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} samples, 0 failures"))
}

const TEST_PRIMES: [u64; 8] = [11, 13, 17, 19, 101, 103, 107, 109];

fn spec(big_t: f64, beta: f64, sigma: f64, primes: &[u64]) -> ResonatorSpec {
    ResonatorSpec {
        window_override: Some(PrimeWindow::Primes(primes.to_vec())),
        ..ResonatorSpec::new(big_t, beta, sigma)
    }
}

type Exhaustive = (Vec<u64>, Vec<(u64, f64)>, Vec<u64>, Vec<f64>);

/// (support, M, M', r) straight from the definitions.
fn exhaustive(big_t: f64, beta: f64, sigma: f64, primes: &[u64]) -> Exhaustive {
    let n = big_t.powf((1.0 - beta) / 2.0).floor();
    let (l1, l2) = (n.ln(), n.ln().ln());
    let l3 = l2.ln();
    let c = l1.powf(1.0 - sigma) * l2.powf(sigma) / l3.powf(1.0 - sigma);
    let f = |p: u64| c / ((p as f64).powf(sigma) * ((p as f64).ln() - l2 - l3));
    let kmax = l2.powf(0.125).floor() as u32;
    let mut support = Vec::new();
    let mut m = Vec::new();
    for mask in 0u32..(1 << primes.len()) {
        let chosen: Vec<u64> = (0..primes.len()).filter(|i| mask >> i & 1 == 1).map(|i| primes[i]).collect();
        let value: u64 = chosen.iter().product();
        support.push(value);
        let pruned = (1..=kmax).any(|k| {
            let kf = k as f64;
            let alpha = 3.0 * l1.powf(2.0 - 2.0 * sigma) / (kf * kf * l3.powf(2.0 - 2.0 * sigma));
            let (lo, hi) = (kf.exp() * l1 * l2, (kf + 1.0).exp() * l1 * l2);
            chosen.iter().filter(|&&p| (p as f64) > lo && (p as f64) <= hi).count() as f64 >= alpha
        });
        if !pruned {
            m.push((value, chosen.iter().map(|&p| f(p)).product::<f64>()));
        }
    }
    support.sort_unstable();
    m.sort_by_key(|x| x.0);
    let cell = |x: u64| -> i64 {
        let (mut lo, mut hi) = (0i64, 1i64 << 40);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if grid_point(big_t, mid) <= x as f64 {
                lo = mid
            } else {
                hi = mid
            }
        }
        lo
    };
    let mut m_prime = Vec::new();
    let mut r = Vec::new();
    for &(x, _) in &m {
        let j = cell(x);
        if m.iter().any(|&(y, _)| y < x && cell(y) == j) {
            continue;
        }
        m_prime.push(x);
        let (lo, hi) = (grid_point(big_t, j - 1), grid_point(big_t, j + 2));
        r.push(
            m.iter().filter(|&&(y, _)| y as f64 >= lo && y as f64 <= hi).map(|&(_, fy)| fy * fy).sum::<f64>().sqrt(),
        );
    }
    (support, m, m_prime, r)
}

fn c7_resonator() -> Outcome {
    let mut windows = 0;
    for (big_t, beta, sigma) in [(300.0, 0.0, 1.0), (1e4, 0.3, 0.5)] {
        for mask in 1u32..256 {
            if mask.count_ones() > 6 {
                continue;
            }
            let w: Vec<u64> = (0..8).filter(|i| mask >> i & 1 == 1).map(|i| TEST_PRIMES[i]).collect();
            let res = build_resonator(&spec(big_t, beta, sigma, &w)).map_err(|e| e.to_string())?;
            let (support, m, m_prime, r) = exhaustive(big_t, beta, sigma, &w);
            ensure(res.provenance.support_size == support.len(), format!("{w:?}: support size"))?;
            ensure(res.pruned_support.len() == m.len(), format!("{w:?}: |M|"))?;
            for (a, b) in res.pruned_support.iter().zip(&m) {
                ensure(a.0 == b.0 && (a.1 - b.1).abs() <= 1e-13 * b.1, format!("{w:?}: M element {}", a.0))?;
            }
            ensure(res.support == m_prime, format!("{w:?}: M' differs"))?;
            for (a, b) in res.coefficients.iter().zip(&r) {
                ensure((a - b).abs() <= 1e-13 * b, format!("{w:?}: r {a} vs {b}"))?;
            }
            windows += 1;
        }
    }
    let res = build_resonator(&spec(300.0, 0.0, 1.0, &[11, 13, 101, 103, 107, 109])).map_err(|e| e.to_string())?;
    let r0 = res.evaluate(0.0).re;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let t: f64 = rng.gen_range(-1e5..1e5);
        ensure(res.evaluate(t).norm() <= r0 * (1.0 + 1e-12), format!("|R({t})| > R(0)"))?;
    }
    let mut worst: f64 = 0.0;
    for big_t in [300.0, 1e4] {
        let res = build_resonator(&spec(big_t, 0.0, 0.5, &TEST_PRIMES[4..])).map_err(|e| e.to_string())?;
        let got = gaussian_moment(&res, &MomentRequest { big_t, sigma: 0.5, weight: MomentWeight::Unit })
            .map_err(|e| e.to_string())?
            .value;
        let mut want = 0.0;
        for (&a, &ra) in res.support.iter().zip(&res.coefficients) {
            for (&b, &rb) in res.support.iter().zip(&res.coefficients) {
                let x = (a as f64 / b as f64).ln();
                want += ra * rb * (-0.5 * big_t * big_t * x * x).exp();
            }
        }
        want *= big_t * (2.0 * std::f64::consts::PI).sqrt();
        let rel = (got - want).abs() / want;
        ensure(rel < 1e-8, format!("T={big_t}: moment relative error {rel:e}"))?;
        worst = worst.max(rel);
    }
    Ok(format!("{windows} windows exact, |R| <= R(0) on 10^4 t, moment rel err {worst:.1e}"))
}

fn c8_linearity() -> Outcome {
    let big_t = 1e4;
    let res = build_resonator(&spec(big_t, 0.3, 0.5, &[7, 11, 13])).map_err(|e| e.to_string())?;
    let kp = KernelParams::new(0.5, 1, 1, big_t).map_err(|e| e.to_string())?;
    // tent support m <= e^{2 alpha}; sin(h log m) within 1e-4 of h log m needs (h log m)^2/6 < 1e-4
    let m_top = (2.0 * kp.alpha).exp();
    ensure((1e-2 * m_top.ln()).powi(2) / 6.0 < 1e-4, "outside the linear regime")?;
    let mut worst: f64 = 0.0;
    for h in [1e-2, 1e-3, 1e-4] {
        let a = error_sum_check(&res, &kp, ord(1), 0.5, h, big_t).map_err(|e| e.to_string())?;
        let b = error_sum_check(&res, &kp, ord(1), 0.5, h / 2.0, big_t).map_err(|e| e.to_string())?;
        let dev = (a.lhs / b.lhs / 2.0 - 1.0).abs();
        ensure(dev < 1e-3, format!("h={h}: deviation {dev:e}"))?;
        worst = worst.max(dev);
    }
    Ok(format!("max relative deviation {worst:.2e}"))
}

struct Smoke {
    report: ExperimentReport,
    replay_identical: bool,
    seconds: f64,
}

fn smoke_hunt() -> Result<Smoke, String> {
    let cfg = ExperimentConfig::default();
    let clock = Instant::now();
    let (report, rows) = run_experiment(ExperimentKind::Hunt, &cfg).map_err(|e| e.to_string())?;
    let seconds = clock.elapsed().as_secs_f64();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = emit_outputs(&dir.path().join("first"), &report, &rows).map_err(|e| e.to_string())?;
    let text = fs::read_to_string(&first.report).map_err(|e| e.to_string())?;
    let loaded = ExperimentReport::from_json(&text).map_err(|e| e.to_string())?;
    let (again, again_rows) = replay(&loaded).map_err(|e| e.to_string())?;
    let second = emit_outputs(&dir.path().join("second"), &again, &again_rows).map_err(|e| e.to_string())?;
    let same = |a: &std::path::Path, b: &std::path::Path| fs::read(a).ok() == fs::read(b).ok();
    let replay_identical = same(&first.csv, &second.csv) && same(&first.report, &second.report);
    Ok(Smoke { report, replay_identical, seconds })
}

fn c9_mean_value(smoke: &Result<Smoke, String>) -> Outcome {
    let s = smoke.as_ref().map_err(|e| e.clone())?;
    let h = s.report.hunt.as_ref().ok_or("no hunt report")?;
    ensure(
        h.mean_value.violations == 0,
        format!("{} of {} rows violate", h.mean_value.violations, h.mean_value.checked),
    )?;
    Ok(format!("{} rows, worst margin/slack {:.2e}", h.mean_value.checked, h.mean_value.worst_margin))
}

fn c10_smoke(smoke: &Result<Smoke, String>) -> Outcome {
    let s = smoke.as_ref().map_err(|e| e.clone())?;
    let h = s.report.hunt.as_ref().ok_or("no hunt report")?;
    for b in &h.by_sign {
        ensure(b.admissible && b.best_value > 0.0, format!("sign {}: best {}", b.sign, b.best_value))?;
    }
    ensure(s.replay_identical, "replay differs")?;
    let best: Vec<String> =
        h.by_sign.iter().map(|b| format!("{:+}: {:.4} at t={:.3}", b.sign, b.best_value, b.best_t)).collect();
    Ok(format!("{} ({} points, {:.0}s), replay bit-identical", best.join(", "), h.grid.count, s.seconds))
}

fn run(id: u32, name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let clock = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into()))
    });
    let secs = clock.elapsed().as_secs_f64();
    match outcome {
        Ok(msg) => {
            println!("criterion {id:>2} PASS  {name}: {msg} [{secs:.1}s]");
            true
        }
        Err(msg) => {
            println!("criterion {id:>2} FAIL  {name}: {msg} [{secs:.1}s]");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= run(1, "zero-count reconciliation", c1_zero_counts);
    ok &= run(2, "cross-route iterates", c2_routes);
    ok &= run(3, "delta constants", c3_deltas);
    ok &= run(4, "log zeta convolution identity", c4_lemma22);
    ok &= run(5, "phase and sign tables", c5_phases);
    ok &= run(6, "kernel sign-definiteness", c6_kernel_signs);
    ok &= run(7, "resonator brute force", c7_resonator);
    ok &= run(8, "error sum linear in h", c8_linearity);
    let smoke = catch_unwind(smoke_hunt).unwrap_or_else(|_| Err("smoke hunt panicked".into()));
    ok &= run(9, "mean-value inequality on hunt rows", || c9_mean_value(&smoke));
    ok &= run(10, "smoke hunt", || c10_smoke(&smoke));
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
