use proptest::prelude::*;
use zetalab::iterates::*;
use zetalab::zeta::{count_zeros, CriticalStripPoint, PrecisionPolicy};

fn ord(n: u32) -> IterateOrder {
    IterateOrder::new(n).unwrap()
}

fn pt(sigma: f64, t: f64) -> CriticalStripPoint {
    CriticalStripPoint::new(sigma, t).unwrap()
}

#[test]
fn routes_agree_on_lattice() {
    let p = PrecisionPolicy::with_target(1e-9);
    for n in 1..=3 {
        for sigma in [0.5, 0.55, 0.6] {
            for t in [10.0, 20.0, 30.0, 50.0] {
                let a = sn_value(ord(n), pt(sigma, t), Route::Representation, &p).unwrap();
                let b = sn_value(ord(n), pt(sigma, t), Route::Recursive, &p).unwrap();
                let gap = (a.value - b.value).abs();
                assert!(
                    gap <= a.est_error + b.est_error,
                    "n={n} sigma={sigma} t={t}: {} vs {} (gap {gap:e}, budget {:e})",
                    a.value,
                    b.value,
                    a.est_error + b.est_error
                );
            }
        }
    }
}

#[test]
fn first_iterate_on_line_is_log_modulus_integral() {
    // i^1 rotates log zeta onto its real part
    let p = PrecisionPolicy::with_target(1e-9);
    let t = 25.0;
    let q = zetalab::numeric::adaptive_gauss_legendre(
        |v| {
            let z = zetalab::zeta::zeta_eval(num_complex::Complex64::new(v, t), &p.inner())?;
            Ok(z.norm().ln())
        },
        0.5,
        60.0,
        1e-10,
        16,
        1_000_000,
    )
    .unwrap();
    let v = sn_value(ord(1), pt(0.5, t), Route::Representation, &p).unwrap();
    assert!((v.value - q.value / std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn iterates_tend_to_delta_at_zero_height() {
    let p = PrecisionPolicy::with_target(1e-9);
    for n in 1..=3 {
        for sigma in [0.5, 0.75] {
            let d = delta_constant(ord(n), sigma, &p).unwrap().value;
            let v = sn_value(ord(n), pt(sigma, 1e-3), Route::Representation, &p).unwrap().value;
            assert!((v - d).abs() < 5e-3, "n={n} sigma={sigma}: {v} vs {d}");
        }
    }
}

#[test]
fn first_delta_certified_by_two_schemes() {
    let p = PrecisionPolicy::with_target(1e-10);
    let a = delta_constant_with(ord(1), 0.5, DeltaScheme::GradedPanels, &p).unwrap();
    let b = delta_constant_with(ord(1), 0.5, DeltaScheme::Subtraction, &p).unwrap();
    assert!((a.value - b.value).abs() <= 1e-8);
    assert!(a.est_error <= 1e-8 && b.est_error <= 1e-8);
}

#[test]
fn shift_difference_on_line_matches_quadrature() {
    let p = PrecisionPolicy::with_target(1e-10);
    let (t, h) = (40.0, 0.3);
    let d = delta_h_sn(ord(1), pt(0.5, t), h, Route::Recursive, &p).unwrap();
    let zeros = count_zeros(41.0, &p).unwrap();
    let mut edges = vec![t - h];
    edges.extend(zeros.between(t - h, t + h));
    edges.push(t + h);
    let mut direct = 0.0;
    for w in edges.windows(2) {
        direct += zetalab::numeric::adaptive_gauss_legendre(
            |x| s_value(pt(0.5, x), &p),
            w[0] + 1e-7,
            w[1] - 1e-7,
            1e-9,
            10,
            100_000,
        )
        .unwrap()
        .value;
    }
    assert!((d - direct).abs() < 1e-5, "{d} vs {direct}");
    assert_eq!(delta_h_sn(ord(2), pt(0.5, t), 0.0, Route::Recursive, &p).unwrap(), 0.0);
}

#[test]
fn strip_representation_residual_shrinks_with_h() {
    let p = PrecisionPolicy::with_target(1e-10);
    let at = pt(0.6, 33.0);
    let mut prev = f64::INFINITY;
    for h in [1e-1, 1e-2, 1e-3, 1e-4] {
        let direct = delta_h_sn(ord(1), at, h, Route::Representation, &p).unwrap();
        let strip = delta_h_sn_strip(ord(1), at, h, &p).unwrap();
        let r = (direct - strip).abs();
        assert!(r <= prev * 0.5 || r < 1e-9, "h={h}: residual {r:e} vs previous {prev:e}");
        prev = r;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn even_deltas_alternate_and_shrink(sigma in 0.5f64..0.999, k in 1u32..4) {
        let p = PrecisionPolicy::default();
        let a = delta_constant(ord(2 * k), sigma, &p).unwrap().value;
        let b = delta_constant(ord(2 * k + 2), sigma, &p).unwrap().value;
        prop_assert!(a * b < 0.0);
        prop_assert!(b.abs() < a.abs());
    }

    #[test]
    fn shift_pairs_respect_bounds(t in 0.0f64..10.0, h in -0.5f64..1.5) {
        let ok = ShiftPair::new(t, h).is_ok();
        prop_assert_eq!(ok, (0.0..=1.0).contains(&h) && t - h > 0.0);
    }
}
