use std::time::Instant;

use zetalab::arith::KernelParams;
use zetalab::convolution::{lemma22_eval, prop24_eval};
use zetalab::iterates::IterateOrder;
use zetalab::zeta::PrecisionPolicy;

#[test]
fn lemma22_desk_scale() {
    let p = PrecisionPolicy::with_target(1e-9);
    for t in [1000.0, 1500.0, 2000.0] {
        for h in [0.0, 0.01, 0.05] {
            let clock = Instant::now();
            let r = lemma22_eval(0.75, t, h, 1.0, 0.0, 1e4, &p).unwrap();
            eprintln!(
                "t={t} h={h}: lhs={:.3e} rhs={:.3e} res={:.3e} quad={:.1e} budget={:.1e} ({:?})",
                r.lhs,
                r.rhs,
                r.residual.norm(),
                r.quad_error,
                r.paper_error_budget,
                clock.elapsed()
            );
            assert!(r.within_budget());
            if h == 0.0 {
                assert!(r.lhs.norm() <= r.quad_error && r.rhs.norm() == 0.0);
            }
        }
    }
}

#[test]
fn prop24_desk_scale() {
    let p = PrecisionPolicy::with_target(1e-9);
    let kp = KernelParams::new(0.125, 1, 1, 1e4).unwrap();
    for h in [0.0, 0.05, 0.2] {
        let clock = Instant::now();
        let r = prop24_eval(IterateOrder::new(1).unwrap(), 0.5, 2000.0, h, &kp, 1e4, &p).unwrap();
        eprintln!(
            "h={h}: lhs={:.4e} rhs={:.4e} res={:.3e} quad={:.1e} budget={:.1e} terms={} ({:?})",
            r.lhs.re,
            r.rhs.re,
            r.residual.norm(),
            r.quad_error,
            r.paper_error_budget,
            r.rhs_terms,
            clock.elapsed()
        );
        assert!(r.within_budget());
    }
}
