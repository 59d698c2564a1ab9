//! Shared inputs for the benchmarks.

use zetalab::resonator::{PrimeWindow, ResonatorSpec};

/// The six-prime toy resonator used across benchmarks.
pub fn toy_spec() -> ResonatorSpec {
    ResonatorSpec {
        window_override: Some(PrimeWindow::Primes(vec![11, 13, 101, 103, 107, 109])),
        ..ResonatorSpec::new(1e4, 0.3, 0.5)
    }
}
