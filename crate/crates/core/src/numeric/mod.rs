//! Quadrature, special functions and reproducible summation shared by the
//! number-theoretic modules.

pub mod quad;
pub mod special;
pub mod sum;

pub use quad::{adaptive_gauss_legendre, gauss_legendre, tanh_sinh, GaussLegendre, Quadrature};
pub use special::{dawson, ln_gamma};
pub use sum::{pairwise_sum, pairwise_sum_complex};
