//! Complex gamma, zeta-family functions and elementary arithmetic functions.

pub mod arith;
pub mod bernoulli;
pub mod gamma;
pub mod zeta;

pub use arith::{
    d2_dirichlet_partial, divisor_d, divisors, kloosterman, kloosterman_batch, sigma_alpha, sigma_dirichlet_partial, sigma_minus_one,
};
pub use gamma::{gamma, gamma_ratio, log_gamma, stirling_phase};
pub use zeta::{
    e_rational, hurwitz_zeta, hurwitz_zeta_with_derivative, lerch_e, lerch_functional_rhs, riemann_zeta,
    riemann_zeta_with_derivative,
};

/// Upper bound assumed for the Lindelof exponent at the centre of the critical strip.
/// Recorded as an input assumption; it is never computed.
pub const LINDELOF_MU_HALF_BOUND: f64 = 1.0 / 6.0;
