//! Spectral weights and the integral transforms built from them.

mod hline;
pub mod hstar;
pub mod kernels;
pub mod line;
pub mod psi_hat;
pub mod weight;

pub use psi_hat::{log_polynomial_fit, psi_hat, psi_hat_at_one_tanh, psi_hat_derivatives_at_1, psi_hat_derivatives_up_to, psi_hat_direct, psi_hat_via_hstar};
pub use kernels::{psi_kernel, psi_minus, psi_plus, transform_g_k, transform_h0, transform_h1, u_nu, u_nu_bound, u_nu_on_line, LineKernels, DEFAULT_DELTA, DEFAULT_LAMBDA_C, DEFAULT_N1};
pub use line::{vertical_line_integral, Symmetry};
pub use hstar::{h_star, h_star_detailed, HStarCache, HStarValue};
pub use weight::{weight_eval, GaussianWeight, Prefactor, DEFAULT_Q_CONSTANT};
