//! Numerical toolkit for spectral moments of Hecke series at the central point.
//!
//! Everything is computed in MPFR arithmetic at a precision fixed by an explicit
//! [`PrecisionContext`]. The modules mirror the main computational layers:
//! special functions, random-matrix moment coefficients, spectral integral
//! transforms, oscillatory integrals, critical-line moment integrals, the
//! explicit-formula terms with their residue main terms, and eigendata handling.

pub mod complex;
pub mod error;
pub mod precision;
pub mod quad;
pub mod rmt_coefficients;
pub mod special_functions;
pub mod moment_integrals;
pub mod motohashi_terms;
pub mod oscillatory;
pub mod spectral_data;
pub mod transforms;
pub mod verify;

pub use complex::ComplexValue;
pub use error::{HeckeError, Result};
pub use precision::{Estimate, PrecisionContext, TruncatedSeriesPolicy};
pub use rug::Float;
