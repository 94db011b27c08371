//! Terms of the explicit formula for the cubic and quartic moments, and their residue main terms.

pub mod h_terms;
pub mod main_terms;
pub mod rj;

pub use h_terms::{
    h1_from_jet, h1_term, h2_h3_h4_terms, h2_h3_h4_with, h5_h6_terms, h5_h6_with, h_star_jet_at_half, h_term, SeriesTerms,
    TermValue, DEFAULT_PSI_BETA,
};
pub use main_terms::{
    assembled_leading_coefficient, cstar_divisor_sum, cstar_main_terms, default_shift, dstar_main_term, main_term_line_value,
    main_term_polynomial, main_term_residue_direct, MainTermKind, MainTermPolynomial,
};
pub use rj::{rj_correction, rj_correction_detailed};
