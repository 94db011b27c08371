use rug::Float;
use serde::Serialize;

use crate::error::{HeckeError, Result};

/// Working precision and tolerances, passed explicitly to every numeric routine.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrecisionContext {
    /// Decimal digits of working precision (at least 30).
    pub digits: u32,
    /// Target relative error of composite quadratures and truncated series.
    pub rel_tol: f64,
    /// Default partial-sum length for Dirichlet series.
    pub series_cutoff: usize,
}

const GUARD_BITS: u32 = 24;

impl PrecisionContext {
    pub fn new(digits: u32, rel_tol: f64, series_cutoff: usize) -> Result<Self> {
        if digits < 30 {
            return Err(HeckeError::InvalidContext(format!("digits = {} < 30", digits)));
        }
        let floor = 10f64.powi(-(digits as i32) + 10);
        if !(rel_tol.is_finite() && rel_tol > 0.0) || rel_tol < floor {
            return Err(HeckeError::InvalidContext(format!(
                "rel_tol = {:e} must be >= 1e{}",
                rel_tol,
                -(digits as i32) + 10
            )));
        }
        if series_cutoff == 0 {
            return Err(HeckeError::InvalidContext("series_cutoff must be positive".into()));
        }
        Ok(PrecisionContext { digits, rel_tol, series_cutoff })
    }

    /// `digits` with the default tolerance `10^(-digits/2)`.
    pub fn with_digits(digits: u32) -> Result<Self> {
        Self::new(digits, 10f64.powi(-((digits / 2) as i32)), 10_000)
    }

    pub fn with_rel_tol(&self, rel_tol: f64) -> Result<Self> {
        Self::new(self.digits, rel_tol, self.series_cutoff)
    }

    /// Working precision in bits, including guard bits.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + GUARD_BITS
    }

    /// Unit roundoff of the working precision, as an `f64` (may underflow to 0 only for absurd digits).
    pub fn epsilon(&self) -> f64 {
        10f64.powi(-(self.digits as i32))
    }

    pub fn float(&self, x: f64) -> Float {
        Float::with_val(self.bits(), x)
    }

    /// Same context at a higher number of digits, for refinement oracles.
    pub fn refined(&self, extra_digits: u32) -> Self {
        PrecisionContext { digits: self.digits + extra_digits, ..self.clone() }
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext::with_digits(50).expect("default context is valid")
    }
}

/// Cutoff plus tail-bound rule for Euler products, Dirichlet partial sums and l-sums.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruncatedSeriesPolicy {
    pub cutoff: usize,
    /// Accept the truncation when `tail_bound <= tail_tol * |partial sum|`.
    pub tail_tol: f64,
}

impl TruncatedSeriesPolicy {
    pub fn new(cutoff: usize, tail_tol: f64) -> Self {
        TruncatedSeriesPolicy { cutoff, tail_tol }
    }

    pub fn accept(&self, tail_bound: f64, partial: f64) -> bool {
        tail_bound <= self.tail_tol * partial.abs().max(f64::MIN_POSITIVE)
    }
}

/// A real value with an absolute error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: Float,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: Float, error: f64) -> Self {
        Estimate { value, error }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// `|value - x| <= error + slack`.
    pub fn contains(&self, x: &Float, slack: f64) -> bool {
        Float::with_val(self.value.prec(), &self.value - x).abs().to_f64() <= self.error + slack
    }
}

impl Serialize for Estimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Estimate", 2)?;
        st.serialize_field("value", &crate::complex::float_string(&self.value))?;
        st.serialize_field("error", &self.error)?;
        st.end()
    }
}
