use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HeckeError {
    #[error("pole: {0}")]
    Pole(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid precision context: {0}")]
    InvalidContext(String),
    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),
    #[error("truncation not certified: {0}")]
    TruncationNotCertified(String),
    #[error("tail not certified: {0}")]
    TailNotCertified(String),
    #[error("cutoff too small: tail bound {tail:e} exceeds tolerance {tol:e}")]
    CutoffTooSmall { tail: f64, tol: f64 },
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("contour abscissa {0} sits on or too close to a pole line")]
    PoleAbscissa(f64),
    #[error("circle encloses an extra pole: {0}")]
    CircleEnclosesPole(String),
    #[error("no root in bracket: {0}")]
    NoRoot(String),
    #[error("saddle point outside support: {0}")]
    SaddleOutsideSupport(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("record {record} (line {line}): {msg}")]
    Invariant { record: usize, line: usize, msg: String },
    #[error("coverage: {0}")]
    Coverage(String),
    #[error("io: {0}")]
    Io(String),
}

impl HeckeError {
    /// Errors caused by numerical certification rather than bad input.
    pub fn is_certification(&self) -> bool {
        matches!(
            self,
            HeckeError::PrecisionInsufficient(_)
                | HeckeError::TruncationNotCertified(_)
                | HeckeError::TailNotCertified(_)
                | HeckeError::CutoffTooSmall { .. }
        )
    }

    /// Errors caused by malformed or inconsistent input data.
    pub fn is_data(&self) -> bool {
        matches!(
            self,
            HeckeError::Parse { .. } | HeckeError::Invariant { .. } | HeckeError::Coverage(_) | HeckeError::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, HeckeError>;
