use thiserror::Error;

/// Errors raised by the range computations and the code solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("structure error: {0}")]
    Structure(String),

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not a rank-2 projector: {0}")]
    NotAProjector(String),

    #[error("curve of kind {0:?} has no such operation")]
    InvalidKind(crate::ranges::CurveKind),

    #[error("degenerate conic: q and r are collinear (|q2 r1 - q1 r2| = {0:.3e})")]
    DegenerateConic(f64),

    #[error("point {re} + {im}i is not on the curve (distance {distance:.3e})")]
    OffCurve { re: f64, im: f64, distance: f64 },

    #[error("the admissible interval for lambda11 is empty: [{lo}, {hi}]")]
    EmptyOmega { lo: f64, hi: f64 },

    #[error("state cloud is empty")]
    EmptyCloud,

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag for the error variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Structure(_) => "structure",
            Error::NotHermitian { .. } => "not-hermitian",
            Error::NotAProjector(_) => "not-a-projector",
            Error::InvalidKind(_) => "invalid-kind",
            Error::DegenerateConic(_) => "degenerate-conic",
            Error::OffCurve { .. } => "off-curve",
            Error::EmptyOmega { .. } => "empty-omega",
            Error::EmptyCloud => "empty-cloud",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
