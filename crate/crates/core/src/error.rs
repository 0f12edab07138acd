use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular matrix: pivot {pivot:e} at column {column} below threshold {threshold:e}")]
    SingularMatrix {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in solver input: {0}")]
    NonFiniteInput(String),

    #[error("matrix is not Hermitian: max |m - m^H| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("state became non-finite during integration (step {step}); dt is probably too large")]
    NonFiniteState { step: usize },

    #[error("degenerate denominator in {name}: |d| = {magnitude:e}")]
    DegenerateDenominator { name: &'static str, magnitude: f64 },

    #[error("unknown sweep parameter `{0}` (expected delta_p, delta_c or theta)")]
    UnknownParameter(String),

    #[error("failed at (x, y) = ({x}, {y}): {source}")]
    SingularAt {
        x: f64,
        y: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error in {origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::SingularMatrix { .. }
            | Error::NonFiniteState { .. }
            | Error::NonFiniteInput(_)
            | Error::NotHermitian { .. }
            | Error::DegenerateDenominator { .. } => true,
            Error::SingularAt { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
