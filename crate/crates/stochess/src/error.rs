use thiserror::Error;

/// Unified error type for the whole pipeline.
///
/// Variants are grouped by category so the CLI can map them onto distinct
/// exit codes: parameter parsing, mathematical domain violations, numeric
/// failures (precision exhaustion, non-convergence), structural violations
/// discovered mid-computation, and sizing errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A numeric routine could not reach the requested accuracy. Carries the
    /// best value obtained and the accuracy actually achieved, so callers can
    /// decide whether the partial result is still usable.
    #[error("numeric error: {message} (achieved ~{achieved_digits} digits)")]
    Numeric {
        message: String,
        achieved_digits: u32,
        partial: Option<f64>,
    },

    /// Leading principal minor `index` of the moment matrix vanished; the
    /// factorization does not exist at this truncation.
    #[error("singular leading principal minor at index {index}")]
    SingularMinor { index: usize },

    /// An operator truncation violated its expected band structure.
    #[error("band structure violation: {0}")]
    Structure(String),

    /// A truncation was too small for the request (never silently truncated).
    #[error("truncation too small: {0}")]
    Sizing(String),

    /// A verification that is part of a construction's contract failed.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("degenerate query: {0}")]
    DegenerateQuery(String),

    #[error("unsupported weight-system kind: {0}")]
    UnsupportedKind(String),

    #[error("positivity violated: {0}")]
    Positivity(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn numeric(message: impl Into<String>, achieved_digits: u32, partial: Option<f64>) -> Self {
        Error::Numeric { message: message.into(), achieved_digits, partial }
    }

    /// Exit-code category used by the CLI (0 is reserved for success,
    /// 1 for failed requested checks).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Domain(_) | Error::DegenerateQuery(_) | Error::UnsupportedKind(_) => 3,
            Error::Numeric { .. } => 4,
            Error::SingularMinor { .. } | Error::Structure(_) | Error::Positivity(_) => 5,
            Error::Sizing(_) => 6,
            Error::Consistency(_) => 7,
            Error::Io(_) | Error::Serde(_) => 8,
            Error::Internal(_) => 9,
        }
    }
}
