use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: pole at x = {x}")]
    Pole { function: &'static str, x: f64 },

    #[error("{function}: argument outside domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid mode (n={n}, m={m}, alpha={alpha}): {reason}")]
    InvalidMode {
        n: i64,
        m: i64,
        alpha: f64,
        reason: &'static str,
    },

    #[error("singular value: {0}")]
    Singularity(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported basis: {0}")]
    Basis(String),

    #[error("{what} did not converge (estimate {estimate:e})")]
    NonConvergence { what: &'static str, estimate: f64 },

    #[error("{what}: tolerance {requested:e} not met, achieved {achieved:e}")]
    Tolerance {
        what: &'static str,
        requested: f64,
        achieved: f64,
    },

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("rank-deficient least-squares problem (condition estimate {condition:e})")]
    RankDeficient { condition: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::Tolerance { .. }
                | Error::Quadrature(_)
                | Error::RankDeficient { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
