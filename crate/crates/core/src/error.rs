use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge (achieved relative error {achieved:.3e})")]
    Accuracy { achieved: f64 },

    #[error("quadrature did not converge (error estimate {estimate:.3e})")]
    Quadrature { estimate: f64 },

    #[error("seed approximation error {achieved:.3e} exceeds tolerance {requested:.3e}")]
    SeedTolerance { achieved: f64, requested: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("singular or ill-posed linear system: {0}")]
    IllPosed(String),

    #[error("degenerate measure: {0}")]
    Degenerate(String),

    #[error("potential expansion not converged at degree {degree} (tail {tail:.3e})")]
    PotentialNotResolved { degree: usize, tail: f64 },

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("no admissible minimum found in bracket")]
    NoAdmissibleMinimum { samples: Vec<(f64, f64, f64)> },

    #[error("root search did not converge (residual {residual:.3e})")]
    NoConvergence { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
