use thiserror::Error;

/// Errors produced by the estimation, simulation and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series contains a non-finite value at position {index}")]
    NonFiniteInput { index: usize },

    #[error("series of length {n} is too short (need at least {min})")]
    SeriesTooShort { n: usize, min: usize },

    #[error("bandwidth too large: {what}")]
    BandwidthTooLarge { what: String },

    #[error("argument {value} outside the domain {domain}")]
    DomainError { value: f64, domain: &'static str },

    #[error("quadrature did not reach tolerance {tolerance:e} (error estimate {estimate:e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },

    #[error("invalid weight: {0}")]
    InvalidWeight(String),

    #[error("degenerate band: {0}")]
    DegenerateBand(String),

    #[error("memory parameter estimate {0} is not positive; pole variance undefined")]
    AlphaNonPositive(f64),

    #[error("autocovariance not embeddable at length {n}: minimum eigenvalue {min_eigenvalue:e}")]
    NotEmbeddable { n: usize, min_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
