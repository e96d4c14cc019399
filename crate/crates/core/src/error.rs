use thiserror::Error;

/// Errors raised by the geometry backends, measures, walker and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    /// A half-plane point drifted so close to the boundary that double
    /// precision can no longer represent it.
    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    /// A boundary point does not carry enough depth (or precision) for the
    /// requested quantity.
    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Two distinct matrices fell into the same dedup bucket.
    #[error("canonical key collision: {0}")]
    Collision(String),

    #[error("estimator failure: {0}")]
    EstimatorFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
