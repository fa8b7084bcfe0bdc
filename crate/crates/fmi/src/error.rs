use thiserror::Error;

/// Crate-wide error type. Variants mirror the failure modes of the
/// individual modules; the CLI maps them onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("probabilities sum to {sum}, expected 1 within {tol}")]
    Normalization { sum: f64, tol: f64 },
    #[error("negative probability {p} at atom {atom:?}")]
    NegativeProbability { p: f64, atom: Vec<usize> },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric coefficient estimate unstable at order {order} (error estimate {err:.3e})")]
    NumericUnstable { order: usize, err: f64 },
    #[error("not differentiable at t=1 (one-sided slope gap {gap:.3e})")]
    NotDifferentiable { gap: f64 },
    #[error("unknown generator '{0}'")]
    UnknownGenerator(String),
    #[error("infinite divergence: {0}")]
    InfiniteDivergence(String),
    #[error("matrix not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("zero marginal probability at symbol {0}")]
    ZeroMarginal(usize),
    #[error("ratio deviation {deviation} exceeds convergence radius {radius}")]
    RadiusExceeded { deviation: f64, radius: f64 },
    #[error("joint too large: {atoms} atoms exceeds limit {limit}")]
    TooLarge { atoms: usize, limit: usize },
    #[error("Delta has negative diagonal entry {value:.6e} at index {index}")]
    DeltaNotPsd { index: usize, value: f64 },
    #[error("inadmissible latent family: {0}")]
    Inadmissible(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
