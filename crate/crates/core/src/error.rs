use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid quantile level {0}: must lie strictly between 0 and 1")]
    InvalidQuantile(f64),

    #[error("empty sample")]
    EmptySample,

    #[error("total weight must be positive")]
    ZeroTotalWeight,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unbounded/degenerate design: {0}")]
    DegenerateDesign(String),

    #[error("linear program infeasible: {0}")]
    Infeasible(String),

    #[error("linear program unbounded: {0}")]
    Unbounded(String),

    #[error("simplex iteration limit reached ({0} pivots)")]
    IterationLimit(usize),

    #[error("all {0} candidate subsets are singular")]
    AllSubsetsSingular(usize),

    #[error("oracle size guard: {0}")]
    OracleTooLarge(String),

    #[error("orthant enumeration limit: q = {q} exceeds {max}")]
    OrthantLimit { q: usize, max: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("singular covariance: {0}")]
    SingularCovariance(String),

    #[error("invalid resampling plan: {0}")]
    InvalidPlan(String),

    #[error("too many failed draws: {failed} of {total}")]
    TooManyFailures { failed: usize, total: usize },

    #[error("invalid panel: {0}")]
    InvalidPanel(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: row {row}: {message}")]
    Csv {
        path: String,
        row: usize,
        message: String,
    },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
