use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("insufficient data: {n} rows for {params} parameters")]
    InsufficientData { n: usize, params: usize },

    #[error("category {category} is not observed in the outcome")]
    EmptyCategory { category: usize },

    #[error("outcome value {value} outside the model support")]
    OutOfSupport { value: f64 },

    #[error("fit did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("separation detected: linear predictor spread exceeds {limit}")]
    SeparationDetected { limit: f64 },

    #[error("design matrix is rank deficient")]
    RankDeficientDesign,

    #[error("non-finite log-likelihood at row {row}")]
    NonFiniteLikelihood { row: usize },

    #[error("value {0} outside the open interval (-1/2, 1/2)")]
    DomainError(f64),

    #[error("empty data")]
    EmptyData,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("need at least 2 observations, got {0}")]
    TooFewObservations(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid alpha {0}: must lie in (0, 1)")]
    InvalidAlpha(f64),

    #[error("bootstrap dropped {failures} of {requested} replicates (allowed {allowed})")]
    TooManyFailures {
        failures: usize,
        requested: usize,
        allowed: usize,
    },

    #[error("moderation undefined: marginal association is numerically zero")]
    UndefinedModeration,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// True for failures of the numerical machinery (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::SeparationDetected { .. }
                | Error::RankDeficientDesign
                | Error::NonFiniteLikelihood { .. }
                | Error::TooManyFailures { .. }
                | Error::UndefinedModeration
        )
    }
}
