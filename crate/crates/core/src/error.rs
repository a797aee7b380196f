use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants are grouped roughly by the stage that produces them: input
/// validation, field construction, sieving, and interval evaluation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("polynomial has no real root greater than 1")]
    NoRealRootAboveOne,

    #[error("polynomial rejected as reducible: {0}")]
    ReducibleRejected(String),

    #[error(
        "irreducibility of the degree {degree} polynomial could not be certified; \
         acknowledge it explicitly to proceed"
    )]
    IrreducibilityUnconfirmed { degree: usize },

    #[error("refinement budget exceeded while {0}")]
    RefinementBudgetExceeded(String),

    #[error("sieve horizon {requested} exceeds the configured limit {limit}")]
    HorizonTooLarge { requested: u64, limit: u64 },

    #[error("argument {x} lies outside the table horizon {horizon}")]
    OutOfHorizon { x: u64, horizon: u64 },

    #[error("horizon {available} is insufficient, at least {required} is needed")]
    HorizonInsufficient { required: u64, available: u64 },

    #[error("tail majorant ratio r={r} is not below the base q={q}")]
    MajorantTooWeak { r: String, q: String },

    #[error("coefficient size policy violated: {0}")]
    OverflowPolicy(String),

    #[error("sequence has empty support below the horizon")]
    EmptySupport,

    #[error("at least two support elements are required")]
    TooFewElements,

    #[error("a rational base requires a degree 1 field, got degree {degree}")]
    NonRationalField { degree: usize },

    #[error("{count} interval comparisons stayed unresolved (first: {first:?})")]
    UnresolvedIntervals { count: usize, first: Vec<u64> },

    #[error("no norm witness found for {count} denominators (first: {first:?})")]
    NoWitnessFound { count: usize, first: Vec<u64> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from malformed user input rather than from a
    /// computation that could not be completed.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Parse(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
