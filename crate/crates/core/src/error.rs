use thiserror::Error;

/// Errors raised by the analysis pipeline.
///
/// Inconclusive accumulation is deliberately *not* an error; it is a verdict
/// carried by [`crate::opposite::AccumulationReport`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("denominator has zero constant term")]
    ZeroConstantTerm,

    #[error("division by zero polynomial")]
    ZeroDenominator,

    #[error("oscillating model parameter {0} must be nonzero")]
    ZeroModelParameter(&'static str),

    #[error("coefficient {index} is zero; opposite polynomial undefined")]
    ZeroCoefficient { index: usize },

    #[error("series is not tame: {reason} (witness index {witness})")]
    NotTame { reason: String, witness: usize },

    #[error("horizon {requested} exceeds the {available} available coefficients")]
    HorizonExceedsData { requested: usize, available: usize },

    #[error("zero initial in class {class}")]
    ZeroInitial { class: usize },

    #[error("gcd mismatch across classes: {0}")]
    GcdMismatch(String),

    #[error("inexact polynomial division: {0}")]
    InexactDivision(String),

    #[error("root isolation failed at precision cap of {cap_bits} bits: {detail}")]
    RootIsolation { cap_bits: usize, detail: String },

    #[error("boundary membership undecidable at {cap_bits} bits for roots {ambiguous:?}")]
    UndecidableBoundary { cap_bits: usize, ambiguous: Vec<String> },

    #[error("non-meromorphic input: {0}")]
    NonMeromorphic(String),

    #[error("accumulation inconclusive: {0}")]
    Inconclusive(String),

    #[error("sample budget of {budget} exhausted for label {label}")]
    SampleBudgetExhausted { budget: usize, label: String },

    #[error("word-length guard exceeded: n_max = {n_max} > {limit}")]
    GuardExceeded { n_max: usize, limit: usize },

    #[error("order mismatch at pole {pole}: {detail}")]
    OrderMismatch { pole: String, detail: String },

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
