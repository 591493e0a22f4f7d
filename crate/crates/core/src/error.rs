use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected}, got {got}")]
    Size { expected: usize, got: usize },

    #[error("empty input")]
    Empty,

    #[error("index {index} out of range (bound {bound})")]
    Index { index: usize, bound: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("invalid null spec: {0}")]
    InvalidSpec(String),

    #[error("infeasible null spec: {precoded} precoded positions cannot force {nulls} nulls")]
    Infeasible { nulls: usize, precoded: usize },

    #[error("singular precoding system (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("precoding residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("PAPR undefined for an all-zero frame")]
    ZeroFrame,

    #[error("symbol source exhausted after {0} draws")]
    SourceExhausted(usize),

    #[error("vector {k}: {source}")]
    AtVector { k: usize, source: Box<Error> },

    #[error("trial {trial}: {source}")]
    AtTrial { trial: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn at_vector(self, k: usize) -> Self {
        Error::AtVector {
            k,
            source: Box::new(self),
        }
    }

    pub(crate) fn at_trial(self, trial: usize) -> Self {
        Error::AtTrial {
            trial,
            source: Box::new(self),
        }
    }

    /// Strips `AtVector`/`AtTrial` context and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtVector { source, .. } | Error::AtTrial { source, .. } => source.root(),
            e => e,
        }
    }
}
