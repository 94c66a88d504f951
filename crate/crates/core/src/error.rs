//! Error type shared across the pipeline.

use thiserror::Error;

/// Errors produced by model evaluation, GP fitting, sensitivity estimation
/// and MCMC sampling.
#[derive(Debug, Error)]
pub enum Error {
    /// A vector or matrix had the wrong length for the operation.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A design point fell outside the simulator's declared bounds.
    #[error("design variable {index} = {value} outside bounds [{lo}, {hi}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Unknown builtin model name.
    #[error("unknown builtin model '{0}' (expected linear_additive, ishigami or conjugate_gaussian)")]
    UnknownModel(String),

    /// A precondition on an argument failed.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A covariance matrix could not be factorized even after jitter
    /// escalation.
    #[error("covariance not positive definite after jitter escalation up to {max_jitter:e}: {context}")]
    Conditioning {
        context: &'static str,
        max_jitter: f64,
    },

    /// The output is constant, so variance-based indices are undefined.
    #[error("output '{0}' has zero variance; Sobol' indices are undefined")]
    ZeroVariance(String),

    /// GP hyperparameter optimization failed for a labeled target.
    #[error("GP fit failed for '{label}': {source}")]
    FitFailure {
        label: String,
        #[source]
        source: Box<Error>,
    },

    /// The random-walk proposal collapsed: an entire adaptation window was
    /// rejected.
    #[error("MCMC proposal scale collapsed: {0} consecutive proposals rejected; check that the log-posterior is finite near the initial point and that the prior support is not degenerate")]
    ScaleCollapse(usize),

    /// A posterior chain was too degenerate to convert into a prior.
    #[error("degenerate posterior: {0}")]
    DegeneratePosterior(String),

    /// Serialization or deserialization of an artifact failed.
    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Wrap an error with the label of the response or target it concerns.
    pub fn labeled(self, label: impl Into<String>) -> Error {
        Error::FitFailure {
            label: label.into(),
            source: Box::new(self),
        }
    }
}
