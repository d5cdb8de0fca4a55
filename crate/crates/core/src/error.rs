use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ElError {
    #[error("moment oracle cannot supply {0}")]
    MissingMoment(String),

    #[error("zero is not strictly inside the convex hull of the estimating-function values")]
    OutOfHull,

    #[error("root finder did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("degenerate prior at theta = {theta}: {reason}")]
    DegeneratePrior { theta: f64, reason: String },

    #[error("feasible parameter interval is empty")]
    EmptyInterval,

    #[error("theta0 = {theta0} is not a root of E G (residual {residual:e})")]
    NotARoot { theta0: f64, residual: f64 },

    #[error("E G'(theta0) is zero; bias formula undefined")]
    DegenerateDenominator,

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: parse error on line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}: file contains no values")]
    EmptyFile(PathBuf),

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("configuration error: {0}")]
    Config(String),
}

impl ElError {
    /// Errors caused by bad input or configuration rather than by the computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            ElError::InvalidParameter(_)
                | ElError::Parse { .. }
                | ElError::EmptyFile(_)
                | ElError::Io { .. }
                | ElError::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, ElError>;
