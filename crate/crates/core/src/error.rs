use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(
        "sinkhorn scaling did not converge after {iterations} sweeps (deviation {deviation:e})"
    )]
    NonConvergence { iterations: usize, deviation: f64 },

    #[error("non-positive diagonal scaler at index {0}")]
    DivisionByZero(usize),

    #[error("row sum {row_sum} differs from column sum {col_sum} at index {index}")]
    UnsupportedShape {
        index: usize,
        row_sum: f64,
        col_sum: f64,
    },

    #[error("matrix is not doubly stochastic (max deviation {deviation:e}, tolerance {tol:e})")]
    NotDoublyStochastic { deviation: f64, tol: f64 },

    #[error("no perfect matching exists on the support of the input")]
    Degenerate,

    #[error("iteration cap of {0} exceeded")]
    IterationCap(usize),

    #[error("full decomposition error {error:e} already exceeds tolerance {tol:e}")]
    ToleranceTooTight { error: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector norm {0} is not 1")]
    NotNormalized(f64),

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
