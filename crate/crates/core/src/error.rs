use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("vertex {vertex} is isolated")]
    DegenerateGraph { vertex: usize },

    #[error("graph is not connected")]
    Disconnected,

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("rate for pair ({i}, {j}) is not supported by an edge of the graph")]
    RateOffEdge { i: usize, j: usize },

    #[error("rate for pair ({i}, {j}) must be positive and finite, got {rate}")]
    InvalidRate { i: usize, j: usize, rate: f64 },

    #[error("no rate given for ordered edge pair ({i}, {j})")]
    MissingRate { i: usize, j: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("response has zero variance; R² is undefined")]
    ZeroVariance,

    #[error("{failed} of {total} ensembles failed to converge (limit {limit:.2}%)")]
    TooManyFailures {
        failed: usize,
        total: usize,
        limit: f64,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
