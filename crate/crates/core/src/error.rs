use thiserror::Error;

use crate::geom::Flat;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {p}^{e} exceeds 2^31")]
    Overflow { p: u64, e: u32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("enumeration of {size} items exceeds the cap of {cap}")]
    TooLarge { size: u128, cap: u128 },
    #[error("empty input")]
    EmptyInput,
    #[error("degenerate triple: points are not pairwise distinct")]
    DegenerateTriple,
    #[error("vertex {0} is not in the hypergraph")]
    UnknownVertex(u32),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("point set too small: {m} < {needed}")]
    TooSmall { m: usize, needed: f64 },
    #[error("a flat meets the point set in {count} points (limit {limit:.3})")]
    RichFlatPresent {
        flat: Flat,
        count: usize,
        limit: f64,
    },
    #[error("process did not terminate within {ops} operations: {detail}")]
    NonTermination { ops: usize, detail: String },
    #[error("no verified candidate after {attempts} attempts")]
    ExhaustedAttempts {
        attempts: usize,
        best: Box<crate::evasive::Construction>,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
