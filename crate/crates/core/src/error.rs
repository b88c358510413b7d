use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),

    #[error("graph is disconnected; the graphic matroid must come from a connected graph")]
    Disconnected,

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("no finite-cost interdiction reaches the target {0}")]
    Unreachable(i64),

    #[error("operation not supported for this matroid: {0}")]
    Unsupported(&'static str),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("bound table needs {needed} bytes, budget is {budget}")]
    MemoryBudget { needed: u128, budget: u128 },

    #[error("brute force refused: {m} elements exceeds the cap of {cap}")]
    OracleCap { m: usize, cap: usize },

    #[error("bad bound cache file: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
