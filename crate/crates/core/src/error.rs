use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed price csv: {0}")]
    Csv(String),
    #[error("missing ticker {0}")]
    MissingTicker(String),
    #[error("non-positive price {price} for {ticker} on {date}")]
    NonPositivePrice {
        ticker: String,
        date: String,
        price: f64,
    },
    #[error("dates not strictly increasing at {0}")]
    NonMonotoneDates(String),
    #[error("need at least 2 price rows, got {0}")]
    TooFewRows(usize),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("bitstring length {got} does not match instance size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("brute force limited to {max} items, instance has {got}")]
    TooManyItems { max: usize, got: usize },
    #[error("optimal value must be positive, got {0}")]
    NonPositiveOptimum(f64),
    #[error("qubit {qubit} out of range for {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit {0} used more than once in one gate")]
    QubitClash(usize),
    #[error("invalid register: {0}")]
    InvalidRegister(String),
    #[error("layout does not match instance: {0}")]
    LayoutMismatch(String),
    #[error("{name} = {value} outside [0, {bound})")]
    OutOfBounds {
        name: &'static str,
        value: f64,
        bound: f64,
    },
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("evaluation budget must be positive")]
    ZeroBudget,
    #[error("unknown fixture {0}")]
    UnknownFixture(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
