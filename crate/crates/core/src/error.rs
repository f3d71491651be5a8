use thiserror::Error;

/// Errors raised by constructors and solvers in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("shape mismatch for {what}: expected {expected}, found {found}")]
    Shape {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("singular system: zero pivot at row {pivot}")]
    Singular { pivot: usize },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("source iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("malformed file {path}: {msg}")]
    Format { path: String, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
