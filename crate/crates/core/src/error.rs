use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, got {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("zero diagonal entry in row {row}")]
    ZeroDiagonal { row: usize },

    #[error("zero pivot in row {row} during incomplete factorization")]
    ZeroPivot { row: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("missing history: {0}")]
    MissingHistory(String),

    #[error(
        "outer iteration did not converge at step {step}, stage {stage} after {iterations} iterations (last residual {last:.3e})"
    )]
    NonConvergence {
        step: usize,
        stage: usize,
        iterations: usize,
        last: f64,
        residual_history: Vec<f64>,
    },

    #[error("linear solver failed at step {step}, stage {stage}: {reason}")]
    LinearSolver {
        step: usize,
        stage: usize,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(
    op: &'static str,
    expected: impl ToString,
    found: impl ToString,
) -> Error {
    Error::DimensionMismatch {
        op,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
