use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("state is not normalized (norm {norm:.12})")]
    NotNormalized { norm: f64 },

    #[error("non-finite entry at position {0}")]
    NonFinite(usize),

    #[error("qubit index {index} out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("{what} failed (residual {residual:.3e})")]
    Numerical { what: &'static str, residual: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("option conflict: {0}")]
    OptionConflict(String),

    #[error("width {width} exceeds the dense verification limit of {max}")]
    WidthTooLarge { width: usize, max: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
