use thiserror::Error;

/// Errors surfaced by the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension {dim} is unsupported (supported: {supported})")]
    UnsupportedDimension { dim: usize, supported: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("density is unbounded: {context}")]
    UnboundedDensity { context: String },

    #[error("frequency window too small: {context}")]
    WindowTooSmall { context: String },

    #[error(
        "estimated tail mass {estimate:.3e} of |f| beyond the grid window exceeds tolerance {tolerance:.3e}; widen the grid"
    )]
    InsufficientWindow { estimate: f64, tolerance: f64 },

    #[error("degenerate truncation: retained mass {b_r:.3e} below minimum {min:.3e}")]
    DegenerateTruncation { b_r: f64, min: f64 },

    #[error("mode mismatch: {context}")]
    ModeMismatch { context: String },

    #[error("grid of {requested} bytes exceeds the memory cap of {cap} bytes (LLT_LAB_MAX_GRID_BYTES)")]
    GridBudget { requested: u64, cap: u64 },

    #[error("unsupported moment order p = {p} (supported: 3, 4)")]
    UnsupportedOrder { p: u32 },

    #[error("{0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
