use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0} (only 2 and 4 are supported)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range 0..{bound}")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("value {value} outside the allowed range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("invalid Bloch vector: norm² = {norm_sq}")]
    InvalidBloch { norm_sq: f64 },

    #[error("decomposition failed (residual {residual:.3e})")]
    Decomposition { residual: f64 },

    #[error("circuit synthesis failed (residual {residual:.3e})")]
    Synthesis { residual: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for failures that come from numerics rather than from bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Decomposition { .. } | Error::Synthesis { .. })
    }
}
