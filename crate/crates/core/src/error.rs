//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A value or combination of values violates an operation's contract.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two images or grids that must agree in shape do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Physically impossible or unsupported optical configuration.
    #[error("geometry: {0}")]
    Geometry(String),

    /// An inverse transform produced a non-real result; the input spectrum
    /// was not conjugate-symmetric.
    #[error("spectrum not conjugate-symmetric: imaginary residue {residual:.3e} exceeds {limit:.3e} of dynamic range")]
    SymmetryViolation { residual: f64, limit: f64 },

    /// Training requested on a dataset with no usable samples.
    #[error("empty training set: {0}")]
    EmptyTrainingSet(String),

    /// A serialized model does not match what the caller needs.
    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    /// A simulated experiment produced estimates too degenerate to report.
    #[error("experiment invalid: {0}")]
    ExperimentInvalid(String),

    /// File format not handled by the image loader/writer.
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("image codec: {0}")]
    Codec(#[from] image::ImageError),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
