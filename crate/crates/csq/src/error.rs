//! Error type shared by every module.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CsqError>;

#[derive(Debug, Error)]
pub enum CsqError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("matrix not Hermitian within tolerance (residual {residual:.3e}, tol {tol:.3e})")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("failed to converge: {0}")]
    NonConvergence(String),

    #[error("coherent-state truncation loss {loss:.3e} exceeds {limit:.3e}; raise the order or force evaluation")]
    TruncationLoss { loss: f64, limit: f64 },

    #[error("operator support exceeds declared bound {bound} (entry residue {residue:.3e} at index {index})")]
    SupportExceeded {
        bound: usize,
        index: usize,
        residue: f64,
    },

    #[error("star product result is not Gaussian-integrable (zz̄ coefficient {gamma:.6e} > 0)")]
    NonIntegrable { gamma: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid observable spec: {0}")]
    Observable(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}
