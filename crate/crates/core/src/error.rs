use thiserror::Error;

use crate::pauli::Axis;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("all four spin amplitudes vanish; the state cannot be normalized")]
    NullState,

    #[error("trace result has imaginary residue {residue:e} (limit 1e-10)")]
    NonHermitianInput { residue: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("matrix is not unitary (deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid Kraus set: {0}")]
    InvalidKrausSet(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("random generation failed: {0}")]
    GenerationFailure(String),

    #[error("outcome table for axes ({0}, {1}) is empty")]
    EmptyTable(Axis, Axis),

    #[error("outcome probability {0:e} is negative beyond rounding")]
    NegativeProbability(f64),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
