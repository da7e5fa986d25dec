use thiserror::Error;

/// Errors raised by the operations of this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not invertible modulo {modulus}")]
    NotInvertible { modulus: u64 },

    #[error("matrix is not symplectic")]
    NotSymplectic,

    #[error("element is not congruent to the identity modulo {level}")]
    LevelViolation { level: u64 },

    #[error("modulus {modulus} is too small: need a multiple of {required}")]
    ModulusTooSmall { modulus: u64, required: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("first homology has free rank {free_rank}; not a rational homology sphere")]
    NotRationalHomologySphere { free_rank: usize },

    #[error(
        "det(H) = {det} is not +-1 modulo {level}; the gluing is not trivializable at this level"
    )]
    Inadmissible { det: u64, level: u64 },

    #[error("infeasible size: ambient dimension {dimension} exceeds the limit {limit}")]
    Infeasible { dimension: usize, limit: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_mismatch(expected: impl ToString, found: impl ToString) -> Error {
    Error::DimensionMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
