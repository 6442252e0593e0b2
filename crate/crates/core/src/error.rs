use num_complex::Complex64;
use thiserror::Error;

use crate::numlin::ComplexMatrix;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has dimension zero")]
    EmptyMatrix,

    #[error("matrix dimension {n} exceeds the supported maximum {max}")]
    TooLarge { n: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("ragged matrix: row {row} has {len} entries, expected {n}")]
    Ragged { row: usize, len: usize, n: usize },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("exponent p = {0} is outside the admissible range")]
    InvalidExponent(f64),

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        /// Hessenberg iterate at the point of failure.
        iterate: Box<ComplexMatrix>,
    },

    #[error("I - zX is numerically singular: 1/z = {inverse_point} is within {distance:e} of eigenvalue {eigenvalue}")]
    NearSingular {
        inverse_point: Complex64,
        eigenvalue: Complex64,
        distance: f64,
    },

    #[error("singular matrix in LU factorization")]
    Singular,

    #[error("zero set contains the origin")]
    ZeroAtOrigin,

    #[error("invalid zero set: {0}")]
    InvalidZeroSet(String),

    #[error("non-real zero {0} where a real zero set is required")]
    NonRealZero(Complex64),

    #[error("degenerate sample grid: {0}")]
    DegenerateGrid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown check id `{0}`")]
    UnknownCheck(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("check {check} cannot run on a {instance} instance")]
    InstanceMismatch { check: String, instance: String },
}
