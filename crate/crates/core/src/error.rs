use thiserror::Error;

use crate::matrix::HermitianMatrix;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is empty")]
    EmptyMatrix,

    #[error("not Hermitian: entries ({row},{col}) and ({col},{row}) differ by {asymmetry:e}")]
    NotHermitian { row: usize, col: usize, asymmetry: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("eigendecomposition failed: {0}")]
    EigenFailure(String),

    #[error("not a projection: spectrum deviates from {{0,1}} by {defect:e}")]
    NotProjection { defect: f64 },

    #[error("invalid spectral family: {0}")]
    InvalidFamily(String),

    #[error("lattice computation violated an internal invariant: {0}")]
    InternalLattice(String),

    #[error("empty matrix set")]
    EmptySet,

    #[error("element {index} is not in class {class}: {reason}")]
    ClassViolation { index: usize, class: String, reason: String },

    #[error("affine scale must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("shift {delta} exceeds the spectral floor {floor}")]
    DeltaTooLarge { delta: f64, floor: f64 },

    #[error("element {index} is not invertible after shifting: smallest eigenvalue {min_eigenvalue:e} below floor {floor:e}")]
    NotInvertible { index: usize, min_eigenvalue: f64, floor: f64 },

    #[error("element {index} is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { index: usize, min_eigenvalue: f64 },

    #[error("elements {i} and {j} are not orthogonal: |x_i x_j| = {norm:e}")]
    NotOrthogonal { i: usize, j: usize, norm: f64 },

    #[error("elements {i} and {j} do not commute: |[x_i, x_j]| = {norm:e}")]
    NotCommuting { i: usize, j: usize, norm: f64 },

    #[error("need at least {need} elements, got {got}")]
    TooFewElements { got: usize, need: usize },

    #[error("no convergence after exponent {exponent}: residual {residual:e}")]
    NoConvergence {
        exponent: u64,
        residual: f64,
        last_iterate: Box<HermitianMatrix>,
    },

    #[error("chain is not monotone at position {index} (defect {defect:e})")]
    NotMonotone { index: usize, defect: f64 },

    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),

    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

impl Error {
    pub(crate) fn dims(left: usize, right: usize) -> Result<()> {
        if left == right {
            Ok(())
        } else {
            Err(Error::DimMismatch { left, right })
        }
    }
}
