//! Crate-wide error type and exit-code mapping.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not hermitian: relative asymmetry {asymmetry:.3e} exceeds {tol:.3e}")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("spin must be a positive half-integer, got {0}")]
    InvalidSpin(f64),

    #[error("cannot build a state from the zero vector")]
    ZeroVector,

    #[error("trace must be 1, got {trace:.12}")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigensolver failed to converge on a {dim}x{dim} matrix")]
    ConvergenceFailure { dim: usize },

    #[error("lattice of {points} points exceeds the memory cap of {cap}")]
    LatticeTooLarge { points: usize, cap: usize },

    #[error(
        "resolution too low on axis {axis}: count {count} gives Gaussian tail {tail:.3e} at the \
         frequency boundary (target {target:.3e}); use count >= {required} or a larger epsilon"
    )]
    ResolutionTooLow {
        axis: usize,
        count: usize,
        tail: f64,
        target: f64,
        required: usize,
    },

    #[error("direction vector must be nonzero")]
    ZeroDirection,

    #[error("axis {axis} out of range for a {n}-dimensional grid")]
    BadAxis { axis: usize, n: usize },

    #[error("centered lattice counts must be even, got {0}")]
    OddCount(usize),

    #[error("operators do not commute: commutator residual {residual:.3e} exceeds {tol:.3e}")]
    NotCommuting { residual: f64, tol: f64 },

    #[error("vectors are not orthonormal: residual {residual:.3e}")]
    NotOrthonormal { residual: f64 },

    #[error("moment order {order} exceeds the supported maximum {max}")]
    OrderTooHigh { order: usize, max: usize },

    #[error("symmetry action invalid: residual {residual:.3e} exceeds {tol:.3e}")]
    InvalidAction { residual: f64, tol: f64 },

    #[error("operator does not commute with the tuple: residual {residual:.3e}")]
    NotReducing { residual: f64 },

    #[error("reducing operator is a multiple of the identity")]
    TrivialB,

    #[error("inverse transform produced a non-real grid: residue {residue:.3e} vs scale {scale:.3e}")]
    RealnessViolation { residue: f64, scale: f64 },

    #[error("grid dimension {n} not renderable here (need n = 2, or n = 3 with a slice/integration axis)")]
    BadDimension { n: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("image encoding error: {0}")]
    Image(#[from] image::ImageError),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code: 0 ok, 2 config, 3 io, 4 numeric, 5 precondition.
    pub fn exit_code(&self) -> i32 {
        use Error::*;
        match self {
            Config(_) | Json(_) => 2,
            Io(_) | Image(_) => 3,
            ConvergenceFailure { .. }
            | LatticeTooLarge { .. }
            | ResolutionTooLow { .. }
            | RealnessViolation { .. } => 4,
            _ => 5,
        }
    }
}
