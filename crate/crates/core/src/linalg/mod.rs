//! Dense complex linear algebra for small matrices (dimension up to 64).
//!
//! All routines are pure functions of their inputs.

mod eigen;
mod expm;
mod matrix;
pub mod scalar;
mod svd;

pub use eigen::{eig, eig_with, eigenvalues_with, fix_phase, lexicographic_cmp, lexicographic_order, sort_lexicographic, EigenDecomposition};
pub use expm::{expm, expm_with, ladder_exp, nilpotent_expm};
pub use matrix::{ComplexMatrix, ComplexVector, Matrix};
pub use scalar::{with_precision, MpFloat, RealScalar};
pub use svd::{min_singular_value, singular_values, singular_values_with};

/// Largest dimension accepted by the eigensolver.
pub const MAX_EIG_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix dimension must be at least 1")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not strictly triangular")]
    NotTriangular,
    #[error("nonzero entry outside bandwidth {bandwidth}")]
    BandwidthExceeded { bandwidth: usize },
    #[error("matrix norm out of range")]
    NormOutOfRange,
    #[error("non-convergence after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("dimension {dim} exceeds supported maximum {max}")]
    TooLarge { dim: usize, max: usize },
}

/// Numerical knobs of the kernel, gathered in one record.
#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// QR sweep cap is this factor times `max(dim, 10)`.
    pub eig_iterations_per_dim: usize,
    /// Relative modulus below which a component does not fix the eigenvector phase.
    pub phase_threshold: f64,
    /// Relative width within which real parts tie when sorting eigenvalues.
    pub ordering_tolerance: f64,
    pub jacobi_max_sweeps: usize,
    pub expm_max_squarings: u32,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eig_iterations_per_dim: 30,
            phase_threshold: 1e-12,
            ordering_tolerance: 1e-9,
            jacobi_max_sweeps: 60,
            expm_max_squarings: 64,
        }
    }
}
