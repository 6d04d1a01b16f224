//! Sparse storage, envelope Cholesky and the generalized eigensolvers.

pub mod eigen;
pub mod envelope;
pub mod sparse;

pub use eigen::{smallest_eigenpairs, EigenResult, SolverKind};
pub use envelope::EnvelopeCholesky;
pub use sparse::CsrMatrix;
