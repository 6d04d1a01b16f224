//! The Hilbert-Brunn-Minkowski operator −L_K as a pair of quadratic forms,
//! its spectrum (full and even), and the checks built on it.

mod checks;
mod forms;
mod spectrum;

pub use checks::{geodesic_concavity, second_p_minkowski_margin, ConcavityReport, ConcavityRow};
pub use forms::{assemble, assemble_with, OperatorForms};
pub use spectrum::{
    default_cluster_tol, equivariance_check, even_gap, even_reduce, gap_report, lambda_1e, p_star, solve_spectrum,
    solve_spectrum_with, Discretization, GapReport, SpectralReport,
};
