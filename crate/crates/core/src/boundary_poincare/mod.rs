//! Boundary Poincaré constants of planar bodies: closed forms for the ball,
//! harmonic-polynomial lower estimates, explicit upper bounds, and the Reilly
//! identity.

mod boundary;
mod bounds;
mod harmonic;
mod margin;
mod reilly;
mod report;

pub use boundary::{PlanarBoundary, Representation, EDGE_POINTS, SMOOTH_SAMPLES};
pub use bounds::{
    bh_ball, bh_to_gap_bound, bh_upper_general, bh_upper_lq, dk_upper_bound, q_kw, steklov_ball_eigenvalue,
};
pub use harmonic::{
    bh_planar_estimate, cube_test_function_quotient, forms, test_function_quotient, HarmonicBasis, Member, Parity,
    TestFunction,
};
pub use margin::pbm_boundary_form_margin;
pub use reilly::{reilly_residual, reilly_terms, Domain, ReillyTerms, MAX_REILLY_DEGREE};
pub use report::{BoundDirection, BoundReport, Quantity};
