//! Discretizations of S¹ and S²: offset periodic grids and rotated icospheres,
//! with lumped quadrature, first derivatives and the antipodal structure.

mod derivative;
mod even;
mod grid;

pub use derivative::{derivative_matrices, CircleDifference, DerivativeOps, Stencil, TriangleGradients};
pub use even::{even_projector, EvenProjector, EvenQuotient};
pub use grid::{tangent_frame, GridDescriptor, SphereGrid, Vec3};

pub fn build_circle_grid(n: usize) -> crate::Result<SphereGrid> {
    SphereGrid::circle(n)
}

pub fn build_icosphere(level: usize) -> crate::Result<SphereGrid> {
    SphereGrid::icosphere(level)
}
