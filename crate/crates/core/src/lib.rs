//! Numerics for the local L^p Brunn-Minkowski problem on origin-symmetric
//! convex bodies in the plane and in space.
//!
//! Bodies are described by their support functions ([`BodySpec`]), sampled on a
//! discretized sphere ([`SphereGrid`]) into a [`SupportField`]. Everything
//! downstream (mixed volumes, the Hilbert-Brunn-Minkowski operator, stability
//! margins) consumes fields.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary_poincare;
pub mod brunn_minkowski;
pub mod error;
pub mod geometry;
pub mod hbm_spectrum;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod sphere_disc;
pub mod stability;

pub use error::{HbmError, Result};
pub use geometry::{BodyKind, BodySpec, ConvexPolygon, FieldSource, SupportField, TangentTensor};
pub use hbm_spectrum::{OperatorForms, SpectralReport};
pub use sphere_disc::{GridDescriptor, SphereGrid};
