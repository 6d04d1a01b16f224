//! Fixtures shared by the criterion benches.

use hbm::geometry::{parse_body, sample_field};
use hbm::{BodySpec, GridDescriptor, SphereGrid, SupportField};
use std::sync::Arc;

pub fn grid(descriptor: &str) -> Arc<SphereGrid> {
    let d: GridDescriptor = descriptor.parse().expect("valid grid descriptor");
    Arc::new(d.build().expect("grid builds"))
}

pub fn body(src: &str, dim: usize) -> BodySpec {
    parse_body(src, dim).expect("valid body string")
}

pub fn field(src: &str, grid: &Arc<SphereGrid>) -> SupportField {
    sample_field(&body(src, grid.dim()), grid).expect("body samples on grid")
}
