//! Origin-symmetric convex bodies through their support functions: the body
//! catalog and its string syntax, jets and D²h, sampled fields, Wulff shapes
//! and planar polygons.

mod body;
mod dsl;
mod field;
mod polygon;
mod tensor;
mod wulff;

pub use body::{
    default_frame, eval_d2h, eval_support, support_on, BodyKind, BodySpec, Jet, SampledSupport, TrigMode, FD_STEP,
};
pub use dsl::{load_support_file, parse_body, parse_support_text};
pub(crate) use field::check_same_grid;
pub use field::{sample_field, FieldSource, SupportField};
pub use polygon::{convex_hull_2d, ConvexPolygon, Point};
pub use tensor::TangentTensor;
pub use wulff::{convex_hull_3d, p_combination, p_combination_values, wulff_body, wulff_is_support, WulffShape};

use crate::error::{HbmError, Result};
use crate::sphere_disc::Vec3;

/// Planar body as a convex polygon. Square and diamond are exact for q = ∞
/// and q = 1 (and their linear images); smooth bodies use the boundary points
/// ∇h(θ) at `samples` offset directions.
pub fn polygonize(spec: &BodySpec, samples: usize) -> Result<ConvexPolygon> {
    if spec.dim() != 2 {
        return Err(HbmError::Unsupported("polygons are planar".into()));
    }
    match spec.kind() {
        BodyKind::Lq { q } if q.is_infinite() => {
            ConvexPolygon::new(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
        }
        BodyKind::Lq { q } if *q == 1.0 => ConvexPolygon::new(vec![[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]]),
        BodyKind::Wulff(w) => w.polygon(),
        BodyKind::LinearImage { base, matrix } if !base.has_jet() => {
            let p = polygonize(base, samples)?;
            p.transformed([[matrix[(0, 0)], matrix[(0, 1)]], [matrix[(1, 0)], matrix[(1, 1)]]])
        }
        _ => {
            let pts: Vec<Point> = (0..samples)
                .map(|j| {
                    let phi = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / samples as f64;
                    let g = spec.jet_at(&Vec3::new(phi.cos(), phi.sin(), 0.0))?.grad;
                    Ok([g.x, g.y])
                })
                .collect::<Result<_>>()?;
            ConvexPolygon::hull(&pts)
        }
    }
}
