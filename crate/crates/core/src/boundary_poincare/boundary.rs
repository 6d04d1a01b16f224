use crate::error::{HbmError, Result};
use crate::geometry::{polygonize, BodySpec, ConvexPolygon, Point};
use crate::quadrature::gauss_on;
use crate::sphere_disc::SphereGrid;
use std::f64::consts::PI;

/// Gauss points per polygon edge.
pub const EDGE_POINTS: usize = 8;
/// Normal-angle samples of a smooth boundary.
pub const SMOOTH_SAMPLES: usize = 2048;
/// Radial Gauss points of the fan quadrature for interior integrals.
const RADIAL_POINTS: usize = 12;

#[derive(Clone, Debug)]
pub enum Representation {
    Polygon(ConvexPolygon),
    /// Weingarten samples x(φ) = h θ + h′ θ^⊥ on an offset circle grid.
    Smooth {
        samples: usize,
    },
}

/// Quadrature description of the boundary of a planar origin-symmetric body.
/// Interior integrals use the fan ∫_K f = ∫_∂K ⟨x,ν⟩ ∫₀¹ f(t x) t dt ds.
#[derive(Clone, Debug)]
pub struct PlanarBoundary {
    pub representation: Representation,
    pub points: Vec<Point>,
    pub normals: Vec<Point>,
    /// Arclength weights.
    pub ds: Vec<f64>,
    /// ⟨x, ν⟩.
    pub support: Vec<f64>,
    /// κ = 1/(h″+h) per sample (smooth boundaries only).
    pub curvature: Option<Vec<f64>>,
    /// h″+h per sample (smooth boundaries only).
    pub radius_of_curvature: Option<Vec<f64>>,
}

impl PlanarBoundary {
    pub fn polygon(p: ConvexPolygon) -> Result<Self> {
        let mut points = Vec::new();
        let mut normals = Vec::new();
        let mut ds = Vec::new();
        let mut support = Vec::new();
        for (a, b) in p.edges() {
            let e = [b[0] - a[0], b[1] - a[1]];
            let len = e[0].hypot(e[1]);
            let nu = [e[1] / len, -e[0] / len];
            let s = nu[0] * a[0] + nu[1] * a[1];
            if !(s > 0.0) {
                return Err(HbmError::input("the origin must be interior to the polygon"));
            }
            for (t, w) in gauss_on(EDGE_POINTS, 0.0, 1.0) {
                points.push([a[0] + t * e[0], a[1] + t * e[1]]);
                normals.push(nu);
                ds.push(w * len);
                support.push(s);
            }
        }
        Ok(PlanarBoundary {
            representation: Representation::Polygon(p),
            points,
            normals,
            ds,
            support,
            curvature: None,
            radius_of_curvature: None,
        })
    }

    /// Smooth body from analytic (or finite-difference) jets at `samples`
    /// normal directions φ_j = 2π(j+½)/samples.
    pub fn smooth(spec: &BodySpec, samples: usize) -> Result<Self> {
        if spec.dim() != 2 {
            return Err(HbmError::Unsupported("boundary forms are planar".into()));
        }
        if !spec.has_jet() {
            return Err(HbmError::Unsupported("body has no D2h; use a polygon".into()));
        }
        let grid = SphereGrid::circle(samples)?;
        let dphi = 2.0 * PI / samples as f64;
        let n = grid.len();
        let mut b = PlanarBoundary {
            representation: Representation::Smooth { samples },
            points: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            ds: Vec::with_capacity(n),
            support: Vec::with_capacity(n),
            curvature: Some(Vec::with_capacity(n)),
            radius_of_curvature: Some(Vec::with_capacity(n)),
        };
        for (j, t) in grid.nodes().iter().enumerate() {
            let jet = spec.jet_at(t).map_err(|e| match e {
                HbmError::SingularNode { detail, .. } => HbmError::SingularNode { node: j, detail },
                e => e,
            })?;
            let tau = nalgebra::Vector3::new(-t.y, t.x, 0.0);
            let rho = tau.dot(&(jet.hess * tau));
            if !(rho > 0.0) || !(jet.h > 0.0) {
                return Err(HbmError::Invariant { node: j, detail: format!("h = {}, h'' + h = {rho}", jet.h) });
            }
            b.points.push([jet.grad.x, jet.grad.y]);
            b.normals.push([t.x, t.y]);
            b.ds.push(rho * dphi);
            b.support.push(jet.h);
            b.curvature.as_mut().unwrap().push(1.0 / rho);
            b.radius_of_curvature.as_mut().unwrap().push(rho);
        }
        Ok(b)
    }

    /// Smooth bodies through their Weingarten map, the rest as polygons.
    pub fn from_spec(spec: &BodySpec) -> Result<Self> {
        if spec.has_jet() && !spec.has_unbounded_curvature() {
            PlanarBoundary::smooth(spec, SMOOTH_SAMPLES)
        } else {
            PlanarBoundary::polygon(polygonize(spec, 4096)?)
        }
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self.representation, Representation::Smooth { .. })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// ∫_∂K f(x, ν) ds.
    pub fn boundary_integral(&self, f: impl Fn(Point, Point) -> f64) -> f64 {
        (0..self.len()).map(|i| self.ds[i] * f(self.points[i], self.normals[i])).sum()
    }

    /// Points and weights of the fan rule for ∫_K.
    pub fn interior_rule(&self) -> Vec<(Point, f64)> {
        let radial = gauss_on(RADIAL_POINTS, 0.0, 1.0);
        let mut out = Vec::with_capacity(self.len() * RADIAL_POINTS);
        for i in 0..self.len() {
            let x = self.points[i];
            let base = self.support[i] * self.ds[i];
            for &(t, w) in &radial {
                out.push(([t * x[0], t * x[1]], base * t * w));
            }
        }
        out
    }

    pub fn interior_integral(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.interior_rule().into_iter().map(|(x, w)| w * f(x)).sum()
    }

    pub fn area(&self) -> f64 {
        0.5 * (0..self.len()).map(|i| self.support[i] * self.ds[i]).sum::<f64>()
    }

    /// Radii r ≤ R with r B₂ ⊂ K ⊂ R B₂, from the samples.
    pub fn inner_outer_radii(&self) -> (f64, f64) {
        match &self.representation {
            Representation::Polygon(p) => {
                (p.inradius_about_origin(), p.vertices().iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max))
            }
            Representation::Smooth { .. } => (
                self.support.iter().copied().fold(f64::INFINITY, f64::min),
                self.points.iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> PlanarBoundary {
        PlanarBoundary::polygon(ConvexPolygon::new(vec![[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]).unwrap())
            .unwrap()
    }

    #[test]
    fn square_integrals() {
        let s = square();
        assert!((s.area() - 4.0).abs() < 1e-14);
        assert!((s.boundary_integral(|_, _| 1.0) - 8.0).abs() < 1e-13);
        // ∫ x² y⁴ over the square = (2/3)(2/5)
        let v = s.interior_integral(|p| p[0] * p[0] * p[1].powi(4));
        assert!((v - 4.0 / 15.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn ellipse_integrals() {
        let e = PlanarBoundary::smooth(&BodySpec::ellipsoid(&[2.0, 0.5]).unwrap(), 1024).unwrap();
        assert!((e.area() - PI).abs() < 1e-12);
        // ∫ x² over the ellipse = π a³ b / 4
        let v = e.interior_integral(|p| p[0] * p[0]);
        assert!((v - PI * 8.0 * 0.5 / 4.0).abs() < 1e-11, "{v}");
        let (r, big) = e.inner_outer_radii();
        assert!((r - 0.5).abs() < 1e-4 && (big - 2.0).abs() < 1e-4);
    }

    #[test]
    fn polygon_needs_interior_origin() {
        let p = ConvexPolygon::new(vec![[1.0, 1.0], [2.0, 1.0], [2.0, 2.0], [1.0, 2.0]]).unwrap();
        assert!(PlanarBoundary::polygon(p).is_err());
    }
}
