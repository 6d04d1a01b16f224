use crate::error::{HbmError, Result};

pub type Point = [f64; 2];

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex polygon, vertices counterclockwise without repeats.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

/// Andrew's monotone chain; drops points within `eps` (relative) of an edge.
/// Ties are broken lexicographically, so the output is deterministic.
pub fn convex_hull_2d(points: &[Point], eps: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a][0].total_cmp(&points[b][0]).then(points[a][1].total_cmp(&points[b][1])).then(a.cmp(&b))
    });
    idx.dedup_by(|a, b| points[*a] == points[*b]);
    if idx.len() < 3 {
        return idx;
    }
    let scale = points.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let tol = eps * scale * scale;
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let seq: Box<dyn Iterator<Item = &usize>> =
            if pass == 0 { Box::new(idx.iter()) } else { Box::new(idx.iter().rev()) };
        for &i in seq {
            while hull.len() >= start + 2
                && cross(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], points[i]) <= tol
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

impl ConvexPolygon {
    /// Validate a counterclockwise convex loop (clockwise input is reversed).
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(HbmError::DegenerateHull(format!("polygon with {} vertices", vertices.len())));
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        let scale = vertices.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
        for i in 0..n {
            let c = cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            if c < -1e-12 * scale * scale {
                return Err(HbmError::input(format!("polygon is not convex at vertex {}", (i + 1) % n)));
            }
        }
        let p = ConvexPolygon { vertices };
        if !(p.area() > 0.0) {
            return Err(HbmError::DegenerateHull("polygon has zero area".into()));
        }
        Ok(p)
    }

    pub fn hull(points: &[Point]) -> Result<Self> {
        let h = convex_hull_2d(points, 1e-12);
        ConvexPolygon::new(h.into_iter().map(|i| points[i]).collect())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()).sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// (unit outer normal, length) per edge.
    pub fn edge_normals(&self) -> Vec<(Point, f64)> {
        self.edges()
            .map(|(a, b)| {
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len = (dx * dx + dy * dy).sqrt();
                ([dy / len, -dx / len], len)
            })
            .collect()
    }

    pub fn support(&self, u: Point) -> f64 {
        self.vertices.iter().map(|v| v[0] * u[0] + v[1] * u[1]).fold(f64::MIN, f64::max)
    }

    /// Σ_edges |e| h_L(ν_e): the anisotropic perimeter with respect to L.
    pub fn anisotropic_perimeter(&self, h_l: impl Fn(Point) -> f64) -> f64 {
        self.edge_normals().into_iter().map(|(nu, len)| len * h_l(nu)).sum()
    }

    pub fn transformed(&self, m: [[f64; 2]; 2]) -> Result<Self> {
        let v =
            self.vertices.iter().map(|p| [m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1]]).collect();
        ConvexPolygon::new(v)
    }

    pub fn scaled(&self, s: f64) -> Self {
        ConvexPolygon { vertices: self.vertices.iter().map(|p| [s * p[0], s * p[1]]).collect() }
    }

    pub fn translated(&self, x: Point) -> Self {
        ConvexPolygon { vertices: self.vertices.iter().map(|p| [p[0] + x[0], p[1] + x[1]]).collect() }
    }

    /// Minkowski sum by merging edge sequences sorted by angle.
    pub fn minkowski_sum(&self, other: &ConvexPolygon) -> Result<Self> {
        let a = rotate_to_bottom(&self.vertices);
        let b = rotate_to_bottom(&other.vertices);
        let (n, m) = (a.len(), b.len());
        let mut out = Vec::with_capacity(n + m);
        let (mut i, mut j) = (0, 0);
        while i < n || j < m {
            out.push([a[i % n][0] + b[j % m][0], a[i % n][1] + b[j % m][1]]);
            let ea = sub(a[(i + 1) % n], a[i % n]);
            let eb = sub(b[(j + 1) % m], b[j % m]);
            let c = ea[0] * eb[1] - ea[1] * eb[0];
            if j >= m || (i < n && c > 0.0) {
                i += 1;
            } else if i >= n || c < 0.0 {
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
        ConvexPolygon::hull(&out)
    }

    /// Intersection with another convex polygon (Sutherland-Hodgman).
    /// Returns None when the intersection has no area.
    pub fn intersection(&self, clip: &ConvexPolygon) -> Option<ConvexPolygon> {
        let mut poly = self.vertices.clone();
        for (a, b) in clip.edges() {
            if poly.is_empty() {
                return None;
            }
            let inside = |p: Point| cross(a, b, p) >= 0.0;
            let mut next = Vec::with_capacity(poly.len() + 1);
            for k in 0..poly.len() {
                let p = poly[k];
                let q = poly[(k + 1) % poly.len()];
                let (ip, iq) = (inside(p), inside(q));
                if ip {
                    next.push(p);
                }
                if ip != iq {
                    let (cp, cq) = (cross(a, b, p), cross(a, b, q));
                    let t = cp / (cp - cq);
                    next.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                }
            }
            poly = next;
        }
        if poly.len() < 3 {
            return None;
        }
        let area = signed_area(&poly);
        if area <= 0.0 {
            return None;
        }
        Some(ConvexPolygon { vertices: poly })
    }

    /// |self Δ other|.
    pub fn symmetric_difference_area(&self, other: &ConvexPolygon) -> f64 {
        let inter = self.intersection(other).map_or(0.0, |p| p.area());
        (self.area() + other.area() - 2.0 * inter).max(0.0)
    }

    /// Whether -P = P up to a relative tolerance on support values.
    pub fn is_centrally_symmetric(&self, tol: f64) -> bool {
        let scale = self.vertices.iter().fold(0.0f64, |m, p| m.max(p[0].hypot(p[1])));
        self.edge_normals()
            .iter()
            .all(|(nu, _)| (self.support(*nu) - self.support([-nu[0], -nu[1]])).abs() <= tol * scale)
    }

    pub fn inradius_about_origin(&self) -> f64 {
        self.edge_normals().iter().map(|(nu, _)| self.support(*nu)).fold(f64::MAX, f64::min)
    }
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1]).sum::<f64>()
}

fn rotate_to_bottom(v: &[Point]) -> Vec<Point> {
    let k = (0..v.len()).min_by(|&a, &b| v[a][1].total_cmp(&v[b][1]).then(v[a][0].total_cmp(&v[b][0]))).unwrap();
    v[k..].iter().chain(&v[..k]).copied().collect()
}
