use super::field::{check_same_grid, SupportField};
use super::polygon::{convex_hull_2d, ConvexPolygon};
use crate::error::{HbmError, Result};
use crate::sphere_disc::{SphereGrid, Vec3};
use std::collections::{HashMap, HashSet};

/// The Aleksandrov body A[w] = ∩_j {x : ⟨x, θ_j⟩ ≤ w_j}, computed as the polar
/// of conv{θ_j / w_j}.
#[derive(Clone, Debug)]
pub struct WulffShape {
    dim: usize,
    vertices: Vec<Vec3>,
    volume: f64,
    active: Vec<bool>,
}

impl WulffShape {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Nodes whose half-space is a facet (w_j = h_{A[w]}(θ_j)).
    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn support_at(&self, x: &Vec3) -> f64 {
        self.vertices.iter().map(|v| v.dot(x)).fold(f64::MIN, f64::max)
    }

    /// h_{A[w]} re-sampled at the grid nodes.
    pub fn support_on(&self, grid: &SphereGrid) -> Vec<f64> {
        grid.nodes().iter().map(|t| self.support_at(t)).collect()
    }

    /// Planar shapes as a polygon.
    pub fn polygon(&self) -> Result<ConvexPolygon> {
        if self.dim != 2 {
            return Err(HbmError::Unsupported("polygon of a spatial Wulff shape".into()));
        }
        ConvexPolygon::new(self.vertices.iter().map(|v| [v.x, v.y]).collect())
    }
}

/// Build A[w] from per-node values on a grid.
pub fn wulff_body(grid: &SphereGrid, w: &[f64]) -> Result<WulffShape> {
    if w.len() != grid.len() {
        return Err(HbmError::GridMismatch(format!("{} values on a grid of {} nodes", w.len(), grid.len())));
    }
    if let Some(j) = w.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(HbmError::Invariant { node: j, detail: format!("Wulff value {} is not positive", w[j]) });
    }
    let pts: Vec<Vec3> = grid.nodes().iter().zip(w).map(|(t, v)| t / *v).collect();
    if grid.dim() == 2 {
        wulff_2d(&pts, w)
    } else {
        wulff_3d(&pts, w)
    }
}

fn wulff_2d(pts: &[Vec3], w: &[f64]) -> Result<WulffShape> {
    let p2: Vec<[f64; 2]> = pts.iter().map(|p| [p.x, p.y]).collect();
    let hull = convex_hull_2d(&p2, 1e-12);
    if hull.len() < 3 {
        return Err(HbmError::DegenerateHull("fewer than three hull points".into()));
    }
    let mut active = vec![false; w.len()];
    for &i in &hull {
        active[i] = true;
    }
    let m = hull.len();
    let mut vertices = Vec::with_capacity(m);
    for k in 0..m {
        let (a, b) = (p2[hull[k]], p2[hull[(k + 1) % m]]);
        let det = a[0] * b[1] - a[1] * b[0];
        if !(det > 0.0) {
            return Err(HbmError::DegenerateHull("origin is not interior to the point hull".into()));
        }
        vertices.push(Vec3::new((b[1] - a[1]) / det, (a[0] - b[0]) / det, 0.0));
    }
    let volume = 0.5
        * (0..m)
            .map(|k| vertices[k].x * vertices[(k + 1) % m].y - vertices[(k + 1) % m].x * vertices[k].y)
            .sum::<f64>();
    Ok(WulffShape { dim: 2, vertices, volume, active })
}

struct Face {
    v: [usize; 3],
    n: Vec3,
    d: f64,
    alive: bool,
}

fn make_face(p: &[Vec3], v: [usize; 3]) -> Face {
    let n = (p[v[1]] - p[v[0]]).cross(&(p[v[2]] - p[v[0]])).normalize();
    Face { v, n, d: n.dot(&p[v[0]]), alive: true }
}

/// Incremental 3D hull; returns outward triangles. Points within `eps`
/// (relative) of a face plane count as inside.
pub fn convex_hull_3d(p: &[Vec3], eps: f64) -> Result<Vec<[usize; 3]>> {
    let n = p.len();
    if n < 4 {
        return Err(HbmError::DegenerateHull("fewer than four points".into()));
    }
    let scale = p.iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let tol = eps * scale;
    let lex = |a: &usize, b: &usize| {
        p[*a].x.total_cmp(&p[*b].x).then(p[*a].y.total_cmp(&p[*b].y)).then(p[*a].z.total_cmp(&p[*b].z)).then(a.cmp(b))
    };
    let i0 = (0..n).min_by(lex).unwrap();
    let argmax = |f: &dyn Fn(usize) -> f64| (0..n).fold(i0, |best, i| if f(i) > f(best) { i } else { best });
    let i1 = argmax(&|i| (p[i] - p[i0]).norm());
    let dir = (p[i1] - p[i0]).normalize();
    let i2 = argmax(&|i| {
        let v = p[i] - p[i0];
        (v - dir * v.dot(&dir)).norm()
    });
    let nrm = (p[i1] - p[i0]).cross(&(p[i2] - p[i0]));
    if nrm.norm() <= tol * scale {
        return Err(HbmError::DegenerateHull("all points are collinear".into()));
    }
    let nrm = nrm.normalize();
    let i3 = argmax(&|i| (p[i] - p[i0]).dot(&nrm).abs());
    if (p[i3] - p[i0]).dot(&nrm).abs() <= tol {
        return Err(HbmError::DegenerateHull("all points are coplanar".into()));
    }
    let centre = (p[i0] + p[i1] + p[i2] + p[i3]) / 4.0;
    let mut faces: Vec<Face> = Vec::new();
    for v in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut f = make_face(p, v);
        if f.n.dot(&centre) - f.d > 0.0 {
            f = make_face(p, [v[0], v[2], v[1]]);
        }
        faces.push(f);
    }
    let seed = [i0, i1, i2, i3];
    for i in 0..n {
        if seed.contains(&i) {
            continue;
        }
        let visible: Vec<usize> =
            (0..faces.len()).filter(|&f| faces[f].alive && faces[f].n.dot(&p[i]) - faces[f].d > tol).collect();
        if visible.is_empty() {
            continue;
        }
        let mut edges = HashSet::new();
        for &f in &visible {
            let v = faces[f].v;
            for k in 0..3 {
                edges.insert((v[k], v[(k + 1) % 3]));
            }
        }
        let mut horizon = Vec::new();
        for &f in &visible {
            let v = faces[f].v;
            for k in 0..3 {
                let e = (v[k], v[(k + 1) % 3]);
                if !edges.contains(&(e.1, e.0)) {
                    horizon.push(e);
                }
            }
            faces[f].alive = false;
        }
        for (a, b) in horizon {
            faces.push(make_face(p, [a, b, i]));
        }
        if faces.len() > 8 * n + 64 {
            faces.retain(|f| f.alive);
        }
    }
    Ok(faces.into_iter().filter(|f| f.alive).map(|f| f.v).collect())
}

fn wulff_3d(pts: &[Vec3], w: &[f64]) -> Result<WulffShape> {
    let tris = convex_hull_3d(pts, 1e-12)?;
    let mut vertices = Vec::with_capacity(tris.len());
    for t in &tris {
        let n = (pts[t[1]] - pts[t[0]]).cross(&(pts[t[2]] - pts[t[0]]));
        let d = n.dot(&pts[t[0]]);
        if !(d > 0.0) {
            return Err(HbmError::DegenerateHull("origin is not interior to the point hull".into()));
        }
        vertices.push(n / d);
    }
    // facet of node j: polar vertices of the hull triangles around j, in order
    let mut by_edge: HashMap<(usize, usize), usize> = HashMap::new();
    let mut first_face: HashMap<usize, usize> = HashMap::new();
    for (f, t) in tris.iter().enumerate() {
        for k in 0..3 {
            by_edge.insert((t[k], t[(k + 1) % 3]), f);
            first_face.entry(t[k]).or_insert(f);
        }
    }
    let mut active = vec![false; w.len()];
    let mut volume = 0.0;
    let mut keys: Vec<usize> = first_face.keys().copied().collect();
    keys.sort_unstable();
    for j in keys {
        active[j] = true;
        let f0 = first_face[&j];
        let mut ring = Vec::new();
        let mut f = f0;
        loop {
            ring.push(vertices[f]);
            let t = tris[f];
            let k = t.iter().position(|&v| v == j).unwrap();
            let c = t[(k + 2) % 3];
            f = *by_edge.get(&(j, c)).ok_or_else(|| HbmError::DegenerateHull("hull is not a closed surface".into()))?;
            if f == f0 || ring.len() > tris.len() {
                break;
            }
        }
        let m = ring.len();
        let area = 0.5 * (0..m).fold(Vec3::zeros(), |a, k| a + ring[k].cross(&ring[(k + 1) % m])).norm();
        volume += w[j] * area / 3.0;
    }
    Ok(WulffShape { dim: 3, vertices, volume, active })
}

/// Nodewise L^p combination ((1−λ)h₀^p + λh₁^p)^{1/p}; the geometric mean at p = 0.
pub fn p_combination_values(h0: &[f64], h1: &[f64], lambda: f64, p: f64) -> Result<Vec<f64>> {
    if h0.len() != h1.len() {
        return Err(HbmError::GridMismatch(format!("{} vs {} values", h0.len(), h1.len())));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(HbmError::input(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    if lambda == 0.0 {
        return Ok(h0.to_vec());
    }
    if lambda == 1.0 {
        return Ok(h1.to_vec());
    }
    Ok(h0
        .iter()
        .zip(h1)
        .map(|(&a, &b)| {
            if p == 0.0 {
                a.powf(1.0 - lambda) * b.powf(lambda)
            } else if a == b {
                a
            } else {
                ((1.0 - lambda) * a.powf(p) + lambda * b.powf(p)).powf(1.0 / p)
            }
        })
        .collect())
}

pub fn p_combination(h0: &SupportField, h1: &SupportField, lambda: f64, p: f64) -> Result<Vec<f64>> {
    check_same_grid(h0, h1)?;
    p_combination_values(h0.h(), h1.h(), lambda, p)
}

/// Whether w is (up to `tol`) the support function of A[w]; returns the
/// largest relative gap (w_j − h_{A[w]}(θ_j))/w_j.
pub fn wulff_is_support(grid: &SphereGrid, w: &[f64], tol: f64) -> Result<(bool, f64)> {
    let shape = wulff_body(grid, w)?;
    let h = shape.support_on(grid);
    let gap = w.iter().zip(&h).map(|(a, b)| (a - b) / a).fold(0.0f64, f64::max);
    Ok((gap <= tol, gap))
}
