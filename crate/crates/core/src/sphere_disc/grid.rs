use crate::error::{HbmError, Result};
use nalgebra::{Rotation3, Vector3};
use serde::{Serialize, Serializer};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

pub type Vec3 = Vector3<f64>;

/// Which discretization a grid is; also its CLI spelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GridDescriptor {
    Circle { n: usize },
    Icosphere { level: usize },
}

impl GridDescriptor {
    pub fn dim(&self) -> usize {
        match self {
            GridDescriptor::Circle { .. } => 2,
            GridDescriptor::Icosphere { .. } => 3,
        }
    }

    pub fn build(&self) -> Result<SphereGrid> {
        match *self {
            GridDescriptor::Circle { n } => SphereGrid::circle(n),
            GridDescriptor::Icosphere { level } => SphereGrid::icosphere(level),
        }
    }
}

impl fmt::Display for GridDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridDescriptor::Circle { n } => write!(f, "s1:N={n}"),
            GridDescriptor::Icosphere { level } => write!(f, "s2:L={level}"),
        }
    }
}

impl Serialize for GridDescriptor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for GridDescriptor {
    type Err = HbmError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |offset: usize, m: &str| HbmError::Parse { offset, message: m.to_string() };
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad(0, "expected 's1:N=<n>' or 's2:L=<level>'"))?;
        let (key, val) = rest.split_once('=').ok_or_else(|| bad(kind.len() + 1, "expected '<key>=<value>'"))?;
        let voff = kind.len() + key.len() + 2;
        let v: usize = val.trim().parse().map_err(|_| bad(voff, "expected a nonnegative integer"))?;
        match (kind.trim(), key.trim()) {
            ("s1", "N") => Ok(GridDescriptor::Circle { n: v }),
            ("s2", "L") => Ok(GridDescriptor::Icosphere { level: v }),
            _ => Err(bad(0, "unknown grid; expected 's1:N=<n>' or 's2:L=<level>'")),
        }
    }
}

/// Discretized S¹ or S² with lumped quadrature weights and antipodal pairing.
///
/// "Cells" are the integration sites of the derivative terms: the dual
/// midpoints φ_{j+1/2} on S¹, the triangles on S².
#[derive(Clone, Debug)]
pub struct SphereGrid {
    descriptor: GridDescriptor,
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
    antipode: Vec<usize>,
    frames: Vec<[Vec3; 2]>,
    triangles: Vec<[usize; 3]>,
    tri_area: Vec<f64>,
    cell_dirs: Vec<Vec3>,
    cell_frames: Vec<[Vec3; 2]>,
}

/// Orthonormal basis of θ^⊥ built from the coordinate axis least aligned with θ.
pub fn tangent_frame(theta: &Vec3) -> [Vec3; 2] {
    let k = (0..3).min_by(|&a, &b| theta[a].abs().total_cmp(&theta[b].abs())).unwrap();
    let mut e = Vec3::zeros();
    e[k] = 1.0;
    let e1 = (e - theta * theta[k]).normalize();
    let e2 = theta.cross(&e1);
    [e1, e2]
}

impl SphereGrid {
    /// Offset periodic grid φ_j = 2π(j+½)/N. The second half of the nodes is
    /// the exact negation of the first, so evenness holds bitwise.
    pub fn circle(n: usize) -> Result<Self> {
        if n < 16 || n % 2 == 1 {
            return Err(HbmError::input(format!("circle grid needs an even N >= 16, got {n}")));
        }
        let half = n / 2;
        let mut nodes = Vec::with_capacity(n);
        for j in 0..half {
            let phi = 2.0 * PI * (j as f64 + 0.5) / n as f64;
            nodes.push(Vec3::new(phi.cos(), phi.sin(), 0.0));
        }
        for j in 0..half {
            nodes.push(-nodes[j]);
        }
        let frames = nodes.iter().map(|t| [Vec3::new(-t.y, t.x, 0.0), Vec3::zeros()]).collect();
        let antipode = (0..n).map(|j| (j + half) % n).collect();
        let cell_dirs: Vec<Vec3> = (0..n)
            .map(|j| {
                let phi = 2.0 * PI * (j as f64 + 1.0) / n as f64;
                Vec3::new(phi.cos(), phi.sin(), 0.0)
            })
            .collect();
        let cell_frames = cell_dirs.iter().map(|t| [Vec3::new(-t.y, t.x, 0.0), Vec3::zeros()]).collect();
        Ok(SphereGrid {
            descriptor: GridDescriptor::Circle { n },
            nodes,
            weights: vec![2.0 * PI / n as f64; n],
            antipode,
            frames,
            triangles: Vec::new(),
            tri_area: Vec::new(),
            cell_dirs,
            cell_frames,
        })
    }

    /// Icosahedron subdivided `level` times, projected to S², then rotated by
    /// (0.1, 0.2, 0.3) rad about x, y, z so that no vertex sits on an axis.
    pub fn icosphere(level: usize) -> Result<Self> {
        if level > 7 {
            return Err(HbmError::input(format!("icosphere level must be <= 7, got {level}")));
        }
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<Vec3> = [
            (-1.0, t, 0.0),
            (1.0, t, 0.0),
            (-1.0, -t, 0.0),
            (1.0, -t, 0.0),
            (0.0, -1.0, t),
            (0.0, 1.0, t),
            (0.0, -1.0, -t),
            (0.0, 1.0, -t),
            (t, 0.0, -1.0),
            (t, 0.0, 1.0),
            (-t, 0.0, -1.0),
            (-t, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
        .collect();
        let mut tris: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..level {
            let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
            let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> usize {
                let key = (a.min(b), a.max(b));
                *cache.entry(key).or_insert_with(|| {
                    verts.push((verts[key.0] + verts[key.1]).normalize());
                    verts.len() - 1
                })
            };
            let mut next = Vec::with_capacity(tris.len() * 4);
            for &[a, b, c] in &tris {
                let ab = mid(a, b, &mut verts);
                let bc = mid(b, c, &mut verts);
                let ca = mid(c, a, &mut verts);
                next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            tris = next;
        }
        let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), 0.3)
            * Rotation3::from_axis_angle(&Vector3::y_axis(), 0.2)
            * Rotation3::from_axis_angle(&Vector3::x_axis(), 0.1);
        let m = *rot.matrix();
        let nodes: Vec<Vec3> = verts.iter().map(|v| m * v).collect();

        // Midpoint normalization and the rotation both commute exactly with
        // negation, so antipodes can be matched on bit patterns.
        let key = |v: &Vec3| (v.x.to_bits(), v.y.to_bits(), v.z.to_bits());
        let lookup: HashMap<_, usize> = nodes.iter().enumerate().map(|(i, v)| (key(v), i)).collect();
        let mut antipode = Vec::with_capacity(nodes.len());
        for (i, v) in nodes.iter().enumerate() {
            match lookup.get(&key(&-v)) {
                Some(&j) if j != i => antipode.push(j),
                _ => return Err(HbmError::Numerical(format!("antipodal pairing failed at vertex {i}"))),
            }
        }

        for tri in tris.iter_mut() {
            let [a, b, c] = *tri;
            let n = (nodes[b] - nodes[a]).cross(&(nodes[c] - nodes[a]));
            if n.dot(&(nodes[a] + nodes[b] + nodes[c])) < 0.0 {
                tri.swap(1, 2);
            }
        }
        let tri_area: Vec<f64> =
            tris.iter().map(|&[a, b, c]| 0.5 * (nodes[b] - nodes[a]).cross(&(nodes[c] - nodes[a])).norm()).collect();
        let mut weights = vec![0.0; nodes.len()];
        for (tri, &area) in tris.iter().zip(&tri_area) {
            for &v in tri {
                weights[v] += area / 3.0;
            }
        }
        // accumulation order differs between a vertex and its antipode
        for i in 0..nodes.len() {
            let j = antipode[i];
            if i < j {
                let w = 0.5 * (weights[i] + weights[j]);
                weights[i] = w;
                weights[j] = w;
            }
        }
        let mut frames = vec![[Vec3::zeros(); 2]; nodes.len()];
        for i in 0..nodes.len() {
            let j = antipode[i];
            if i < j {
                frames[i] = tangent_frame(&nodes[i]);
                frames[j] = frames[i];
            }
        }
        let cell_dirs: Vec<Vec3> = tris.iter().map(|&[a, b, c]| (nodes[a] + nodes[b] + nodes[c]).normalize()).collect();
        let cell_frames = cell_dirs.iter().map(tangent_frame).collect();
        Ok(SphereGrid {
            descriptor: GridDescriptor::Icosphere { level },
            nodes,
            weights,
            antipode,
            frames,
            triangles: tris,
            tri_area,
            cell_dirs,
            cell_frames,
        })
    }

    pub fn descriptor(&self) -> GridDescriptor {
        self.descriptor
    }

    pub fn dim(&self) -> usize {
        self.descriptor.dim()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn antipode(&self) -> &[usize] {
        &self.antipode
    }

    pub fn frames(&self) -> &[[Vec3; 2]] {
        &self.frames
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle_areas(&self) -> &[f64] {
        &self.tri_area
    }

    pub fn cell_dirs(&self) -> &[Vec3] {
        &self.cell_dirs
    }

    pub fn cell_frames(&self) -> &[[Vec3; 2]] {
        &self.cell_frames
    }

    /// Node spacing Δφ on S¹.
    pub fn dphi(&self) -> Option<f64> {
        match self.descriptor {
            GridDescriptor::Circle { n } => Some(2.0 * PI / n as f64),
            _ => None,
        }
    }

    /// |S^{n-1}|.
    pub fn sphere_measure(&self) -> f64 {
        if self.dim() == 2 {
            2.0 * PI
        } else {
            4.0 * PI
        }
    }

    /// Smallest angular distance from a node to a coordinate axis.
    pub fn min_axis_distance(&self) -> f64 {
        let d = self.dim();
        self.nodes.iter().flat_map(|v| (0..d).map(move |k| v[k].abs().min(1.0).acos())).fold(f64::INFINITY, f64::min)
    }

    /// Debug dump: one "x y z w" line per vertex, then one "i j k" line per triangle.
    pub fn write_mesh<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for (v, w) in self.nodes.iter().zip(&self.weights) {
            writeln!(out, "{:.17e} {:.17e} {:.17e} {:.17e}", v.x, v.y, v.z, w)?;
        }
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }

    /// Angular position of node `j` on S¹ (n = 2 only).
    pub fn angle(&self, j: usize) -> f64 {
        let v = self.nodes[j];
        v.y.atan2(v.x).rem_euclid(2.0 * PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_basics() {
        let g = SphereGrid::circle(16).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s - 2.0 * PI).abs() < 1e-14);
        assert_eq!(g.antipode()[0], 8);
        assert!((g.min_axis_distance() - PI / 16.0).abs() < 1e-12);
        assert!(SphereGrid::circle(17).is_err());
        assert!(SphereGrid::circle(14).is_err());
        for j in 0..16 {
            assert_eq!(g.nodes()[g.antipode()[j]], -g.nodes()[j]);
            let phi = 2.0 * PI * (j as f64 + 0.5) / 16.0;
            assert!((g.angle(j) - phi).abs() < 1e-12);
        }
    }

    #[test]
    fn icosphere_counts() {
        let g0 = SphereGrid::icosphere(0).unwrap();
        assert_eq!((g0.len(), g0.triangles().len()), (12, 20));
        let g3 = SphereGrid::icosphere(3).unwrap();
        assert_eq!((g3.len(), g3.triangles().len()), (642, 1280));
        // flat-area deficit of the level-3 mesh is 0.48%, about 4x less per level
        let s: f64 = g3.weights().iter().sum();
        let deficit = 1.0 - s / (4.0 * PI);
        assert!(deficit > 0.004 && deficit < 0.005, "weight sum {s}");
        assert!(g3.min_axis_distance() > 1e-3);
    }

    #[test]
    fn icosphere_weight_deficit_shrinks() {
        let mut prev = f64::INFINITY;
        for level in 0..5 {
            let g = SphereGrid::icosphere(level).unwrap();
            let deficit = 4.0 * PI - g.weights().iter().sum::<f64>();
            assert!(deficit > 0.0 && deficit < prev);
            prev = deficit;
        }
    }

    #[test]
    fn antipodes_are_an_involution() {
        let g = SphereGrid::icosphere(2).unwrap();
        for i in 0..g.len() {
            let j = g.antipode()[i];
            assert_ne!(i, j);
            assert_eq!(g.antipode()[j], i);
            assert_eq!(g.nodes()[j], -g.nodes()[i]);
            assert_eq!(g.weights()[i], g.weights()[j]);
        }
    }

    #[test]
    fn frames_are_orthonormal_and_tangent() {
        let g = SphereGrid::icosphere(1).unwrap();
        for (t, [e1, e2]) in g.nodes().iter().zip(g.frames()) {
            assert!(t.dot(e1).abs() < 1e-14 && t.dot(e2).abs() < 1e-14);
            assert!((e1.norm() - 1.0).abs() < 1e-14 && e1.dot(e2).abs() < 1e-14);
        }
        for t in g.triangles() {
            let n = (g.nodes()[t[1]] - g.nodes()[t[0]]).cross(&(g.nodes()[t[2]] - g.nodes()[t[0]]));
            assert!(n.dot(&g.nodes()[t[0]]) > 0.0);
        }
    }

    #[test]
    fn descriptor_round_trip() {
        for s in ["s1:N=256", "s2:L=4"] {
            let d: GridDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
        let e = "s1:N=abc".parse::<GridDescriptor>().unwrap_err();
        assert!(matches!(e, HbmError::Parse { offset: 5, .. }));
        assert!("s3:L=1".parse::<GridDescriptor>().is_err());
    }

    #[test]
    fn mesh_dump_lines() {
        let g = SphereGrid::icosphere(0).unwrap();
        let mut buf = Vec::new();
        g.write_mesh(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 32);
        assert_eq!(text.lines().next().unwrap().split_whitespace().count(), 4);
        assert_eq!(text.lines().last().unwrap().split_whitespace().count(), 3);
    }
}
