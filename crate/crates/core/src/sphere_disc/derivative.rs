use super::grid::{SphereGrid, Vec3};

/// Accuracy of the midpoint difference on S¹.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    /// `(z_{j+1} − z_j)/Δφ`.
    SecondOrder,
    /// `(27(z_{j+1} − z_j) − (z_{j+2} − z_{j−1}))/(24Δφ)`.
    #[default]
    FourthOrder,
}

/// Node values → values at the dual midpoints φ_{j+1/2}, periodic.
#[derive(Clone, Debug)]
pub struct CircleDifference {
    n: usize,
    dphi: f64,
    stencil: Stencil,
}

impl CircleDifference {
    pub fn new(n: usize, dphi: f64, stencil: Stencil) -> Self {
        CircleDifference { n, dphi, stencil }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dphi(&self) -> f64 {
        self.dphi
    }

    /// Offsets from `j` and weights of the derivative at `j + 1/2`.
    pub fn taps(&self) -> Vec<(isize, f64)> {
        let h = self.dphi;
        match self.stencil {
            Stencil::SecondOrder => vec![(0, -1.0 / h), (1, 1.0 / h)],
            Stencil::FourthOrder => {
                let s = 1.0 / (24.0 * h);
                vec![(-1, s), (0, -27.0 * s), (1, 27.0 * s), (2, -s)]
            }
        }
    }

    /// Offsets and weights of the interpolant at `j + 1/2`, same order as the derivative.
    pub fn midpoint_taps(&self) -> Vec<(isize, f64)> {
        match self.stencil {
            Stencil::SecondOrder => vec![(0, 0.5), (1, 0.5)],
            Stencil::FourthOrder => vec![(-1, -1.0 / 16.0), (0, 9.0 / 16.0), (1, 9.0 / 16.0), (2, -1.0 / 16.0)],
        }
    }

    fn stencil_apply(&self, taps: &[(isize, f64)], z: &[f64]) -> Vec<f64> {
        let n = self.n as isize;
        (0..n).map(|j| taps.iter().map(|&(o, w)| w * z[(j + o).rem_euclid(n) as usize]).sum()).collect()
    }

    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        self.stencil_apply(&self.taps(), z)
    }

    /// Midpoint values of a node field.
    pub fn average(&self, f: &[f64]) -> Vec<f64> {
        self.stencil_apply(&self.midpoint_taps(), f)
    }
}

/// Constant per-triangle gradients of the P1 interpolant, in the plane of each
/// flat triangle.
#[derive(Clone, Debug)]
pub struct TriangleGradients {
    /// Gradients of the three barycentric hat functions per triangle.
    pub hats: Vec<[Vec3; 3]>,
}

impl TriangleGradients {
    pub fn new(grid: &SphereGrid) -> Self {
        let p = grid.nodes();
        let hats = grid
            .triangles()
            .iter()
            .map(|&[a, b, c]| {
                let (pa, pb, pc) = (p[a], p[b], p[c]);
                let n = (pb - pa).cross(&(pc - pa));
                let twice_area = n.norm();
                let nh = n / twice_area;
                [
                    nh.cross(&(pc - pb)) / twice_area,
                    nh.cross(&(pa - pc)) / twice_area,
                    nh.cross(&(pb - pa)) / twice_area,
                ]
            })
            .collect();
        TriangleGradients { hats }
    }

    pub fn apply(&self, grid: &SphereGrid, z: &[f64]) -> Vec<Vec3> {
        grid.triangles().iter().zip(&self.hats).map(|(t, g)| g[0] * z[t[0]] + g[1] * z[t[1]] + g[2] * z[t[2]]).collect()
    }
}

#[derive(Clone, Debug)]
pub enum DerivativeOps {
    Circle(CircleDifference),
    Mesh(TriangleGradients),
}

pub fn derivative_matrices(grid: &SphereGrid, stencil: Stencil) -> DerivativeOps {
    match grid.dphi() {
        Some(h) => DerivativeOps::Circle(CircleDifference::new(grid.len(), h, stencil)),
        None => DerivativeOps::Mesh(TriangleGradients::new(grid)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn midpoint_derivative_of_cosine() {
        let g = SphereGrid::circle(256).unwrap();
        let h = g.dphi().unwrap();
        let z: Vec<f64> = (0..256).map(|j| g.nodes()[j].x).collect();
        for st in [Stencil::SecondOrder, Stencil::FourthOrder] {
            let d = CircleDifference::new(256, h, st).apply(&z);
            let err = (0..256).map(|j| (d[j] + (2.0 * PI * (j as f64 + 1.0) / 256.0).sin()).abs()).fold(0.0, f64::max);
            assert!(err <= h * h / 6.0 * 1.01, "{st:?}: {err}");
        }
    }

    #[test]
    fn fourth_order_is_fourth_order() {
        let errs: Vec<f64> = [64usize, 128]
            .iter()
            .map(|&n| {
                let g = SphereGrid::circle(n).unwrap();
                let z: Vec<f64> = (0..n).map(|j| (3.0 * g.angle(j)).sin()).collect();
                let d = CircleDifference::new(n, g.dphi().unwrap(), Stencil::FourthOrder).apply(&z);
                (0..n)
                    .map(|j| (d[j] - 3.0 * (3.0 * 2.0 * PI * (j as f64 + 1.0) / n as f64).cos()).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        let ratio = errs[0] / errs[1];
        assert!(ratio > 15.0 && ratio < 17.0, "ratio {ratio}");
    }

    #[test]
    fn alternating_mode() {
        let g = SphereGrid::circle(32).unwrap();
        let h = g.dphi().unwrap();
        let z: Vec<f64> = (0..32).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let d = CircleDifference::new(32, h, Stencil::SecondOrder).apply(&z);
        assert!(d.iter().all(|v| (v.abs() - 2.0 / h).abs() < 1e-12));
    }

    #[test]
    fn mesh_gradients() {
        let g = SphereGrid::icosphere(3).unwrap();
        let ops = TriangleGradients::new(&g);
        let ones = vec![1.0; g.len()];
        assert!(ops.apply(&g, &ones).iter().all(|v| v.norm() < 1e-12));
        // linear ambient function: gradient close to the tangential projection
        let a = Vec3::new(0.3, -0.5, 0.8);
        let z: Vec<f64> = g.nodes().iter().map(|v| a.dot(v)).collect();
        let grads = ops.apply(&g, &z);
        for (gr, c) in grads.iter().zip(g.cell_dirs()) {
            let tang = a - c * a.dot(c);
            assert!((gr - tang).norm() < 0.05, "{}", (gr - tang).norm());
        }
    }
}
