use crate::error::{HbmError, Result};
use crate::geometry::{SupportField, TangentTensor};
use crate::linalg::CsrMatrix;
use crate::sphere_disc::{CircleDifference, SphereGrid, Stencil, TriangleGradients};
use nalgebra::Vector2;
use rayon::prelude::*;
use std::sync::Arc;

/// Discrete Dirichlet form of −L_K (stiffness) and the lumped cone measure
/// (mass) on the nodes of a grid.
#[derive(Clone, Debug)]
pub struct OperatorForms {
    grid: Arc<SphereGrid>,
    stiffness: CsrMatrix,
    mass: Vec<f64>,
    stencil: Stencil,
}

fn guard(t: &TangentTensor, site: usize) -> Result<TangentTensor> {
    let (lo, hi) = t.eigen_range();
    if !(lo > 1e-10 * hi) {
        return Err(HbmError::Conditioning { node: site, ratio: if hi > 0.0 { lo / hi } else { lo } });
    }
    Ok(t.adjugate())
}

/// Forms with the default (fourth-order) stencil on S¹.
pub fn assemble(k: &SupportField) -> Result<OperatorForms> {
    assemble_with(k, Stencil::default())
}

pub fn assemble_with(k: &SupportField, stencil: Stencil) -> Result<OperatorForms> {
    let grid = k.grid().clone();
    let n = grid.dim() as f64;
    for (i, t) in k.d2h().iter().enumerate() {
        guard(t, i)?;
    }
    let mass: Vec<f64> = match k.cell_mass() {
        Some(m) => m.to_vec(),
        None => k.h().iter().zip(k.d2h()).zip(grid.weights()).map(|((h, t), w)| h * t.det() * w / n).collect(),
    };
    let stiffness = match grid.dphi() {
        Some(dphi) => circle_stiffness(k, dphi, stencil),
        None => mesh_stiffness(k)?,
    };
    Ok(OperatorForms { grid, stiffness, mass, stencil })
}

// Σ_c ½ h_c² (Dz)_c² Δφ, D the midpoint difference.
fn circle_stiffness(k: &SupportField, dphi: f64, stencil: Stencil) -> CsrMatrix {
    let n = k.len();
    let taps = CircleDifference::new(n, dphi, stencil).taps();
    let mut t = Vec::with_capacity(n * taps.len() * taps.len());
    for (c, hc) in k.cell_h().iter().enumerate() {
        let coef = 0.5 * hc * hc * dphi;
        for &(oa, wa) in &taps {
            let a = (c as isize + oa).rem_euclid(n as isize) as usize;
            for &(ob, wb) in &taps {
                let b = (c as isize + ob).rem_euclid(n as isize) as usize;
                t.push((a, b, coef * wa * wb));
            }
        }
    }
    CsrMatrix::from_triplets(n, t)
}

// Σ_t |t| (1/6) h_t² ⟨adj(D²h_t) ∇z, ∇z⟩ with P1 gradients and centroid coefficients.
fn mesh_stiffness(k: &SupportField) -> Result<CsrMatrix> {
    let grid = k.grid();
    let grads = TriangleGradients::new(grid);
    let local: Vec<[(usize, usize, f64); 9]> = grid
        .triangles()
        .par_iter()
        .enumerate()
        .map(|(t, tri)| {
            let TangentTensor::Mat(adj) = guard(&k.cell_d2h()[t], t)? else { unreachable!("spatial tensors are 2x2") };
            let e = grid.cell_frames()[t];
            let hc = k.cell_h()[t];
            let c = adj * (hc * hc * grid.triangle_areas()[t] / 6.0);
            let g: Vec<Vector2<f64>> = grads.hats[t].iter().map(|v| Vector2::new(e[0].dot(v), e[1].dot(v))).collect();
            let mut out = [(0, 0, 0.0); 9];
            for a in 0..3 {
                for b in 0..3 {
                    out[3 * a + b] = (tri[a], tri[b], g[a].dot(&(c * g[b])));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let n = grid.len();
    Ok(CsrMatrix::from_triplets(n, local.into_iter().flatten().collect()))
}

impl OperatorForms {
    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// Diagonal of the lumped mass.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn stencil(&self) -> Stencil {
        self.stencil
    }

    /// Total mass, the discrete volume of K.
    pub fn volume(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// zᵗ A z, the discrete ∫(−L_K z) z dV_K.
    pub fn dirichlet(&self, z: &[f64]) -> f64 {
        self.stiffness.quad_form(z)
    }

    /// ∫ z² dV_K.
    pub fn mass_norm2(&self, z: &[f64]) -> f64 {
        z.iter().zip(&self.mass).map(|(a, m)| a * a * m).sum()
    }

    /// ∫ z dV_K.
    pub fn integral(&self, z: &[f64]) -> f64 {
        z.iter().zip(&self.mass).map(|(a, m)| a * m).sum()
    }

    /// Var_{dV_K}(z) = ∫z² dV − (∫z dV)²/V.
    pub fn variance(&self, z: &[f64]) -> f64 {
        let s = self.integral(z);
        self.mass_norm2(z) - s * s / self.volume()
    }

    /// zᵗAz / zᵗMz.
    pub fn rayleigh(&self, z: &[f64]) -> f64 {
        self.dirichlet(z) / self.mass_norm2(z)
    }

    /// |A·1|_∞ / ‖A‖_max.
    pub fn constant_defect(&self) -> f64 {
        let ones = vec![1.0; self.mass.len()];
        let r = self.stiffness.mul_vec(&ones);
        r.iter().fold(0.0f64, |m, v| m.max(v.abs())) / self.stiffness.max_abs()
    }
}
