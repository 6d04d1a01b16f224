use super::forms::OperatorForms;
use crate::error::{HbmError, Result};
use crate::geometry::{p_combination_values, support_on, wulff_body, BodySpec};
use crate::sphere_disc::SphereGrid;
use rayon::prelude::*;
use serde::Serialize;

/// V(zh;1)²/V − (n−1)/(n−p) V(zh;2) − (1−p)/(n−p) V(z²h;1), with z replaced
/// by its even part.
pub fn second_p_minkowski_margin(forms: &OperatorForms, z: &[f64], p: f64) -> Result<f64> {
    let grid = forms.grid();
    let n = grid.dim() as f64;
    if p >= n {
        return Err(HbmError::input(format!("p = {p} must be below n = {n}")));
    }
    if z.len() != grid.len() {
        return Err(HbmError::GridMismatch(format!("{} values on a grid of {} nodes", z.len(), grid.len())));
    }
    let anti = grid.antipode();
    let ze: Vec<f64> = (0..z.len()).map(|i| 0.5 * (z[i] + z[anti[i]])).collect();
    // with z centered, the V(·;1) terms collapse to −Var(z); D(z) is blind to constants
    let mean = forms.integral(&ze) / forms.volume();
    let zc: Vec<f64> = ze.iter().map(|x| x - mean).collect();
    Ok((n - 1.0) / (n - p) * forms.dirichlet(&zc) - forms.mass_norm2(&zc))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcavityRow {
    pub lambda: f64,
    pub volume: f64,
    pub g: f64,
    /// Whether the combination is itself a support function on the grid.
    pub support: bool,
    pub support_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcavityReport {
    pub p: f64,
    pub rows: Vec<ConcavityRow>,
    /// g(λ_{i−1}) − 2g(λ_i) + g(λ_{i+1}) for interior i.
    pub second_differences: Vec<f64>,
    pub max_second_difference: f64,
    pub min_second_difference: f64,
    pub error_estimate: f64,
    pub tol: f64,
    pub concave: bool,
}

/// Half the largest angular edge length of the grid (π/N on S¹).
fn angular_radius(grid: &SphereGrid) -> f64 {
    if let Some(dphi) = grid.dphi() {
        return 0.5 * dphi;
    }
    let p = grid.nodes();
    let mut m = 0.0f64;
    for t in grid.triangles() {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            m = m.max(p[a].dot(&p[b]).clamp(-1.0, 1.0).acos());
        }
    }
    0.5 * m
}

/// Second differences of g(λ) = V(A[w_λ])^{p/n}/p (log V at p = 0) along
/// the L^p combination of K0 and K1 at m equispaced λ.
pub fn geodesic_concavity(
    k0: &BodySpec,
    k1: &BodySpec,
    p: f64,
    m: usize,
    grid: &SphereGrid,
) -> Result<ConcavityReport> {
    if !(p <= 1.0) {
        return Err(HbmError::input(format!("p = {p} must be at most 1")));
    }
    if m < 5 {
        return Err(HbmError::input(format!("need at least 5 values of lambda, got {m}")));
    }
    if k0.dim() != grid.dim() || k1.dim() != grid.dim() {
        return Err(HbmError::GridMismatch("body and grid dimensions differ".into()));
    }
    let n = grid.dim() as f64;
    let h0 = support_on(k0, grid);
    let h1 = support_on(k1, grid);
    let rows = (0..m)
        .into_par_iter()
        .map(|i| {
            let lambda = i as f64 / (m - 1) as f64;
            let w = p_combination_values(&h0, &h1, lambda, p)?;
            let shape = wulff_body(grid, &w)?;
            let hs = shape.support_on(grid);
            let gap = w.iter().zip(&hs).map(|(a, b)| (a - b) / a).fold(0.0f64, f64::max);
            let v = shape.volume();
            let g = if p == 0.0 { v.ln() } else { v.powf(p / n) / p };
            Ok(ConcavityRow { lambda, volume: v, g, support: gap <= 1e-9, support_gap: gap })
        })
        .collect::<Result<Vec<_>>>()?;
    let second: Vec<f64> = rows.windows(3).map(|r| r[0].g - 2.0 * r[1].g + r[2].g).collect();
    let max = second.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = second.iter().copied().fold(f64::INFINITY, f64::min);
    let eps = n * (1.0 / angular_radius(grid).cos() - 1.0);
    let scale = if p == 0.0 { 1.0 } else { rows.iter().map(|r| r.volume.powf(p / n)).fold(0.0, f64::max) };
    let error_estimate = 4.0 * scale * eps;
    let gmax = rows.iter().map(|r| r.g.abs()).fold(0.0, f64::max);
    let tol = 1e-7 * gmax + error_estimate;
    Ok(ConcavityReport {
        p,
        rows,
        second_differences: second,
        max_second_difference: max,
        min_second_difference: min,
        error_estimate,
        tol,
        concave: max <= tol,
    })
}
