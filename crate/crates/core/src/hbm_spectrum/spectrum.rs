use super::forms::{assemble, OperatorForms};
use crate::error::{HbmError, Result};
use crate::geometry::{sample_field, BodySpec};
use crate::linalg::{smallest_eigenpairs, CsrMatrix, SolverKind};
use crate::sphere_disc::{EvenQuotient, GridDescriptor, SphereGrid, Stencil};
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug, Serialize)]
pub struct Discretization {
    pub grid: GridDescriptor,
    pub nodes: usize,
    /// Size of the solved problem (classes of antipodal pairs when even).
    pub reduced_dim: usize,
    pub stencil: Option<Stencil>,
    pub solver: SolverKind,
    pub solver_tolerance: f64,
    pub iterations: usize,
    pub max_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    /// Ascending generalized eigenvalues of (stiffness, mass), constant mode included.
    pub eigenvalues: Vec<f64>,
    /// Mass-normalized eigenvectors as node values.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    pub even_restricted: bool,
    pub lambda_0: f64,
    /// Eigenvalues within `cluster_tol` of 1 (the linear-function cluster).
    pub cluster_size: usize,
    pub cluster_tol: f64,
    /// First eigenvalue above the 1-cluster (full spectrum).
    pub lambda_above_cluster: Option<f64>,
    /// Second even eigenvalue (even spectrum).
    pub lambda_1e: Option<f64>,
    /// n − (n−1) λ₁,ₑ.
    pub p_star: Option<f64>,
    pub discretization: Discretization,
}

/// Even restriction: identify antipodal nodes, summing their weights.
pub fn even_reduce(forms: &OperatorForms) -> (EvenQuotient, CsrMatrix, Vec<f64>) {
    let q = EvenQuotient::new(forms.grid());
    let a = forms.stiffness().reduce(&q.class_of, q.len());
    let m = q.sum(forms.mass());
    (q, a, m)
}

/// Default width of the 1-cluster window: tight on S¹, mesh-sized on S².
pub fn default_cluster_tol(dim: usize) -> f64 {
    if dim == 2 {
        1e-6
    } else {
        1e-2
    }
}

pub fn solve_spectrum(forms: &OperatorForms, k: usize, even_only: bool) -> Result<SpectralReport> {
    solve_spectrum_with(forms, k, even_only, default_cluster_tol(forms.grid().dim()))
}

pub fn solve_spectrum_with(
    forms: &OperatorForms,
    k: usize,
    even_only: bool,
    cluster_tol: f64,
) -> Result<SpectralReport> {
    let grid = forms.grid();
    let n = grid.dim() as f64;
    let (res, vectors, reduced) = if even_only {
        let (q, a, m) = even_reduce(forms);
        let r = smallest_eigenpairs(&a, &m, k, false)?;
        let v = r.vectors.iter().map(|y| q.lift(y)).collect::<Vec<_>>();
        (r, v, q.len())
    } else {
        let r = smallest_eigenpairs(forms.stiffness(), forms.mass(), k, false)?;
        let v = r.vectors.clone();
        (r, v, grid.len())
    };
    let values = res.values.clone();
    let lambda_0 = values[0];
    let (cluster_size, lambda_above, lambda_1e) = if even_only {
        (0, None, values.get(1).copied())
    } else {
        let c = values.iter().filter(|v| (**v - 1.0).abs() <= cluster_tol).count();
        let above = values.iter().copied().find(|v| *v > 1.0 + cluster_tol);
        (c, above, None)
    };
    Ok(SpectralReport {
        eigenvalues: values,
        eigenvectors: vectors,
        even_restricted: even_only,
        lambda_0,
        cluster_size,
        cluster_tol,
        lambda_above_cluster: lambda_above,
        lambda_1e,
        p_star: lambda_1e.map(|l| n - (n - 1.0) * l),
        discretization: discretization(grid, forms, reduced, res.solver, res.iterations, res.max_residual),
    })
}

fn discretization(
    grid: &SphereGrid,
    forms: &OperatorForms,
    reduced: usize,
    solver: SolverKind,
    iterations: usize,
    max_residual: f64,
) -> Discretization {
    Discretization {
        grid: grid.descriptor(),
        nodes: grid.len(),
        reduced_dim: reduced,
        stencil: if grid.dim() == 2 { Some(forms.stencil()) } else { None },
        solver,
        solver_tolerance: 1e-9,
        iterations,
        max_residual,
    }
}

/// λ₁,ₑ with its eigenvector (node values) and discretization record.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub lambda_1e: f64,
    pub p_star: f64,
    #[serde(skip)]
    pub eigenvector: Vec<f64>,
    pub discretization: Discretization,
}

/// Smallest even eigenvalue above the constants, by deflation.
pub fn even_gap(forms: &OperatorForms) -> Result<GapReport> {
    let n = forms.grid().dim() as f64;
    let (q, a, m) = even_reduce(forms);
    let r = smallest_eigenpairs(&a, &m, 1, true)?;
    let l = r.values[0];
    Ok(GapReport {
        lambda_1e: l,
        p_star: n - (n - 1.0) * l,
        eigenvector: q.lift(&r.vectors[0]),
        discretization: discretization(forms.grid(), forms, q.len(), r.solver, r.iterations, r.max_residual),
    })
}

pub fn gap_report(spec: &BodySpec, grid: &Arc<SphereGrid>) -> Result<GapReport> {
    even_gap(&assemble(&sample_field(spec, grid)?)?)
}

pub fn lambda_1e(spec: &BodySpec, grid: &Arc<SphereGrid>) -> Result<f64> {
    Ok(gap_report(spec, grid)?.lambda_1e)
}

pub fn p_star(spec: &BodySpec, grid: &Arc<SphereGrid>) -> Result<f64> {
    Ok(gap_report(spec, grid)?.p_star)
}

/// Max over the first k eigenvalues of |λ(K) − λ(T K)| / max(|λ|, 1).
pub fn equivariance_check(spec: &BodySpec, t: &[f64], grid: &Arc<SphereGrid>, k: usize) -> Result<f64> {
    let image = BodySpec::linear_image(spec.clone(), t)?;
    let a = solve_spectrum(&assemble(&sample_field(spec, grid)?)?, k, false)?;
    let b = solve_spectrum(&assemble(&sample_field(&image, grid)?)?, k, false)?;
    if a.eigenvalues.len() != b.eigenvalues.len() {
        return Err(HbmError::Numerical("eigenvalue counts differ".into()));
    }
    Ok(a.eigenvalues.iter().zip(&b.eigenvalues).map(|(x, y)| (x - y).abs() / x.abs().max(1.0)).fold(0.0, f64::max))
}
