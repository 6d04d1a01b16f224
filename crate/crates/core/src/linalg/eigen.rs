//! Smallest eigenpairs of the pencil `A x = λ M x` with `A` symmetric positive
//! semidefinite (sparse) and `M` diagonal positive.

use super::envelope::EnvelopeCholesky;
use super::sparse::CsrMatrix;
use crate::error::{HbmError, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

/// Reduced dimensions up to this size use the dense solver.
pub const DENSE_LIMIT: usize = 800;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Dense,
    ShiftInvert,
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors, one per value.
    pub vectors: Vec<Vec<f64>>,
    pub solver: SolverKind,
    pub iterations: usize,
    /// Largest relative residual `‖Ax − λMx‖_{M⁻¹} / max(|λ|, 1)`.
    pub max_residual: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct KrylovOptions {
    pub block: usize,
    pub tol: f64,
    pub max_basis: usize,
    pub shift: f64,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions { block: 6, tol: 1e-9, max_basis: 1500, shift: -1.0 }
    }
}

fn mdot(m: &[f64], x: &[f64], y: &[f64]) -> f64 {
    m.iter().zip(x).zip(y).map(|((mi, xi), yi)| mi * xi * yi).sum()
}

fn residual(a: &CsrMatrix, m: &[f64], lambda: f64, x: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let r2: f64 = ax.iter().zip(x).zip(m).map(|((axi, xi), mi)| (axi - lambda * mi * xi).powi(2) / mi).sum();
    r2.sqrt() / lambda.abs().max(1.0)
}

/// `k` smallest eigenpairs. With `deflate_constant`, the constant vector is
/// removed from the problem and never reported.
pub fn smallest_eigenpairs(a: &CsrMatrix, m: &[f64], k: usize, deflate_constant: bool) -> Result<EigenResult> {
    if a.dim() <= DENSE_LIMIT {
        dense_generalized(a, m, k, deflate_constant)
    } else {
        shift_invert_krylov(a, m, k, deflate_constant, KrylovOptions::default())
    }
}

fn check_k(n: usize, k: usize, deflate: bool) -> Result<()> {
    let avail = if deflate { n.saturating_sub(1) } else { n };
    if k == 0 || k > avail {
        return Err(HbmError::input(format!("requested {k} eigenpairs from a space of dimension {avail}")));
    }
    Ok(())
}

/// Dense solve through `M^{-1/2} A M^{-1/2}`. Constant deflation shifts the
/// constant mode above the spectrum by adding `c (M1)(M1)ᵗ`.
pub fn dense_generalized(a: &CsrMatrix, m: &[f64], k: usize, deflate_constant: bool) -> Result<EigenResult> {
    let n = a.dim();
    check_k(n, k, deflate_constant)?;
    let s: Vec<f64> = m.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut c = a.to_dense();
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] *= s[i] * s[j];
        }
    }
    if deflate_constant {
        let total: f64 = m.iter().sum();
        let bound = (0..n).map(|i| c.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        let shift = 2.0 * (bound + 1.0) / total;
        let u: Vec<f64> = m.iter().map(|v| v.sqrt()).collect();
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] += shift * u[i] * u[j];
            }
        }
    }
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let mut values = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    let mut worst = 0.0f64;
    for &i in idx.iter().take(k) {
        let lambda = eig.eigenvalues[i];
        let mut x: Vec<f64> = (0..n).map(|r| eig.eigenvectors[(r, i)] * s[r]).collect();
        canonical_sign(&mut x);
        worst = worst.max(residual(a, m, lambda, &x));
        values.push(lambda);
        vectors.push(x);
    }
    Ok(EigenResult { values, vectors, solver: SolverKind::Dense, iterations: 1, max_residual: worst })
}

// Fix the sign so that the largest-magnitude entry (first on ties) is positive.
fn canonical_sign(x: &mut [f64]) {
    let mut best = 0usize;
    for i in 1..x.len() {
        if x[i].abs() > x[best].abs() * (1.0 + 1e-9) {
            best = i;
        }
    }
    if x.get(best).is_some_and(|v| *v < 0.0) {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Block Krylov iteration on `(A − σM)⁻¹M` with full M-reorthogonalization and
/// Rayleigh-Ritz on the whole basis. Blocks wider than any eigenvalue
/// multiplicity of interest resolve degenerate clusters.
pub fn shift_invert_krylov(
    a: &CsrMatrix,
    m: &[f64],
    k: usize,
    deflate_constant: bool,
    opts: KrylovOptions,
) -> Result<EigenResult> {
    let n = a.dim();
    check_k(n, k, deflate_constant)?;
    if opts.shift >= 0.0 {
        return Err(HbmError::input("shift must be negative for a positive semidefinite pencil"));
    }
    let shifted = a.add_diagonal(&m.iter().map(|v| -opts.shift * v).collect::<Vec<_>>());
    let chol = EnvelopeCholesky::factor(&shifted)?;
    let op = |x: &[f64]| -> Vec<f64> {
        let mx: Vec<f64> = x.iter().zip(m).map(|(a, b)| a * b).collect();
        chol.solve(&mx)
    };
    let total: f64 = m.iter().sum();
    let unit = vec![1.0 / total.sqrt(); n];
    let avail = if deflate_constant { n - 1 } else { n };
    let block = opts.block.max(k.min(16)).min(avail);

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut images: Vec<Vec<f64>> = Vec::new();
    let mut h: Vec<Vec<f64>> = Vec::new();

    let orthonormalize = |cand: Vec<Vec<f64>>, basis: &[Vec<f64>]| -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for mut x in cand {
            let norm0 = mdot(m, &x, &x).sqrt();
            if norm0 == 0.0 {
                continue;
            }
            for _ in 0..2 {
                if deflate_constant {
                    let c = mdot(m, &unit, &x);
                    x.iter_mut().zip(&unit).for_each(|(xi, ui)| *xi -= c * ui);
                }
                for q in basis.iter().chain(out.iter()) {
                    let c = mdot(m, q, &x);
                    x.iter_mut().zip(q).for_each(|(xi, qi)| *xi -= c * qi);
                }
            }
            let norm = mdot(m, &x, &x).sqrt();
            if norm > 1e-10 * norm0 {
                x.iter_mut().for_each(|v| *v /= norm);
                out.push(x);
            }
        }
        out
    };

    let start: Vec<Vec<f64>> = (0..block)
        .map(|c| (0..n).map(|i| 1.0 + 0.1 * (0.7 * (i + 1) as f64 * (c + 1) as f64 + 0.3 * c as f64).sin()).collect())
        .collect();
    let mut next = orthonormalize(start, &basis);
    let mut iterations = 0;
    let mut last_res = f64::INFINITY;
    let mut history: Vec<f64> = Vec::new();
    loop {
        iterations += 1;
        for q in next.drain(..) {
            let w = op(&q);
            let j = basis.len();
            let mut col = Vec::with_capacity(j + 1);
            for qi in &basis {
                col.push(mdot(m, qi, &w));
            }
            col.push(mdot(m, &q, &w));
            for (i, row) in h.iter_mut().enumerate() {
                row.push(col[i]);
            }
            h.push(col);
            basis.push(q);
            images.push(w);
        }
        let dim = basis.len();
        let exhausted = dim >= avail;
        if dim >= k + block || exhausted {
            let mut hm = DMatrix::from_fn(dim, dim, |i, j| 0.5 * (h[i][j] + h[j][i]));
            hm = (&hm + hm.transpose()) * 0.5;
            let eig = SymmetricEigen::new(hm);
            let mut idx: Vec<usize> = (0..dim).collect();
            idx.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
            let mut values = Vec::with_capacity(k);
            let mut vectors = Vec::with_capacity(k);
            let mut worst = 0.0f64;
            for &c in idx.iter().take(k) {
                let theta = eig.eigenvalues[c];
                let lambda = 1.0 / theta + opts.shift;
                let mut x = vec![0.0; n];
                for (r, q) in basis.iter().enumerate() {
                    let s = eig.eigenvectors[(r, c)];
                    x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += s * qi);
                }
                let nx = mdot(m, &x, &x).sqrt();
                x.iter_mut().for_each(|v| *v /= nx);
                canonical_sign(&mut x);
                worst = worst.max(residual(a, m, lambda, &x));
                values.push(lambda);
                vectors.push(x);
            }
            // a residual that stops improving near tol is at its rounding floor
            let stalled = worst <= 1e3 * opts.tol && history.len() >= 3 && worst > 0.5 * history[history.len() - 3];
            history.push(worst);
            last_res = worst;
            if worst <= opts.tol || exhausted || stalled {
                let mut order: Vec<usize> = (0..k).collect();
                order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
                return Ok(EigenResult {
                    values: order.iter().map(|&i| values[i]).collect(),
                    vectors: order.iter().map(|&i| vectors[i].clone()).collect(),
                    solver: SolverKind::ShiftInvert,
                    iterations,
                    max_residual: worst,
                });
            }
        }
        if dim >= opts.max_basis {
            return Err(HbmError::NoConvergence { residual: last_res, iterations });
        }
        let tail = images[dim - block.min(dim)..].to_vec();
        next = orthonormalize(tail, &basis);
        if next.is_empty() {
            // Invariant subspace reached: restart with fresh deterministic vectors.
            let fresh: Vec<Vec<f64>> = (0..block)
                .map(|c| (0..n).map(|i| ((i * 7919 + c * 104729 + iterations) % 1009) as f64 / 1009.0 - 0.5).collect())
                .collect();
            next = orthonormalize(fresh, &basis);
            if next.is_empty() {
                return Err(HbmError::NoConvergence { residual: last_res, iterations });
            }
        }
    }
}
