use super::body::{BodySpec, FD_STEP};
use super::tensor::TangentTensor;
use crate::error::{HbmError, Result};
use crate::quadrature::gauss_on;
use crate::sphere_disc::{SphereGrid, Vec3};
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSource {
    Analytic,
    FiniteDifference {
        step: f64,
    },
    /// Linear combination of other fields.
    Combination,
}

/// h, its tangential gradient and D²h at the nodes of a grid, plus h and D²h
/// at the cell sites (S¹ midpoints, S² triangle centroids) used by the
/// derivative terms.
#[derive(Clone, Debug)]
pub struct SupportField {
    grid: Arc<SphereGrid>,
    h: Vec<f64>,
    grad: Vec<Vec3>,
    d2h: Vec<TangentTensor>,
    cell_h: Vec<f64>,
    cell_d2h: Vec<TangentTensor>,
    /// ∫ (1/n) h dS_K over each node's dual arc, for planar bodies whose
    /// curvature density is unbounded (nodal sampling misses its mass).
    cell_mass: Option<Vec<f64>>,
    source: FieldSource,
    min_eig: f64,
    max_eig: f64,
}

fn node_err(e: HbmError, node: usize) -> HbmError {
    match e {
        HbmError::SingularNode { detail, .. } => HbmError::SingularNode { node, detail },
        e => e,
    }
}

/// Evaluate a body on every node (and cell site) of `grid` and validate the
/// field invariants.
pub fn sample_field(spec: &BodySpec, grid: &Arc<SphereGrid>) -> Result<SupportField> {
    if spec.dim() != grid.dim() {
        return Err(HbmError::GridMismatch(format!("body of dimension {} on grid {}", spec.dim(), grid.descriptor())));
    }
    if !spec.has_jet() {
        return Err(HbmError::Unsupported("this body is not in the smooth class; use a polygon path".into()));
    }
    let dim = grid.dim();
    let nodes: Vec<(usize, Vec3, [Vec3; 2])> =
        grid.nodes().iter().zip(grid.frames()).enumerate().map(|(i, (t, f))| (i, *t, *f)).collect();
    let jets: Vec<(f64, Vec3, TangentTensor)> = nodes
        .par_iter()
        .map(|(i, t, f)| {
            let j = spec.jet_at(t).map_err(|e| node_err(e, *i))?;
            let g = j.grad - t * j.grad.dot(t);
            Ok((j.h, g, TangentTensor::from_ambient(&j.hess, f, dim)))
        })
        .collect::<Result<_>>()?;
    let cell_h: Vec<f64> = grid.cell_dirs().par_iter().map(|t| spec.support_at(t)).collect();
    let cell_d2h: Vec<TangentTensor> = if dim == 3 {
        grid.cell_dirs()
            .par_iter()
            .zip(grid.cell_frames())
            .enumerate()
            .map(|(c, (t, f))| {
                let j = spec.jet_at(t).map_err(|e| match e {
                    HbmError::SingularNode { detail, .. } => {
                        HbmError::SingularNode { node: c, detail: format!("triangle centroid: {detail}") }
                    }
                    e => e,
                })?;
                Ok(TangentTensor::from_ambient(&j.hess, f, dim))
            })
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let source = if spec.uses_finite_differences() {
        FieldSource::FiniteDifference { step: FD_STEP }
    } else {
        FieldSource::Analytic
    };
    let mut h = Vec::with_capacity(jets.len());
    let mut grad = Vec::with_capacity(jets.len());
    let mut d2h = Vec::with_capacity(jets.len());
    for (a, b, c) in jets {
        h.push(a);
        grad.push(b);
        d2h.push(c);
    }
    let mut f = SupportField::validated(grid.clone(), h, grad, d2h, cell_h, cell_d2h, source)?;
    if dim == 2 && spec.has_unbounded_curvature() {
        f.cell_mass = Some(arc_cone_mass(spec, grid)?);
    }
    Ok(f)
}

// (1/2)∫_a^b h(h″+h) dφ = (1/2)([h h′]_a^b + ∫_a^b (h² − h′²) dφ); the
// boundary term carries the singular part exactly.
fn arc_cone_mass(spec: &BodySpec, grid: &SphereGrid) -> Result<Vec<f64>> {
    let n = grid.len();
    let dphi = 2.0 * std::f64::consts::PI / n as f64;
    let unit = |phi: f64| Vec3::new(phi.cos(), phi.sin(), 0.0);
    let hh1 = |phi: f64| -> Result<(f64, f64)> {
        let t = unit(phi);
        let g = spec.grad_at(&t)?;
        Ok((spec.support_at(&t), g.dot(&Vec3::new(-t.y, t.x, 0.0))))
    };
    (0..n)
        .into_par_iter()
        .map(|j| {
            let (a, b) = (j as f64 * dphi, (j + 1) as f64 * dphi);
            let (ha, da) = hh1(a)?;
            let (hb, db) = hh1(b)?;
            let mut s = hb * db - ha * da;
            for (x, w) in gauss_on(16, a, b) {
                let (h, d) = hh1(x)?;
                s += w * (h * h - d * d);
            }
            Ok(0.5 * s)
        })
        .collect()
}

impl SupportField {
    fn validated(
        grid: Arc<SphereGrid>,
        h: Vec<f64>,
        grad: Vec<Vec3>,
        d2h: Vec<TangentTensor>,
        cell_h: Vec<f64>,
        cell_d2h: Vec<TangentTensor>,
        source: FieldSource,
    ) -> Result<Self> {
        let worst_h = (0..h.len()).min_by(|&a, &b| h[a].total_cmp(&h[b])).unwrap();
        if !(h[worst_h] > 0.0) || h.iter().any(|v| !v.is_finite()) {
            return Err(HbmError::Invariant {
                node: worst_h,
                detail: format!("support value {} is not positive", h[worst_h]),
            });
        }
        let eig: Vec<(f64, f64)> = d2h.iter().map(TangentTensor::eigen_range).collect();
        let worst = (0..eig.len()).min_by(|&a, &b| eig[a].0.total_cmp(&eig[b].0)).unwrap();
        let min_eig = eig[worst].0;
        let max_eig = eig.iter().map(|e| e.1).fold(f64::MIN, f64::max);
        if !(min_eig > 0.0) {
            return Err(HbmError::Invariant {
                node: worst,
                detail: format!("D2h is not positive definite (smallest eigenvalue {min_eig:.3e})"),
            });
        }
        if let Some(c) = cell_h.iter().position(|v| !(*v > 0.0)) {
            return Err(HbmError::Invariant { node: c, detail: "support value at a cell site is not positive".into() });
        }
        if let Some(c) = cell_d2h.iter().position(|t| !(t.eigen_range().0 > 0.0)) {
            return Err(HbmError::Invariant {
                node: c,
                detail: "D2h at a triangle centroid is not positive definite".into(),
            });
        }
        for (i, &j) in grid.antipode().iter().enumerate() {
            if (h[i] - h[j]).abs() > 1e-12 * h[i] {
                return Err(HbmError::Invariant {
                    node: i,
                    detail: format!("not even: h = {} at the antipode {}", h[i], h[j]),
                });
            }
        }
        Ok(SupportField { grid, h, grad, d2h, cell_h, cell_d2h, cell_mass: None, source, min_eig, max_eig })
    }

    /// Σ c_i · field_i. Fails when the result leaves the smooth convex class.
    pub fn combine(terms: &[(f64, &SupportField)]) -> Result<SupportField> {
        let (_, first) = terms.first().ok_or_else(|| HbmError::input("empty combination"))?;
        for (_, f) in terms {
            check_same_grid(first, f)?;
        }
        let grid = first.grid.clone();
        let n = first.h.len();
        let lin = |get: &dyn Fn(&SupportField, usize) -> f64, len: usize| -> Vec<f64> {
            (0..len).map(|i| terms.iter().map(|(c, f)| c * get(f, i)).sum()).collect()
        };
        let h = lin(&|f, i| f.h[i], n);
        let cell_h = lin(&|f, i| f.cell_h[i], first.cell_h.len());
        let grad = (0..n).map(|i| terms.iter().fold(Vec3::zeros(), |a, (c, f)| a + f.grad[i] * *c)).collect();
        let tsum = |get: &dyn Fn(&SupportField) -> &[TangentTensor], len: usize| -> Vec<TangentTensor> {
            (0..len)
                .map(|i| {
                    let mut acc = get(terms[0].1)[i].scale(terms[0].0);
                    for (c, f) in &terms[1..] {
                        acc = acc.add(&get(f)[i].scale(*c));
                    }
                    acc
                })
                .collect()
        };
        let d2h = tsum(&|f| &f.d2h, n);
        let cell_d2h = tsum(&|f| &f.cell_d2h, first.cell_d2h.len());
        SupportField::validated(grid, h, grad, d2h, cell_h, cell_d2h, FieldSource::Combination)
    }

    /// h_K + h_L, the support field of the Minkowski sum.
    pub fn minkowski_sum(&self, other: &SupportField) -> Result<SupportField> {
        SupportField::combine(&[(1.0, self), (1.0, other)])
    }

    pub fn scaled(&self, c: f64) -> Result<SupportField> {
        if !(c > 0.0) {
            return Err(HbmError::input(format!("scale factor must be positive, got {c}")));
        }
        let mut f = SupportField::combine(&[(c, self)])?;
        f.cell_mass = self.cell_mass.as_ref().map(|m| m.iter().map(|v| v * c * c).collect());
        Ok(f)
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Tangential gradient as an ambient vector.
    pub fn grad(&self) -> &[Vec3] {
        &self.grad
    }

    /// D²h at the nodes, in the grid's node frames.
    pub fn d2h(&self) -> &[TangentTensor] {
        &self.d2h
    }

    /// h at the cell sites.
    pub fn cell_h(&self) -> &[f64] {
        &self.cell_h
    }

    /// D²h at the triangle centroids in the cell frames (empty on S¹).
    pub fn cell_d2h(&self) -> &[TangentTensor] {
        &self.cell_d2h
    }

    pub fn cell_mass(&self) -> Option<&[f64]> {
        self.cell_mass.as_deref()
    }

    pub fn source(&self) -> FieldSource {
        self.source
    }

    /// Smallest eigenvalue of D²h over the nodes.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eig
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.max_eig
    }
}

pub(crate) fn check_same_grid(a: &SupportField, b: &SupportField) -> Result<()> {
    if Arc::ptr_eq(&a.grid, &b.grid) || a.grid.descriptor() == b.grid.descriptor() {
        Ok(())
    } else {
        Err(HbmError::GridMismatch(format!("{} vs {}", a.grid.descriptor(), b.grid.descriptor())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize) -> Arc<SphereGrid> {
        Arc::new(SphereGrid::circle(n).unwrap())
    }

    #[test]
    fn ball_field() {
        let g = circle(64);
        let f = sample_field(&BodySpec::ball(2, 1.0).unwrap(), &g).unwrap();
        assert!(f.h().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        assert!(f.d2h().iter().all(|t| (t.det() - 1.0).abs() < 1e-15));
        assert_eq!(f.source(), FieldSource::Analytic);
        let s = Arc::new(SphereGrid::icosphere(2).unwrap());
        let f3 = sample_field(&BodySpec::ball(3, 1.0).unwrap(), &s).unwrap();
        assert!(f3.d2h().iter().all(|t| t.distance(&TangentTensor::identity(3)) < 1e-14));
        assert_eq!(f3.cell_d2h().len(), s.triangles().len());
    }

    #[test]
    fn lq_field_against_closed_form() {
        let g = circle(256);
        let f = sample_field(&BodySpec::lq(2, 4.0).unwrap(), &g).unwrap();
        assert!(f.min_eigenvalue() > 0.0);
        // h(φ) = (|c|^s + |s|^s)^{1/s}, s = 4/3: h'' + h by central differences
        let s = 4.0 / 3.0;
        let hphi = |p: f64| (p.cos().abs().powf(s) + p.sin().abs().powf(s)).powf(1.0 / s);
        for j in (0..256).step_by(17) {
            let p = g.angle(j);
            let e = 1e-4;
            let dd = (hphi(p + e) - 2.0 * hphi(p) + hphi(p - e)) / (e * e);
            assert!((f.d2h()[j].trace() - (dd + hphi(p))).abs() < 1e-5 * (dd.abs() + 1.0));
        }
    }

    #[test]
    fn singular_and_mismatch_errors() {
        let g = Arc::new(SphereGrid::icosphere(1).unwrap());
        assert!(matches!(sample_field(&BodySpec::ball(2, 1.0).unwrap(), &g), Err(HbmError::GridMismatch(_))));
        assert!(matches!(
            sample_field(&BodySpec::lq(2, f64::INFINITY).unwrap(), &circle(16)),
            Err(HbmError::Unsupported(_))
        ));
        // an axis-aligned direction through the jet directly
        let b = BodySpec::lq(2, 4.0).unwrap();
        assert!(matches!(b.jet_at(&Vec3::new(1.0, 0.0, 0.0)), Err(HbmError::SingularNode { .. })));
    }

    #[test]
    fn combinations_are_linear() {
        let g = circle(64);
        let k = sample_field(&BodySpec::ellipsoid(&[1.5, 0.8]).unwrap(), &g).unwrap();
        let l = sample_field(&BodySpec::lq(2, 3.0).unwrap(), &g).unwrap();
        let s = k.minkowski_sum(&l).unwrap();
        for i in 0..64 {
            assert_eq!(s.h()[i], k.h()[i] + l.h()[i]);
            assert!((s.d2h()[i].trace() - k.d2h()[i].trace() - l.d2h()[i].trace()).abs() < 1e-14);
        }
        assert!(SupportField::combine(&[(1.0, &k), (-2.0, &k)]).is_err());
        let other = sample_field(&BodySpec::ball(2, 1.0).unwrap(), &circle(32)).unwrap();
        assert!(matches!(k.minkowski_sum(&other), Err(HbmError::GridMismatch(_))));
    }
}
