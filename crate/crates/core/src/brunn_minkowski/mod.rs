//! Surface-area, cone and L^p surface measures, mixed discriminants and mixed
//! volumes of sampled support functions.

use crate::error::{HbmError, Result};
use crate::geometry::{SupportField, TangentTensor};
use crate::hbm_spectrum::{assemble, OperatorForms};
use crate::sphere_disc::{CircleDifference, SphereGrid, Stencil, TriangleGradients};
use nalgebra::Vector2;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureKind {
    SurfaceArea,
    Cone,
    LpSurface { p: f64 },
}

/// Density of a measure on the sphere with respect to the grid weights.
#[derive(Clone, Debug)]
pub struct MeasureField {
    pub grid: Arc<SphereGrid>,
    pub density: Vec<f64>,
    pub kind: MeasureKind,
    pub total: f64,
}

impl MeasureField {
    fn new(grid: Arc<SphereGrid>, density: Vec<f64>, kind: MeasureKind) -> Self {
        let total = density.iter().zip(grid.weights()).map(|(d, w)| d * w).sum();
        MeasureField { grid, density, kind, total }
    }

    /// ∫ f dμ.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.density.iter().zip(f).zip(self.grid.weights()).map(|((d, f), w)| d * f * w).sum()
    }
}

/// det D²h per node.
pub fn surface_density(k: &SupportField) -> MeasureField {
    let d = k.d2h().iter().map(TangentTensor::det).collect();
    MeasureField::new(k.grid().clone(), d, MeasureKind::SurfaceArea)
}

/// (1/n) h det D²h, or the arc-integrated cone mass when the field carries one.
pub fn cone_density(k: &SupportField) -> MeasureField {
    let n = k.dim() as f64;
    let d = match k.cell_mass() {
        Some(m) => m.iter().zip(k.grid().weights()).map(|(m, w)| m / w).collect(),
        None => k.h().iter().zip(k.d2h()).map(|(h, t)| h * t.det() / n).collect(),
    };
    MeasureField::new(k.grid().clone(), d, MeasureKind::Cone)
}

/// h^{1−p} det D²h.
pub fn lp_surface_density(k: &SupportField, p: f64) -> MeasureField {
    let d = k.h().iter().zip(k.d2h()).map(|(h, t)| h.powf(1.0 - p) * t.det()).collect();
    MeasureField::new(k.grid().clone(), d, MeasureKind::LpSurface { p })
}

/// Mixed discriminant of m = n−1 symmetric tangent matrices. For m = 1 it is
/// the single entry; for m = 2, (tr A tr B − tr AB)/2.
pub fn mixed_discriminant(mats: &[&TangentTensor]) -> Result<f64> {
    match mats {
        [TangentTensor::Scalar(a)] => Ok(*a),
        [TangentTensor::Mat(a), TangentTensor::Mat(b)] => Ok(0.5 * (a.trace() * b.trace() - (a * b).trace())),
        _ => Err(HbmError::input(format!(
            "mixed discriminant needs one scalar or two 2x2 matrices, got {} arguments of mixed size",
            mats.len()
        ))),
    }
}

fn same_grid(fields: &[&SupportField]) -> Result<()> {
    for f in &fields[1..] {
        crate::geometry::check_same_grid(fields[0], f)?;
    }
    Ok(())
}

fn check_len(k: &SupportField, w: &[f64]) -> Result<()> {
    if w.len() != k.len() {
        return Err(HbmError::GridMismatch(format!("{} node values for a grid of {}", w.len(), k.len())));
    }
    Ok(())
}

/// V(h₁,…,h_n) = (1/n) ∫ h_n D_{n−1}(D²h₁,…,D²h_{n−1}) dθ.
pub fn mixed_volume(fields: &[&SupportField]) -> Result<f64> {
    let Some(first) = fields.first() else {
        return Err(HbmError::input("mixed volume of no bodies"));
    };
    let n = first.dim();
    if fields.len() != n {
        return Err(HbmError::input(format!("mixed volume in dimension {n} takes {n} bodies, got {}", fields.len())));
    }
    same_grid(fields)?;
    let w = first.grid().weights();
    let last = fields[n - 1];
    let mut s = 0.0;
    for (j, (wj, hj)) in w.iter().zip(last.h()).enumerate() {
        let mats: Vec<&TangentTensor> = fields[..n - 1].iter().map(|f| &f.d2h()[j]).collect();
        s += wj * hj * mixed_discriminant(&mats)?;
    }
    Ok(s / n as f64)
}

pub fn volume(k: &SupportField) -> f64 {
    cone_density(k).total
}

/// P_L(K) = ∫ h_L dS_K.
pub fn perimeter_aniso(k: &SupportField, l: &SupportField) -> Result<f64> {
    same_grid(&[k, l])?;
    Ok(surface_density(k).integrate(l.h()))
}

/// Pairwise table V(K_i, K_j, …, K_j) (n = 2: the symmetric V(K_i, K_j)).
pub fn mixed_table(fields: &[SupportField]) -> Result<Vec<Vec<f64>>> {
    let mut t = vec![vec![0.0; fields.len()]; fields.len()];
    for i in 0..fields.len() {
        for j in 0..fields.len() {
            let n = fields[i].dim();
            let mut args = vec![&fields[j]; n];
            args[n - 1] = &fields[i];
            t[i][j] = mixed_volume(&args)?;
        }
    }
    Ok(t)
}

/// V(w;m) = V(w,…,w,h_K,…,h_K) for m = 1, 2.
pub fn v_w_m(w: &[f64], m: usize, k: &SupportField) -> Result<f64> {
    match m {
        1 => {
            check_len(k, w)?;
            Ok(surface_density(k).integrate(w) / k.dim() as f64)
        }
        2 => v_w_m_with(&assemble(k)?, w, 2, k),
        _ => Err(HbmError::input(format!("V(w;m) supports m = 1, 2, got {m}"))),
    }
}

/// As [`v_w_m`] with forms already assembled for `k`. V(w;2) uses
/// V(z²h;1) − Q_K(z), z = w/h, Q_K the Dirichlet form.
pub fn v_w_m_with(forms: &OperatorForms, w: &[f64], m: usize, k: &SupportField) -> Result<f64> {
    check_len(k, w)?;
    let z: Vec<f64> = w.iter().zip(k.h()).map(|(w, h)| w / h).collect();
    match m {
        1 => Ok(forms.integral(&z)),
        2 => Ok(forms.mass_norm2(&z) - forms.dirichlet(&z)),
        _ => Err(HbmError::input(format!("V(w;m) supports m = 1, 2, got {m}"))),
    }
}

/// V(w;2) term by term:
/// (1/(n(n−1)))[∫ tr(adj D²h) w² dθ − ∫ ⟨adj(D²h) ∇w, ∇w⟩ dθ].
pub fn v2_direct(w: &[f64], k: &SupportField) -> Result<f64> {
    check_len(k, w)?;
    let grid = k.grid();
    let n = k.dim() as f64;
    let zeroth: f64 =
        w.iter().zip(k.d2h()).zip(grid.weights()).map(|((w, t), wt)| t.adjugate().trace() * w * w * wt).sum();
    let first = match grid.dphi() {
        Some(dphi) => {
            let d = CircleDifference::new(grid.len(), dphi, Stencil::default()).apply(w);
            d.iter().map(|x| x * x * dphi).sum::<f64>()
        }
        None => {
            let g = TriangleGradients::new(grid).apply(grid, w);
            let mut s = 0.0;
            for (t, gt) in g.iter().enumerate() {
                let e = grid.cell_frames()[t];
                let v = Vector2::new(e[0].dot(gt), e[1].dot(gt));
                let TangentTensor::Mat(adj) = k.cell_d2h()[t].adjugate() else {
                    unreachable!("spatial tensors are 2x2")
                };
                s += grid.triangle_areas()[t] * v.dot(&(adj * v));
            }
            s
        }
    };
    Ok((zeroth - first) / (n * (n - 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_field, BodySpec};
    use approx::assert_relative_eq;
    use nalgebra::Matrix2;
    use std::f64::consts::PI;

    fn circle(n: usize) -> Arc<SphereGrid> {
        Arc::new(SphereGrid::circle(n).unwrap())
    }

    #[test]
    fn disk_measures() {
        let g = circle(256);
        let k = sample_field(&BodySpec::ball(2, 1.0).unwrap(), &g).unwrap();
        let s = surface_density(&k);
        assert!(s.density.iter().all(|d| (d - 1.0).abs() < 1e-12));
        assert_relative_eq!(s.total, 2.0 * PI, max_relative = 1e-12);
        assert_relative_eq!(cone_density(&k).total, PI, max_relative = 1e-12);
        let lp = lp_surface_density(&k, 1.0);
        assert_eq!(lp.density, s.density);
        let r = sample_field(&BodySpec::ball(2, 3.0).unwrap(), &g).unwrap();
        assert_relative_eq!(surface_density(&r).total, 6.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn ball_measures() {
        let g = Arc::new(SphereGrid::icosphere(4).unwrap());
        let k = sample_field(&BodySpec::ball(3, 1.0).unwrap(), &g).unwrap();
        let s = surface_density(&k);
        assert!(s.density.iter().all(|d| (d - 1.0).abs() < 1e-12));
        assert_relative_eq!(s.total, 4.0 * PI, max_relative = 1e-2);
        assert_relative_eq!(volume(&k), 4.0 * PI / 3.0, max_relative = 1e-2);
    }

    #[test]
    fn discriminants() {
        let i = TangentTensor::Mat(Matrix2::identity());
        assert_relative_eq!(mixed_discriminant(&[&i, &i]).unwrap(), 1.0);
        let (a, b, c, d) = (2.0, 3.0, 5.0, 7.0);
        let x = TangentTensor::Mat(Matrix2::new(a, 0.0, 0.0, b));
        let y = TangentTensor::Mat(Matrix2::new(c, 0.0, 0.0, d));
        assert_relative_eq!(mixed_discriminant(&[&x, &y]).unwrap(), (a * d + b * c) / 2.0, epsilon = 1e-14);
        let s = TangentTensor::Mat(Matrix2::new(1.3, -0.4, -0.4, 0.7));
        assert_relative_eq!(mixed_discriminant(&[&s, &s]).unwrap(), s.det(), epsilon = 1e-14);
        assert_eq!(mixed_discriminant(&[&TangentTensor::Scalar(2.5)]).unwrap(), 2.5);
        assert!(mixed_discriminant(&[&x, &TangentTensor::Scalar(1.0)]).is_err());
    }

    #[test]
    fn disk_mixed_volumes() {
        let g = circle(256);
        let k = sample_field(&BodySpec::ball(2, 1.0).unwrap(), &g).unwrap();
        let l = sample_field(&BodySpec::ball(2, 2.0).unwrap(), &g).unwrap();
        assert_relative_eq!(mixed_volume(&[&k, &k]).unwrap(), PI, max_relative = 1e-12);
        assert_relative_eq!(mixed_volume(&[&k, &l]).unwrap(), 2.0 * PI, max_relative = 1e-12);
        assert_relative_eq!(perimeter_aniso(&k, &k).unwrap(), 2.0 * PI, max_relative = 1e-12);
    }

    #[test]
    fn ellipse_area_and_symmetry() {
        let g = circle(512);
        let k = sample_field(&BodySpec::ellipsoid(&[2.0, 1.0]).unwrap(), &g).unwrap();
        let l = sample_field(&BodySpec::ellipsoid(&[0.7, 1.6]).unwrap(), &g).unwrap();
        assert!((volume(&k) - 2.0 * PI).abs() < 1e-6);
        let a = mixed_volume(&[&k, &l]).unwrap();
        let b = mixed_volume(&[&l, &k]).unwrap();
        assert!((a - b).abs() / a < 1e-10);
        let p = perimeter_aniso(&k, &l).unwrap();
        assert!((p - 2.0 * b).abs() / p < 1e-12);
    }

    #[test]
    fn grid_mismatch() {
        let k = sample_field(&BodySpec::ball(2, 1.0).unwrap(), &circle(64)).unwrap();
        let l = sample_field(&BodySpec::ball(2, 1.0).unwrap(), &circle(128)).unwrap();
        assert!(matches!(mixed_volume(&[&k, &l]), Err(HbmError::GridMismatch(_))));
        assert!(matches!(v_w_m(&[1.0; 3], 1, &k), Err(HbmError::GridMismatch(_))));
    }

    #[test]
    fn v_w_m_of_h() {
        let g = circle(256);
        let k = sample_field(&BodySpec::ellipsoid(&[1.5, 0.8]).unwrap(), &g).unwrap();
        let v = volume(&k);
        assert_relative_eq!(v_w_m(k.h(), 1, &k).unwrap(), v, max_relative = 1e-12);
        assert_relative_eq!(v_w_m(k.h(), 2, &k).unwrap(), v, max_relative = 1e-12);
        assert_relative_eq!(v2_direct(k.h(), &k).unwrap(), v, max_relative = 1e-6);
    }

    #[test]
    fn linear_functions_have_zero_second_volume() {
        let g = circle(512);
        let k = sample_field(&BodySpec::ellipsoid(&[1.3, 0.8]).unwrap(), &g).unwrap();
        let w: Vec<f64> = g.nodes().iter().map(|t| 0.3 * t.x - 1.1 * t.y).collect();
        assert!(v_w_m(&w, 2, &k).unwrap().abs() < 1e-8);
        assert!(v2_direct(&w, &k).unwrap().abs() < 1e-8);
    }

    #[test]
    fn direct_matches_forms_on_ball() {
        let g = Arc::new(SphereGrid::icosphere(4).unwrap());
        let k = sample_field(&BodySpec::ellipsoid(&[1.2, 1.0, 0.9]).unwrap(), &g).unwrap();
        let w: Vec<f64> = g.nodes().iter().zip(k.h()).map(|(t, h)| h * (1.0 + 0.3 * t.x * t.y)).collect();
        let a = v_w_m(&w, 2, &k).unwrap();
        let b = v2_direct(&w, &k).unwrap();
        assert!((a - b).abs() / a.abs() < 1e-2, "{a} {b}");
    }
}
