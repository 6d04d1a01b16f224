use super::boundary::{PlanarBoundary, Representation};
use crate::error::{HbmError, Result};
use std::f64::consts::PI;

/// ∂K form of the local p-BM inequality for boundary data Ψ given at the
/// samples of a smooth body: ∫⟨II⁻¹∇Ψ,∇Ψ⟩ − ∫HΨ² − (1−p)∫Ψ²/⟨x,ν⟩.
/// Ψ is replaced by its even part and centered along ⟨x,ν⟩, which leaves the
/// margin unchanged and makes ∫Ψ ds = 0.
pub fn pbm_boundary_form_margin(body: &PlanarBoundary, psi: &[f64], p: f64) -> Result<f64> {
    let Representation::Smooth { samples } = body.representation else {
        return Err(HbmError::Unsupported("the boundary form needs a smooth body".into()));
    };
    if psi.len() != samples {
        return Err(HbmError::GridMismatch(format!("{} values for {samples} boundary samples", psi.len())));
    }
    if samples % 2 != 0 {
        return Err(HbmError::input("need an even number of samples"));
    }
    let rho = body.radius_of_curvature.as_ref().expect("smooth boundary has curvature");
    let h = &body.support;
    let half = samples / 2;
    let even: Vec<f64> = (0..samples).map(|j| 0.5 * (psi[j] + psi[(j + half) % samples])).collect();
    let c = (0..samples).map(|j| even[j] * rho[j]).sum::<f64>() / (0..samples).map(|j| h[j] * rho[j]).sum::<f64>();
    let f: Vec<f64> = (0..samples).map(|j| even[j] - c * h[j]).collect();
    let dphi = 2.0 * PI / samples as f64;
    let at = |j: isize| f[j.rem_euclid(samples as isize) as usize];
    let mut total = 0.0;
    for j in 0..samples {
        let i = j as isize;
        let d = (-at(i + 2) + 8.0 * at(i + 1) - 8.0 * at(i - 1) + at(i - 2)) / (12.0 * dphi);
        // with ds = ρ dφ and κ = 1/ρ the first two terms lose their weights
        total += d * d - f[j] * f[j] - (1.0 - p) * f[j] * f[j] * rho[j] / h[j];
    }
    Ok(total * dphi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{polygonize, BodySpec};

    fn angles(n: usize) -> Vec<f64> {
        (0..n).map(|j| 2.0 * PI * (j as f64 + 0.5) / n as f64).collect()
    }

    #[test]
    fn disk_cos2() {
        let b = PlanarBoundary::smooth(&BodySpec::ball(2, 1.0).unwrap(), 2048).unwrap();
        let psi: Vec<f64> = angles(2048).iter().map(|t| (2.0 * t).cos()).collect();
        assert!(pbm_boundary_form_margin(&b, &psi, -2.0).unwrap().abs() < 2e-3);
        assert!(pbm_boundary_form_margin(&b, &psi, 0.0).unwrap() > 0.0);
    }

    #[test]
    fn support_direction_is_null() {
        let b = PlanarBoundary::smooth(&BodySpec::ellipsoid(&[1.5, 0.8]).unwrap(), 1024).unwrap();
        let psi: Vec<f64> = b.support.iter().map(|h| 2.5 * h).collect();
        for p in [-1.0, 0.0, 0.5] {
            assert!(pbm_boundary_form_margin(&b, &psi, p).unwrap().abs() < 1e-10);
        }
        // adding a multiple of ⟨x,ν⟩ changes nothing
        let base: Vec<f64> = angles(1024).iter().map(|t| (2.0 * t).sin() + 0.3 * (4.0 * t).cos()).collect();
        let shifted: Vec<f64> = base.iter().zip(&b.support).map(|(a, h)| a - 0.7 * h).collect();
        let m0 = pbm_boundary_form_margin(&b, &base, 0.0).unwrap();
        let m1 = pbm_boundary_form_margin(&b, &shifted, 0.0).unwrap();
        assert!((m0 - m1).abs() <= 1e-10 * m0.abs().max(1.0));
    }

    #[test]
    fn needs_smooth_body() {
        let poly = PlanarBoundary::polygon(polygonize(&BodySpec::ball(2, 1.0).unwrap(), 64).unwrap()).unwrap();
        assert!(pbm_boundary_form_margin(&poly, &[0.0; 64], 0.0).is_err());
    }
}
