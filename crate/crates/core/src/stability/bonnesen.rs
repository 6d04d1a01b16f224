use crate::brunn_minkowski::{perimeter_aniso, volume};
use crate::error::{HbmError, Result};
use crate::geometry::{check_same_grid, SupportField};
use crate::hbm_spectrum::assemble;
use serde::Serialize;

/// V(K°) = ½∫ h_K⁻² dφ.
pub fn polar_area(k: &SupportField) -> Result<f64> {
    if k.dim() != 2 {
        return Err(HbmError::Unsupported("polar areas are planar".into()));
    }
    Ok(0.5 * k.h().iter().zip(k.grid().weights()).map(|(h, w)| w / (h * h)).sum::<f64>())
}

#[derive(Clone, Debug, Serialize)]
pub struct BonnesenReport {
    /// P_L(K)²/V(K)
    pub lhs: f64,
    /// 4V(L) + V(L)²/V(K)·(R−r)²
    pub bonnesen_rhs: f64,
    /// 4V(L) + (2(1−p)/(2−p))·max(8(1/r−1/R)²/V(K°), 8 log²(R/r)/V(L°))
    pub rkl_rhs: f64,
    /// 4V(L) + 4((1−p)/(2−p))·R_K(L), which the rkl_rhs bounds from below.
    pub rkl_exact_rhs: f64,
    pub p: f64,
    /// min h_K/h_L and max h_K/h_L
    pub r: f64,
    pub big_r: f64,
    pub polar_area_k: f64,
    pub polar_area_l: f64,
    pub larger: &'static str,
}

/// Bonnesen's classical lower bound on P_L(K)²/V(K) against the one from the
/// planar R_K(L) estimates at p ≤ 0.
pub fn bonnesen_compare(k: &SupportField, l: &SupportField, p: f64) -> Result<BonnesenReport> {
    check_same_grid(k, l)?;
    if k.dim() != 2 {
        return Err(HbmError::Unsupported("Bonnesen comparison is planar".into()));
    }
    if !(p <= 0.0) {
        return Err(HbmError::input(format!("p = {p} must be at most 0")));
    }
    let (vk, vl) = (volume(k), volume(l));
    let per = perimeter_aniso(k, l)?;
    let q: Vec<f64> = k.h().iter().zip(l.h()).map(|(a, b)| a / b).collect();
    let r = q.iter().copied().fold(f64::INFINITY, f64::min);
    let big_r = q.iter().copied().fold(0.0, f64::max);
    let (pk, pl) = (polar_area(k)?, polar_area(l)?);
    let c = 2.0 * (1.0 - p) / (2.0 - p);
    let t1 = 8.0 / pk * (1.0 / r - 1.0 / big_r).powi(2);
    let t2 = 8.0 / pl * (big_r / r).ln().powi(2);
    let z: Vec<f64> = l.h().iter().zip(k.h()).map(|(a, b)| a / b).collect();
    let rkl = assemble(k)?.dirichlet(&z);
    let bonnesen_rhs = 4.0 * vl + vl * vl / vk * (big_r - r).powi(2);
    let rkl_rhs = 4.0 * vl + c * t1.max(t2);
    Ok(BonnesenReport {
        lhs: per * per / vk,
        bonnesen_rhs,
        rkl_rhs,
        rkl_exact_rhs: 4.0 * vl + 2.0 * c * rkl,
        p,
        r,
        big_r,
        polar_area_k: pk,
        polar_area_l: pl,
        larger: if bonnesen_rhs >= rkl_rhs { "bonnesen" } else { "rkl" },
    })
}
