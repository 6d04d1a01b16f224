//! Stability of Minkowski's second, the anisotropic isoperimetric and the
//! Brunn-Minkowski inequalities: R_K(L), cone-measure variance, deficit
//! margins, and polygon-level deficits for planar pairs.

mod bonnesen;
mod corpus;
mod deficits;

pub use bonnesen::{bonnesen_compare, polar_area, BonnesenReport};
pub use corpus::{random_body, random_pairs, CorpusSpec};
pub use deficits::{deficits, polygon_deficits, Deficits};

use crate::brunn_minkowski::{mixed_volume, volume};
use crate::error::{HbmError, Result};
use crate::geometry::{check_same_grid, sample_field, BodySpec, SupportField};
use crate::hbm_spectrum::{assemble, even_gap, OperatorForms};
use crate::sphere_disc::SphereGrid;
use serde::Serialize;
use std::sync::Arc;

fn ratio(l: &SupportField, k: &SupportField) -> Vec<f64> {
    l.h().iter().zip(k.h()).map(|(a, b)| a / b).collect()
}

/// The Dirichlet form with z centered first; it ignores constants, and this
/// keeps A·1 rounding out of near-homothetic pairs.
fn dirichlet(forms: &OperatorForms, z: &[f64]) -> f64 {
    let mean = forms.integral(z) / forms.volume();
    let zc: Vec<f64> = z.iter().map(|v| v - mean).collect();
    forms.dirichlet(&zc)
}

/// R_K(L): the Dirichlet form of −L_K at z = h_L/h_K.
pub fn rkl(k: &SupportField, l: &SupportField) -> Result<f64> {
    check_same_grid(k, l)?;
    Ok(dirichlet(&assemble(k)?, &ratio(l, k)))
}

/// Var_{dV_K}(h_L/h_K).
pub fn cone_variance(k: &SupportField, l: &SupportField) -> Result<f64> {
    check_same_grid(k, l)?;
    Ok(assemble(k)?.variance(&ratio(l, k)))
}

fn check_p(p: f64, n: usize) -> Result<()> {
    if !(p <= 1.0) {
        return Err(HbmError::input(format!("p = {p} must be at most 1")));
    }
    if p >= n as f64 {
        return Err(HbmError::input(format!("p = {p} must be below n = {n}")));
    }
    Ok(())
}

/// Mixed volumes and the R/Var terms of a pair on a shared grid.
#[derive(Clone, Debug, Serialize)]
pub struct PairTerms {
    pub volume_k: f64,
    pub volume_l: f64,
    /// V(L,K,…,K)
    pub v_lk: f64,
    /// V(L,L,K,…,K)
    pub v_llk: f64,
    pub rkl: f64,
    pub variance: f64,
}

fn pair_terms_with(forms: &OperatorForms, k: &SupportField, l: &SupportField) -> Result<PairTerms> {
    check_same_grid(k, l)?;
    let n = k.dim();
    let z = ratio(l, k);
    let mut args = vec![k; n];
    args[n - 1] = l;
    let v_lk = mixed_volume(&args)?;
    args[0] = l;
    let v_llk = mixed_volume(&args)?;
    Ok(PairTerms {
        volume_k: volume(k),
        volume_l: volume(l),
        v_lk,
        v_llk,
        rkl: dirichlet(forms, &z),
        variance: forms.variance(&z),
    })
}

pub fn pair_terms(k: &SupportField, l: &SupportField) -> Result<PairTerms> {
    pair_terms_with(&assemble(k)?, k, l)
}

/// Margins of the two stability estimates for Minkowski's second
/// inequality: with the R_K(L) term, and with the variance term.
pub fn minkowski2_margins(k: &SupportField, l: &SupportField, p: f64) -> Result<(f64, f64)> {
    check_p(p, k.dim())?;
    Ok(minkowski2_from(&pair_terms(k, l)?, p, k.dim()))
}

fn minkowski2_from(t: &PairTerms, p: f64, n: usize) -> (f64, f64) {
    let n = n as f64;
    let base = t.v_lk * t.v_lk / t.volume_k - t.v_llk;
    (base - (1.0 - p) / (n - p) * t.rkl, base - (1.0 - p) / (n - 1.0) * t.variance)
}

fn isoperimetric_from(t: &PairTerms, p: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let per = nf * t.v_lk;
    let iso = nf * t.volume_l.powf(1.0 / nf) * t.volume_k.powf((nf - 1.0) / nf);
    let base = per * per - iso * iso;
    let c = nf * nf * t.volume_k * (1.0 - p);
    (base - c / (nf - p) * t.rkl, base - c / (nf - 1.0) * t.variance)
}

/// P_L(K)² − (nV(L)^{1/n}V(K)^{(n−1)/n})² − n²((1−p)/(n−p))V(K)R_K(L).
pub fn isoperimetric_margin(k: &SupportField, l: &SupportField, p: f64) -> Result<f64> {
    check_p(p, k.dim())?;
    Ok(isoperimetric_from(&pair_terms(k, l)?, p, k.dim()).0)
}

#[derive(Clone, Debug, Serialize)]
pub struct BmTerms {
    pub volume_sum: f64,
    pub beta: f64,
    /// R_{K+L}(K)
    pub r_sum: f64,
    /// Var_{dV_{K+L}}(h_K/(h_K+h_L))
    pub variance_sum: f64,
    /// Var_{dV_{K+L}}(h_L/(h_K+h_L))
    pub variance_sum_l: f64,
    pub margin: f64,
    pub margin_variance: f64,
}

/// Field-level BM deficit terms, with K+L by support addition.
pub fn bm_terms(k: &SupportField, l: &SupportField, p: f64) -> Result<BmTerms> {
    check_same_grid(k, l)?;
    check_p(p, k.dim())?;
    let s = k.minkowski_sum(l)?;
    let forms = assemble(&s)?;
    bm_terms_with(&forms, &s, k, l, p)
}

fn bm_terms_with(
    forms: &OperatorForms,
    s: &SupportField,
    k: &SupportField,
    l: &SupportField,
    p: f64,
) -> Result<BmTerms> {
    let n = k.dim() as f64;
    let vs = volume(s);
    let beta = vs.powf(1.0 / n) / (volume(k).powf(1.0 / n) + volume(l).powf(1.0 / n)) - 1.0;
    let zk = ratio(k, s);
    let zl = ratio(l, s);
    let r_sum = dirichlet(forms, &zk);
    let variance_sum = forms.variance(&zk);
    Ok(BmTerms {
        volume_sum: vs,
        beta,
        r_sum,
        variance_sum,
        variance_sum_l: forms.variance(&zl),
        margin: beta - 2.0 * (1.0 - p) / (n - p) * r_sum / vs,
        margin_variance: beta - 2.0 * (1.0 - p) / (n - 1.0) * variance_sum / vs,
    })
}

/// V(K+L)^{1/n}/(V(K)^{1/n}+V(L)^{1/n}) − 1 − 2((1−p)/(n−p))R_{K+L}(K)/V(K+L).
pub fn bm_margin(k: &SupportField, l: &SupportField, p: f64) -> Result<f64> {
    Ok(bm_terms(k, l, p)?.margin)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PChoice {
    /// p*(K) for the Minkowski and isoperimetric margins, p*(K+L) for BM.
    Auto,
    Value(f64),
}

impl std::str::FromStr for PChoice {
    type Err = HbmError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(PChoice::Auto);
        }
        s.parse::<f64>()
            .map(PChoice::Value)
            .map_err(|_| HbmError::input(format!("--p expects 'auto' or a number, got '{s}'")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Margins {
    pub minkowski2: f64,
    pub minkowski2_variance: f64,
    pub isoperimetric: f64,
    pub isoperimetric_variance: f64,
    pub bm: f64,
    pub bm_variance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    pub volume_k: f64,
    pub volume_l: f64,
    pub v_lk: f64,
    pub v_llk: f64,
    pub rkl: f64,
    pub variance: f64,
    /// p used for the Minkowski and isoperimetric margins.
    pub p: f64,
    /// p used for the BM margin.
    pub p_bm: f64,
    /// λ₁,ₑ(−L_K) on the same grid, and the floor ((n−p*)/(n−1))·Var it gives.
    pub lambda_1e: f64,
    pub p_star: f64,
    pub rkl_floor: f64,
    pub margins: Margins,
    /// margin with R ≤ margin with Var, as holds for p ≥ p*(K).
    pub ordered: bool,
    pub bm: BmTerms,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deficits: Option<Deficits>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bonnesen: Option<BonnesenReport>,
    pub grid: String,
}

#[derive(Clone, Copy, Debug)]
pub struct StabilityOptions {
    pub p: PChoice,
    pub deficits: bool,
    pub bonnesen: bool,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        StabilityOptions { p: PChoice::Value(0.0), deficits: false, bonnesen: false }
    }
}

/// Every stability quantity of the pair (K, L) on `grid`.
pub fn analyze(k: &BodySpec, l: &BodySpec, grid: &Arc<SphereGrid>, opts: StabilityOptions) -> Result<StabilityReport> {
    let kf = sample_field(k, grid)?;
    let lf = sample_field(l, grid)?;
    let mut r = analyze_fields(&kf, &lf, opts.p)?;
    if opts.deficits {
        r.deficits = Some(deficits(k, l)?);
    }
    if opts.bonnesen {
        r.bonnesen = Some(bonnesen_compare(&kf, &lf, r.p.min(0.0))?);
    }
    Ok(r)
}

pub fn analyze_fields(k: &SupportField, l: &SupportField, p: PChoice) -> Result<StabilityReport> {
    let n = k.dim();
    let forms = assemble(k)?;
    let gap = even_gap(&forms)?;
    let s = k.minkowski_sum(l)?;
    let sforms = assemble(&s)?;
    let (p, p_bm) = match p {
        PChoice::Value(v) => (v, v),
        PChoice::Auto => (gap.p_star.min(1.0), even_gap(&sforms)?.p_star.min(1.0)),
    };
    check_p(p, n)?;
    check_p(p_bm, n)?;
    let t = pair_terms_with(&forms, k, l)?;
    let (m1, m2) = minkowski2_from(&t, p, n);
    let (i1, i2) = isoperimetric_from(&t, p, n);
    let bm = bm_terms_with(&sforms, &s, k, l, p_bm)?;
    let floor = (n as f64 - gap.p_star) / (n as f64 - 1.0) * t.variance;
    let tol = 1e-12 * t.v_lk.abs().max(1.0).powi(2);
    Ok(StabilityReport {
        volume_k: t.volume_k,
        volume_l: t.volume_l,
        v_lk: t.v_lk,
        v_llk: t.v_llk,
        rkl: t.rkl,
        variance: t.variance,
        p,
        p_bm,
        lambda_1e: gap.lambda_1e,
        p_star: gap.p_star,
        rkl_floor: floor,
        ordered: m1 <= m2 + tol,
        margins: Margins {
            minkowski2: m1,
            minkowski2_variance: m2,
            isoperimetric: i1,
            isoperimetric_variance: i2,
            bm: bm.margin,
            bm_variance: bm.margin_variance,
        },
        bm,
        deficits: None,
        bonnesen: None,
        grid: k.grid().descriptor().to_string(),
    })
}
