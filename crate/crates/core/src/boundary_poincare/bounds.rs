use super::report::{BoundDirection, BoundReport, Quantity};
use crate::error::{HbmError, Result};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(HbmError::input(format!("{name} must be positive, got {v}")))
    }
}

fn nonnegative(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(HbmError::input(format!("{name} must be nonnegative, got {v}")))
    }
}

/// Eigenvalue of the second Steklov operator of the unit ball on degree-k
/// harmonics.
pub fn steklov_ball_eigenvalue(n: usize, k: usize) -> Result<f64> {
    if n < 2 {
        return Err(HbmError::input(format!("dimension must be at least 2, got {n}")));
    }
    if k == 0 {
        return Err(HbmError::input("k = 0 is the constants, which are excluded"));
    }
    let (n, k) = (n as f64, k as f64);
    Ok(2.0 * (k + n - 2.0) - (n - 1.0) - (k + n - 2.0) / k)
}

pub fn bh_ball(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(HbmError::input(format!("dimension must be at least 2, got {n}")));
    }
    Ok(2.0 / (n as f64 + 2.0))
}

/// (C²n + 2CR)/r², an upper bound on D(K) for rB ⊂ K ⊂ RB.
pub fn dk_upper_bound(r: f64, big_r: f64, c_poin: f64, n: usize) -> Result<BoundReport> {
    positive("r", r)?;
    positive("R", big_r)?;
    positive("C_poin", c_poin)?;
    if n < 2 {
        return Err(HbmError::input(format!("dimension must be at least 2, got {n}")));
    }
    let v = (c_poin * c_poin * n as f64 + 2.0 * c_poin * big_r) / (r * r);
    let mut rep = BoundReport::new(Quantity::DUpper, BoundDirection::Upper, v);
    rep.input("r", r).input("R", big_r).input("C_poin", c_poin).input("n", n as f64);
    Ok(rep)
}

/// C/r + C² max‖∇²W‖. The weight oscillation does not enter this bound and
/// is only echoed.
pub fn bh_upper_general(c_poin: f64, r: f64, max_hess_w: f64, w_range: f64) -> Result<BoundReport> {
    nonnegative("C_poin", c_poin)?;
    positive("r", r)?;
    nonnegative("max_hess_W", max_hess_w)?;
    nonnegative("w_range", w_range)?;
    let v = c_poin / r + c_poin * c_poin * max_hess_w;
    let mut rep = BoundReport::new(Quantity::BhUpper, BoundDirection::Upper, v);
    rep.input("C_poin", c_poin).input("r", r).input("max_hess_W", max_hess_w).input("w_range", w_range);
    Ok(rep)
}

/// The general bound for B_qⁿ with W = Σ|x_i|^q/q, where max‖∇²W‖ = q−1 and r = 1.
pub fn bh_upper_lq(q: f64, n: usize, c_poin: f64, r: f64) -> Result<BoundReport> {
    if !(q >= 2.0 && q.is_finite()) {
        return Err(HbmError::input(format!("q must be finite and at least 2, got {q}")));
    }
    if n < 2 {
        return Err(HbmError::input(format!("dimension must be at least 2, got {n}")));
    }
    positive("C_poin", c_poin)?;
    positive("r", r)?;
    let v = c_poin / r + c_poin * c_poin * (q - 1.0);
    let mut rep = BoundReport::new(Quantity::BhUpper, BoundDirection::Upper, v);
    rep.input("q", q).input("n", n as f64).input("C_poin", c_poin).input("r", r);
    Ok(rep)
}

/// max‖∇²W‖ e^{max w − min w} C², flagged when below one.
pub fn q_kw(c_poin: f64, max_hess_w: f64, w_range: f64) -> Result<BoundReport> {
    positive("C_poin", c_poin)?;
    positive("max_hess_W", max_hess_w)?;
    nonnegative("w_range", w_range)?;
    let v = max_hess_w * w_range.exp() * c_poin * c_poin;
    let mut rep = BoundReport::new(Quantity::QKw, BoundDirection::Exact, v);
    rep.input("C_poin", c_poin).input("max_hess_W", max_hess_w).input("w_range", w_range);
    rep.below_one = Some(v < 1.0);
    Ok(rep)
}

/// 1 + 1/((n−1)B), a lower bound on λ₁,ₑ from an upper bound B on B_H.
pub fn bh_to_gap_bound(bh_upper: f64, n: usize) -> Result<BoundReport> {
    positive("B_H upper bound", bh_upper)?;
    if n < 2 {
        return Err(HbmError::input(format!("dimension must be at least 2, got {n}")));
    }
    let v = 1.0 + 1.0 / ((n as f64 - 1.0) * bh_upper);
    let mut rep = BoundReport::new(Quantity::GapLower, BoundDirection::Lower, v);
    rep.input("B_H_upper", bh_upper).input("n", n as f64);
    Ok(rep)
}
