use crate::error::{HbmError, Result};
use crate::poly::Poly2;
use crate::quadrature::gauss_on;
use serde::Serialize;
use std::f64::consts::PI;
use std::str::FromStr;

pub const MAX_REILLY_DEGREE: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Unit disk.
    Disk,
    /// [−1,1]².
    Square,
}

impl FromStr for Domain {
    type Err = HbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disk" => Ok(Domain::Disk),
            "square" => Ok(Domain::Square),
            _ => Err(HbmError::input(format!("unknown domain '{s}' (disk, square)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ReillyTerms {
    pub laplacian_sq: f64,
    pub hessian_sq: f64,
    pub mean_curvature: f64,
    pub second_form: f64,
    pub cross: f64,
    /// Limit of the curvature terms concentrated at the corners of the square.
    pub corners: f64,
    pub residual: f64,
}

struct Derivs {
    ux: Poly2,
    uy: Poly2,
    uxx: Poly2,
    uxy: Poly2,
    uyy: Poly2,
}

impl Derivs {
    fn grad(&self, x: f64, y: f64) -> [f64; 2] {
        [self.ux.eval(x, y), self.uy.eval(x, y)]
    }

    fn hess(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let b = self.uxy.eval(x, y);
        [[self.uxx.eval(x, y), b], [b, self.uyy.eval(x, y)]]
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Boundary integrand pieces at x with unit normal ν and curvature κ.
fn boundary_terms(d: &Derivs, x: [f64; 2], nu: [f64; 2], kappa: f64) -> (f64, f64, f64) {
    let tau = [-nu[1], nu[0]];
    let g = d.grad(x[0], x[1]);
    let h = d.hess(x[0], x[1]);
    let un = dot(g, nu);
    let us = dot(g, tau);
    // d/ds of u_ν = τᵀ∇²u ν + κ τ·∇u (the normal turns at rate κ)
    let hn = [h[0][0] * nu[0] + h[0][1] * nu[1], h[1][0] * nu[0] + h[1][1] * nu[1]];
    let uns = dot(tau, hn) + kappa * us;
    (kappa * un * un, kappa * us * us, -2.0 * uns * us)
}

/// Both sides of the Reilly identity (no potential) for a polynomial u.
pub fn reilly_terms(domain: Domain, u: &Poly2) -> Result<ReillyTerms> {
    if u.degree() > MAX_REILLY_DEGREE {
        return Err(HbmError::input(format!("degree {} exceeds {MAX_REILLY_DEGREE}", u.degree())));
    }
    let ux = u.dx();
    let uy = u.dy();
    let d = Derivs { uxx: ux.dx(), uxy: ux.dy(), uyy: uy.dy(), ux, uy };
    let lap = u.laplacian();
    let gl = gauss_on(12, -1.0, 1.0);
    let interior = |x: f64, y: f64| -> (f64, f64) {
        let h = d.hess(x, y);
        let l = lap.eval(x, y);
        (l * l, h[0][0] * h[0][0] + 2.0 * h[0][1] * h[0][1] + h[1][1] * h[1][1])
    };
    let (mut lsq, mut hsq, mut mc, mut sf, mut cross, mut corners) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    match domain {
        Domain::Disk => {
            let radial = gauss_on(12, 0.0, 1.0);
            let m = 48;
            let dt = 2.0 * PI / m as f64;
            for i in 0..m {
                let (s, c) = (i as f64 * dt).sin_cos();
                for &(r, w) in &radial {
                    let (a, b) = interior(r * c, r * s);
                    lsq += w * r * dt * a;
                    hsq += w * r * dt * b;
                }
                let (a, b, e) = boundary_terms(&d, [c, s], [c, s], 1.0);
                mc += dt * a;
                sf += dt * b;
                cross += dt * e;
            }
        }
        Domain::Square => {
            for &(x, wx) in &gl {
                for &(y, wy) in &gl {
                    let (a, b) = interior(x, y);
                    lsq += wx * wy * a;
                    hsq += wx * wy * b;
                }
            }
            let faces: [([f64; 2], [f64; 2]); 4] = [
                ([1.0, 0.0], [0.0, 1.0]),
                ([0.0, 1.0], [-1.0, 0.0]),
                ([-1.0, 0.0], [0.0, -1.0]),
                ([0.0, -1.0], [1.0, 0.0]),
            ];
            for (nu, tau) in faces {
                for &(t, w) in &gl {
                    let x = [nu[0] + t * tau[0], nu[1] + t * tau[1]];
                    cross += w * boundary_terms(&d, x, nu, 0.0).2;
                }
            }
            // each corner rounded off: ∫ (g·ν)² − (g·τ)² dα over the quarter turn of ν
            for k in 0..4 {
                let a0 = k as f64 * 0.5 * PI;
                let (s0, c0) = (a0 + 0.25 * PI).sin_cos();
                let g = d.grad(c0 * 2f64.sqrt(), s0 * 2f64.sqrt());
                // (g·ν)² − (g·τ)² = (gx² − gy²) cos 2α + 2 gx gy sin 2α
                let (s1, c1) = (2.0 * a0).sin_cos();
                let (s2, c2) = (2.0 * a0 + PI).sin_cos();
                corners += 0.5 * (g[0] * g[0] - g[1] * g[1]) * (s2 - s1) - g[0] * g[1] * (c2 - c1);
            }
        }
    }
    let rhs = hsq + mc + sf + cross + corners;
    Ok(ReillyTerms {
        laplacian_sq: lsq,
        hessian_sq: hsq,
        mean_curvature: mc,
        second_form: sf,
        cross,
        corners,
        residual: (lsq - rhs).abs(),
    })
}

pub fn reilly_residual(domain: Domain, u: &Poly2) -> Result<f64> {
    Ok(reilly_terms(domain, u)?.residual)
}
