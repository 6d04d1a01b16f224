use crate::error::{HbmError, Result};
use crate::geometry::{polygonize, BodySpec, ConvexPolygon, Point};
use serde::Serialize;

/// Boundary samples for smooth bodies.
pub const POLYGON_SAMPLES: usize = 4096;

#[derive(Clone, Debug, Serialize)]
pub struct Deficits {
    /// P_L(K)/(nV(L)^{1/n}V(K)^{(n−1)/n}) − 1
    pub delta: f64,
    /// V(K+L)^{1/n}/(V(K)^{1/n}+V(L)^{1/n}) − 1
    pub beta: f64,
    /// V(K Δ (x₀ + rL))/V(K) at the best x₀ found, with V(rL) = V(K).
    pub asymmetry: f64,
    /// False when x₀ = 0 is optimal by symmetry; otherwise the value comes
    /// from a finite search and bounds the infimum from above.
    pub asymmetry_is_upper_bound: bool,
    pub x0: Point,
    pub sigma: f64,
    /// A²/δ
    pub asymmetry_ratio: f64,
}

fn centroid(p: &ConvexPolygon) -> Point {
    let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
    for (u, v) in p.edges() {
        let c = u[0] * v[1] - v[0] * u[1];
        a += c;
        cx += (u[0] + v[0]) * c;
        cy += (u[1] + v[1]) * c;
    }
    [cx / (3.0 * a), cy / (3.0 * a)]
}

/// δ, β, A, σ for polygons, with P_L(K) from the support function of L.
pub fn polygon_deficits(k: &ConvexPolygon, l: &ConvexPolygon, h_l: impl Fn(Point) -> f64) -> Result<Deficits> {
    let (vk, vl) = (k.area(), l.area());
    if !(vk > 0.0 && vl > 0.0) {
        return Err(HbmError::DegenerateHull("polygon of zero area".into()));
    }
    let delta = k.anisotropic_perimeter(h_l) / (2.0 * (vl * vk).sqrt()) - 1.0;
    let sum = k.minkowski_sum(l)?;
    let beta = sum.area().sqrt() / (vk.sqrt() + vl.sqrt()) - 1.0;
    let r = (vk / vl).sqrt();
    let rl = l.scaled(r);
    let symmetric = k.is_centrally_symmetric(1e-12) && l.is_centrally_symmetric(1e-12);
    let objective = |x: Point| rl.translated(x).symmetric_difference_area(k) / vk;
    let (x0, asymmetry) = if symmetric {
        ([0.0, 0.0], objective([0.0, 0.0]))
    } else {
        let ck = centroid(k);
        let cl = centroid(&rl);
        let mut best = [ck[0] - cl[0], ck[1] - cl[1]];
        let mut val = objective(best);
        let mut step = 0.25 * vk.sqrt();
        while step > 1e-9 * vk.sqrt() {
            let mut moved = false;
            for i in -1..=1 {
                for j in -1..=1 {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let x = [best[0] + i as f64 * step, best[1] + j as f64 * step];
                    let v = objective(x);
                    if v < val {
                        val = v;
                        best = x;
                        moved = true;
                    }
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        (best, val)
    };
    Ok(Deficits {
        delta,
        beta,
        asymmetry,
        asymmetry_is_upper_bound: !symmetric,
        x0,
        sigma: r.max(1.0 / r),
        asymmetry_ratio: if delta > 0.0 { asymmetry * asymmetry / delta } else { f64::NAN },
    })
}

/// Deficits of planar bodies, smooth ones as 4096-gons. P_L(K) uses the
/// support of the polygon for L, so that δ(K,K) = 0.
pub fn deficits(k: &BodySpec, l: &BodySpec) -> Result<Deficits> {
    if k.dim() != 2 || l.dim() != 2 {
        return Err(HbmError::Unsupported("deficits are planar".into()));
    }
    let kp = polygonize(k, POLYGON_SAMPLES)?;
    let lp = polygonize(l, POLYGON_SAMPLES)?;
    polygon_deficits(&kp, &lp, |u| lp.support(u))
}
