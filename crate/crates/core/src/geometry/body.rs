use super::tensor::TangentTensor;
use super::wulff::WulffShape;
use crate::error::{HbmError, Result};
use crate::sphere_disc::{tangent_frame, SphereGrid, Vec3};
use nalgebra::Matrix3;
use std::sync::Arc;

/// Step of the finite-difference jet, relative to |x|.
pub const FD_STEP: f64 = 1e-4;

/// An origin-symmetric convex body in dimension 2 or 3, given through its
/// support function.
#[derive(Clone, Debug)]
pub struct BodySpec {
    dim: usize,
    kind: BodyKind,
}

#[derive(Clone, Debug)]
pub enum BodyKind {
    Ball {
        radius: f64,
    },
    Ellipsoid {
        semi_axes: Vec<f64>,
    },
    /// Unit ball of the l_q norm; its support function is the dual l_{q*} norm.
    Lq {
        q: f64,
    },
    /// T(K), with `matrix` the dim×dim block of a padded 3×3.
    LinearImage {
        base: Box<BodySpec>,
        matrix: Matrix3<f64>,
    },
    /// Planar: ellipse support plus sum of c_k cos kφ + s_k sin kφ over even k.
    Trig {
        a: f64,
        b: f64,
        modes: Vec<TrigMode>,
    },
    /// Planar samples on an offset circle grid, trigonometrically interpolated.
    Sampled(Arc<SampledSupport>),
    Wulff(Arc<WulffShape>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrigMode {
    pub k: usize,
    pub cos: f64,
    pub sin: f64,
}

/// Value, ambient gradient and ambient Hessian of the 1-homogeneous
/// extension of h at a point x ≠ 0.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub h: f64,
    pub grad: Vec3,
    pub hess: Matrix3<f64>,
}

/// Even trigonometric interpolant of support samples on the offset grid.
#[derive(Clone, Debug)]
pub struct SampledSupport {
    n: usize,
    values: Vec<f64>,
    a0: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl SampledSupport {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n < 16 || n % 2 == 1 {
            return Err(HbmError::input(format!("sampled support needs an even count >= 16, got {n}")));
        }
        if let Some((j, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
            return Err(HbmError::Invariant { node: j, detail: format!("support sample {v} is not positive") });
        }
        let half = n / 2;
        for j in 0..half {
            let (a, b) = (values[j], values[j + half]);
            if (a - b).abs() > 1e-9 * a.abs().max(b.abs()) {
                return Err(HbmError::Invariant { node: j, detail: format!("samples not even: {a} vs {b}") });
            }
        }
        let phi = |j: usize| 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
        let a0 = values.iter().sum::<f64>() / n as f64;
        let mut cos = vec![0.0; half + 1];
        let mut sin = vec![0.0; half + 1];
        // odd harmonics are dropped: the body is symmetric by contract
        for k in (2..=half).step_by(2) {
            let (mut c, mut s) = (0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let t = k as f64 * phi(j);
                c += v * t.cos();
                s += v * t.sin();
            }
            if k == half {
                cos[k] = 0.0;
                sin[k] = s / n as f64;
            } else {
                cos[k] = 2.0 * c / n as f64;
                sin[k] = 2.0 * s / n as f64;
            }
        }
        Ok(SampledSupport { n, values, a0, cos, sin })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn eval_unit(&self, c: f64, s: f64) -> f64 {
        let mut acc = self.a0;
        let (mut zr, mut zi) = (1.0, 0.0);
        for k in 1..=self.n / 2 {
            let t = zr * c - zi * s;
            zi = zr * s + zi * c;
            zr = t;
            if k % 2 == 0 {
                acc += self.cos[k] * zr + self.sin[k] * zi;
            }
        }
        acc
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(HbmError::input(format!("{name} must be a positive finite number, got {v}")))
    }
}

impl BodySpec {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        check_dim(dim)?;
        check_positive("radius", radius)?;
        Ok(BodySpec { dim, kind: BodyKind::Ball { radius } })
    }

    pub fn ellipsoid(semi_axes: &[f64]) -> Result<Self> {
        check_dim(semi_axes.len())?;
        for &a in semi_axes {
            check_positive("semi-axis", a)?;
        }
        Ok(BodySpec { dim: semi_axes.len(), kind: BodyKind::Ellipsoid { semi_axes: semi_axes.to_vec() } })
    }

    /// `q` in [1, ∞]; q = 1 and q = ∞ are polygons and only usable on polygon paths.
    pub fn lq(dim: usize, q: f64) -> Result<Self> {
        check_dim(dim)?;
        if !(q >= 1.0) {
            return Err(HbmError::input(format!("lq needs q >= 1, got {q}")));
        }
        Ok(BodySpec { dim, kind: BodyKind::Lq { q } })
    }

    /// T(K) for a row-major dim×dim matrix.
    pub fn linear_image(base: BodySpec, m: &[f64]) -> Result<Self> {
        let d = base.dim;
        if m.len() != d * d {
            return Err(HbmError::input(format!("linear image needs {} matrix entries, got {}", d * d, m.len())));
        }
        let mut t = Matrix3::identity();
        for i in 0..d {
            for j in 0..d {
                t[(i, j)] = m[i * d + j];
            }
        }
        let scale = m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !m.iter().all(|v| v.is_finite()) || t.determinant().abs() <= 1e-14 * scale.powi(d as i32) {
            return Err(HbmError::input("linear image matrix is singular"));
        }
        Ok(BodySpec { dim: d, kind: BodyKind::LinearImage { base: Box::new(base), matrix: t } })
    }

    pub fn trig(a: f64, b: f64, modes: Vec<TrigMode>) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        for m in &modes {
            if m.k < 2 || m.k % 2 == 1 {
                return Err(HbmError::input(format!("trig harmonic must be even and >= 2, got {}", m.k)));
            }
            if !m.cos.is_finite() || !m.sin.is_finite() {
                return Err(HbmError::input("trig coefficient is not finite"));
            }
        }
        Ok(BodySpec { dim: 2, kind: BodyKind::Trig { a, b, modes } })
    }

    /// Support samples at the nodes of an offset circle grid.
    pub fn sampled(values: Vec<f64>) -> Result<Self> {
        Ok(BodySpec { dim: 2, kind: BodyKind::Sampled(Arc::new(SampledSupport::new(values)?)) })
    }

    pub fn wulff(shape: WulffShape) -> Self {
        BodySpec { dim: shape.dim(), kind: BodyKind::Wulff(Arc::new(shape)) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    /// c·K as a linear image.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        let d = self.dim;
        let m: Vec<f64> = (0..d * d).map(|i| if i % (d + 1) == 0 { c } else { 0.0 }).collect();
        BodySpec::linear_image(self.clone(), &m)
    }

    /// Whether the catalog provides an analytic or finite-difference D²h.
    pub fn has_jet(&self) -> bool {
        match &self.kind {
            BodyKind::Lq { q } => *q > 1.0 && q.is_finite(),
            BodyKind::Wulff(_) => false,
            BodyKind::LinearImage { base, .. } => base.has_jet(),
            _ => true,
        }
    }

    /// Whether det D²h blows up somewhere on the sphere (ℓ_q balls with q > 2
    /// and their linear images).
    pub fn has_unbounded_curvature(&self) -> bool {
        match &self.kind {
            BodyKind::Lq { q } => *q > 2.0 && q.is_finite(),
            BodyKind::LinearImage { base, .. } => base.has_unbounded_curvature(),
            _ => false,
        }
    }

    /// Gradient of the 1-homogeneous extension. Unlike [`BodySpec::jet_at`]
    /// this is defined where D²h is singular.
    pub fn grad_at(&self, x: &Vec3) -> Result<Vec3> {
        match &self.kind {
            BodyKind::Lq { q } if *q > 1.0 && q.is_finite() => Ok(lq_grad(*q, self.dim, x)),
            BodyKind::LinearImage { base, matrix } => Ok(matrix * base.grad_at(&(matrix.transpose() * x))?),
            _ => Ok(self.jet_at(x)?.grad),
        }
    }

    /// Whether D²h comes from finite differences rather than closed forms.
    pub fn uses_finite_differences(&self) -> bool {
        match &self.kind {
            BodyKind::Sampled(_) => true,
            BodyKind::LinearImage { base, .. } => base.uses_finite_differences(),
            _ => false,
        }
    }

    /// 1-homogeneous support function at any x (not necessarily unit).
    pub fn support_at(&self, x: &Vec3) -> f64 {
        let d = self.dim;
        match &self.kind {
            BodyKind::Ball { radius } => radius * x.norm(),
            BodyKind::Ellipsoid { semi_axes } => {
                semi_axes.iter().enumerate().map(|(i, a)| (a * x[i]).powi(2)).sum::<f64>().sqrt()
            }
            BodyKind::Lq { q } => dual_norm(&x.as_slice()[..d], *q),
            BodyKind::LinearImage { base, matrix } => base.support_at(&(matrix.transpose() * x)),
            BodyKind::Trig { a, b, modes } => {
                let r = x.norm();
                let ell = ((a * x.x).powi(2) + (b * x.y).powi(2)).sqrt();
                ell + r * trig_sum(modes, x.x / r, x.y / r).0
            }
            BodyKind::Sampled(s) => {
                let r = x.norm();
                r * s.eval_unit(x.x / r, x.y / r)
            }
            BodyKind::Wulff(w) => w.support_at(x),
        }
    }

    /// Jet of the 1-homogeneous extension at x ≠ 0.
    pub fn jet_at(&self, x: &Vec3) -> Result<Jet> {
        let d = self.dim;
        match &self.kind {
            BodyKind::Ball { radius } => {
                let r = x.norm();
                let u = x / r;
                Ok(Jet { h: radius * r, grad: u * *radius, hess: (proj(d) - u * u.transpose()) * (radius / r) })
            }
            BodyKind::Ellipsoid { semi_axes } => {
                let mut s = Matrix3::zeros();
                for (i, a) in semi_axes.iter().enumerate() {
                    s[(i, i)] = a * a;
                }
                Ok(quadratic_jet(&s, x))
            }
            BodyKind::Lq { q } => lq_jet(*q, d, x),
            BodyKind::LinearImage { base, matrix } => {
                let j = base.jet_at(&(matrix.transpose() * x))?;
                Ok(Jet { h: j.h, grad: matrix * j.grad, hess: matrix * j.hess * matrix.transpose() })
            }
            BodyKind::Trig { a, b, modes } => {
                let s = Matrix3::from_diagonal(&Vec3::new(a * a, b * b, 0.0));
                let e = quadratic_jet(&s, x);
                let r = x.norm();
                let (c, sn) = (x.x / r, x.y / r);
                let (p, dp, ddp) = trig_sum(modes, c, sn);
                let theta = Vec3::new(c, sn, 0.0);
                let tau = Vec3::new(-sn, c, 0.0);
                Ok(Jet {
                    h: e.h + r * p,
                    grad: e.grad + theta * p + tau * dp,
                    hess: e.hess + tau * tau.transpose() * ((ddp + p) / r),
                })
            }
            BodyKind::Sampled(_) => Ok(self.fd_jet(x)),
            BodyKind::Wulff(_) => Err(HbmError::Unsupported("Wulff shapes are polytopes and have no D2h".into())),
        }
    }

    /// Fourth-order central differences of the 1-homogeneous extension.
    pub fn fd_jet(&self, x: &Vec3) -> Jet {
        let d = self.dim;
        let step = FD_STEP * x.norm();
        let c1 = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
        let f = |y: Vec3| self.support_at(&y);
        let e = |i: usize| {
            let mut v = Vec3::zeros();
            v[i] = step;
            v
        };
        let h0 = f(*x);
        let mut grad = Vec3::zeros();
        let mut hess = Matrix3::zeros();
        for i in 0..d {
            grad[i] = c1.iter().map(|(o, c)| c * f(x + e(i) * *o)).sum::<f64>() / step;
            hess[(i, i)] = (-f(x + e(i) * 2.0) + 16.0 * f(x + e(i)) - 30.0 * h0 + 16.0 * f(x - e(i))
                - f(x - e(i) * 2.0))
                / (12.0 * step * step);
            for j in 0..i {
                let mut s = 0.0;
                for (oi, ci) in c1 {
                    for (oj, cj) in c1 {
                        s += ci * cj * f(x + e(i) * oi + e(j) * oj);
                    }
                }
                hess[(i, j)] = s / (step * step);
                hess[(j, i)] = hess[(i, j)];
            }
        }
        Jet { h: h0, grad, hess }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(HbmError::input(format!("dimension must be 2 or 3, got {dim}")))
    }
}

fn proj(dim: usize) -> Matrix3<f64> {
    if dim == 2 {
        Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, 0.0))
    } else {
        Matrix3::identity()
    }
}

fn quadratic_jet(s: &Matrix3<f64>, x: &Vec3) -> Jet {
    let sx = s * x;
    let h = x.dot(&sx).sqrt();
    let g = sx / h;
    Jet { h, grad: g, hess: s / h - g * g.transpose() / h }
}

/// Dual l_{q*} norm with 1/q + 1/q* = 1, scaled to avoid overflow.
fn dual_norm(x: &[f64], q: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if q == 1.0 || m == 0.0 {
        return m;
    }
    if q.is_infinite() {
        return x.iter().map(|v| v.abs()).sum();
    }
    let s = q / (q - 1.0);
    m * x.iter().map(|v| (v.abs() / m).powf(s)).sum::<f64>().powf(1.0 / s)
}

fn lq_grad(q: f64, d: usize, x: &Vec3) -> Vec3 {
    let s = q / (q - 1.0);
    let h = dual_norm(&x.as_slice()[..d], q);
    let mut g = Vec3::zeros();
    for i in 0..d {
        g[i] = x[i].signum() * (x[i].abs() / h).powf(s - 1.0);
    }
    g
}

fn lq_jet(q: f64, d: usize, x: &Vec3) -> Result<Jet> {
    if q == 1.0 || q.is_infinite() {
        return Err(HbmError::Unsupported(format!("l_q ball with q = {q} is a polygon and has no D2h")));
    }
    let s = q / (q - 1.0);
    let h = dual_norm(&x.as_slice()[..d], q);
    let scale = x.norm();
    if s < 2.0 {
        if let Some(i) = (0..d).find(|&i| x[i].abs() <= 1e-12 * scale) {
            return Err(HbmError::SingularNode {
                node: 0,
                detail: format!("coordinate {i} vanishes; D2h of the l_{q} ball is singular there (q* = {s:.4} < 2)"),
            });
        }
    }
    let g = lq_grad(q, d, x);
    let mut u2 = Vec3::zeros();
    for i in 0..d {
        u2[i] = (x[i].abs() / h).powf(s - 2.0);
    }
    let mut hess = -(g * g.transpose());
    for i in 0..d {
        hess[(i, i)] += u2[i];
    }
    Ok(Jet { h, grad: g, hess: hess * ((s - 1.0) / h) })
}

/// P(φ), P′(φ), P″(φ) of the trigonometric part at (cos φ, sin φ). Powers of
/// (c + i s) are formed by repeated multiplication, so P(-θ) = P(θ) bitwise.
fn trig_sum(modes: &[TrigMode], c: f64, s: f64) -> (f64, f64, f64) {
    let kmax = modes.iter().map(|m| m.k).max().unwrap_or(0);
    let (mut zr, mut zi) = (1.0, 0.0);
    let mut pw = Vec::with_capacity(kmax + 1);
    pw.push((zr, zi));
    for _ in 0..kmax {
        let t = zr * c - zi * s;
        zi = zr * s + zi * c;
        zr = t;
        pw.push((zr, zi));
    }
    let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
    for m in modes {
        let (ck, sk) = pw[m.k];
        let k = m.k as f64;
        p += m.cos * ck + m.sin * sk;
        dp += k * (-m.cos * sk + m.sin * ck);
        ddp -= k * k * (m.cos * ck + m.sin * sk);
    }
    (p, dp, ddp)
}

fn check_unit(theta: &Vec3) -> Result<()> {
    let r = theta.norm();
    if (r - 1.0).abs() > 1e-12 {
        return Err(HbmError::input(format!("direction is not a unit vector (norm {r:.15})")));
    }
    Ok(())
}

/// h_K(θ) for a unit θ.
pub fn eval_support(spec: &BodySpec, theta: &Vec3) -> Result<f64> {
    check_unit(theta)?;
    Ok(spec.support_at(theta))
}

/// Tangent frame used by [`eval_d2h`]: τ = (−θ_y, θ_x) on S¹.
pub fn default_frame(theta: &Vec3, dim: usize) -> [Vec3; 2] {
    if dim == 2 {
        [Vec3::new(-theta.y, theta.x, 0.0), Vec3::zeros()]
    } else {
        tangent_frame(theta)
    }
}

/// D²h(θ) in [`default_frame`].
pub fn eval_d2h(spec: &BodySpec, theta: &Vec3) -> Result<TangentTensor> {
    check_unit(theta)?;
    let j = spec.jet_at(theta)?;
    Ok(TangentTensor::from_ambient(&j.hess, &default_frame(theta, spec.dim), spec.dim))
}

/// Values of h at every node of a grid.
pub fn support_on(spec: &BodySpec, grid: &SphereGrid) -> Vec<f64> {
    grid.nodes().iter().map(|t| spec.support_at(t)).collect()
}
