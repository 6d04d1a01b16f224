use super::boundary::PlanarBoundary;
use super::report::{BoundDirection, BoundReport, Quantity};
use crate::error::{HbmError, Result};
use crate::poly::Poly2;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// Re/Im zᵏ with k even.
    Even,
    All,
    /// Re zᵏ with k even: even in each coordinate.
    Unconditional,
}

impl FromStr for Parity {
    type Err = HbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even" => Ok(Parity::Even),
            "all" => Ok(Parity::All),
            "unconditional" | "uncond" => Ok(Parity::Unconditional),
            _ => Err(HbmError::input(format!("unknown parity '{s}' (even, all, unconditional)"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Member {
    pub k: usize,
    pub imaginary: bool,
    pub u: Poly2,
    ux: Poly2,
    uy: Poly2,
    uxx: Poly2,
    uxy: Poly2,
    uyy: Poly2,
}

impl Member {
    fn new(k: usize, imaginary: bool, u: Poly2) -> Self {
        let ux = u.dx();
        let uy = u.dy();
        Member { k, imaginary, uxx: ux.dx(), uxy: ux.dy(), uyy: uy.dy(), ux, uy, u }
    }

    pub fn name(&self) -> String {
        format!("{}(z^{})", if self.imaginary { "Im" } else { "Re" }, self.k)
    }
}

/// Harmonic polynomials Re zᵏ, Im zᵏ for 2 ≤ k ≤ degree, filtered by parity.
/// Linear functions (k = 1) have zero Hessian and are left out.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub degree: usize,
    pub parity: Parity,
    pub members: Vec<Member>,
}

impl HarmonicBasis {
    pub fn new(degree: usize, parity: Parity) -> Result<Self> {
        let mut members = Vec::new();
        for k in 2..=degree {
            if parity != Parity::All && k % 2 == 1 {
                continue;
            }
            let (re, im) = Poly2::z_power(k);
            members.push(Member::new(k, false, re));
            if parity != Parity::Unconditional {
                members.push(Member::new(k, true, im));
            }
        }
        if members.is_empty() {
            return Err(HbmError::input(format!(
                "no harmonic polynomials of degree 2..={degree} with parity {parity:?}"
            )));
        }
        Ok(HarmonicBasis { degree, parity, members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Boundary form ∫ u_ν v_ν/⟨x,ν⟩ ds and interior form ∫⟨∇²u, ∇²v⟩ dx on the basis.
pub fn forms(body: &PlanarBoundary, basis: &HarmonicBasis) -> (DMatrix<f64>, DMatrix<f64>) {
    let m = basis.len();
    let mut b = DMatrix::zeros(m, m);
    let mut a = DMatrix::zeros(m, m);
    let mut un = vec![0.0; m];
    for i in 0..body.len() {
        let (x, nu) = (body.points[i], body.normals[i]);
        for (c, mb) in basis.members.iter().enumerate() {
            un[c] = mb.ux.eval(x[0], x[1]) * nu[0] + mb.uy.eval(x[0], x[1]) * nu[1];
        }
        let w = body.ds[i] / body.support[i];
        for r in 0..m {
            for c in 0..m {
                b[(r, c)] += w * un[r] * un[c];
            }
        }
    }
    let mut hs = vec![[0.0; 3]; m];
    for (x, w) in body.interior_rule() {
        for (c, mb) in basis.members.iter().enumerate() {
            hs[c] = [mb.uxx.eval(x[0], x[1]), mb.uxy.eval(x[0], x[1]), mb.uyy.eval(x[0], x[1])];
        }
        for r in 0..m {
            for c in 0..m {
                a[(r, c)] += w * (hs[r][0] * hs[c][0] + 2.0 * hs[r][1] * hs[c][1] + hs[r][2] * hs[c][2]);
            }
        }
    }
    (b, a)
}

/// Largest generalized eigenvalue of (boundary, interior) with its
/// coefficient vector: a lower estimate of B_H (B_uncond with that filter).
pub fn bh_planar_estimate(body: &PlanarBoundary, basis: &HarmonicBasis) -> Result<BoundReport> {
    let (b, a) = forms(body, basis);
    let eig = SymmetricEigen::new(a.clone());
    let (lo, hi) = eig.eigenvalues.iter().fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
    if !(lo > 1e-12 * hi) {
        return Err(HbmError::Conditioning { node: 0, ratio: lo / hi });
    }
    // A^{-1/2} B A^{-1/2}
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    let s = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
    let c = &s * &b * &s;
    let c = (&c + c.transpose()) * 0.5;
    let e = SymmetricEigen::new(c);
    let top = e.eigenvalues.imax();
    let witness = &s * e.eigenvectors.column(top);
    let scale = witness.iter().fold(0.0f64, |m, v| if v.abs() > m.abs() { *v } else { m });
    let quantity = if basis.parity == Parity::Unconditional { Quantity::BUncondLower } else { Quantity::BhLower };
    let mut r = BoundReport::new(quantity, BoundDirection::Lower, e.eigenvalues[top]);
    r.input("degree", basis.degree as f64);
    r.input("basis_size", basis.len() as f64);
    r.witness = Some(basis.members.iter().zip(witness.iter()).map(|(m, v)| (m.name(), v / scale)).collect());
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestFunction {
    /// |x|²/2
    HalfNormSq,
    /// x₁²/2
    HalfX1Sq,
}

impl FromStr for TestFunction {
    type Err = HbmError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half_norm_sq" => Ok(TestFunction::HalfNormSq),
            "half_x1_sq" => Ok(TestFunction::HalfX1Sq),
            _ => Err(HbmError::input(format!("unknown test function '{s}' (half_norm_sq, half_x1_sq)"))),
        }
    }
}

impl TestFunction {
    fn poly(self) -> Poly2 {
        match self {
            TestFunction::HalfNormSq => Poly2::from_terms(&[(0.5, 2, 0), (0.5, 0, 2)]),
            TestFunction::HalfX1Sq => Poly2::monomial(0.5, 2, 0),
        }
    }

    fn quantity(self) -> Quantity {
        match self {
            TestFunction::HalfNormSq => Quantity::BLower,
            TestFunction::HalfX1Sq => Quantity::DLower,
        }
    }
}

/// Test-function lower bound: ∫_∂K u_ν²/⟨x,ν⟩ / ∫_K ‖∇²u‖² for |x|²/2 (bounds
/// B), ∫_∂K |∇u|²/⟨x,ν⟩ / ∫_K ‖∇²u‖² for x₁²/2 (bounds D).
pub fn test_function_quotient(body: &PlanarBoundary, u: TestFunction) -> BoundReport {
    let p = u.poly();
    let (ux, uy) = (p.dx(), p.dy());
    let (uxx, uxy, uyy) = (ux.dx(), ux.dy(), uy.dy());
    let top = (0..body.len())
        .map(|i| {
            let (x, nu) = (body.points[i], body.normals[i]);
            let g = [ux.eval(x[0], x[1]), uy.eval(x[0], x[1])];
            let q = match u {
                TestFunction::HalfNormSq => (g[0] * nu[0] + g[1] * nu[1]).powi(2),
                TestFunction::HalfX1Sq => g[0] * g[0] + g[1] * g[1],
            };
            body.ds[i] * q / body.support[i]
        })
        .sum::<f64>();
    let bottom = body.interior_integral(|x| {
        let (a, b, c) = (uxx.eval(x[0], x[1]), uxy.eval(x[0], x[1]), uyy.eval(x[0], x[1]));
        a * a + 2.0 * b * b + c * c
    });
    let mut r = BoundReport::new(u.quantity(), BoundDirection::Lower, top / bottom);
    r.note = Some(format!("test function {u:?}"));
    r
}

/// Closed form of the same quotient on the cube [−1,1]ⁿ.
pub fn cube_test_function_quotient(n: usize, u: TestFunction) -> Result<BoundReport> {
    if n < 2 {
        return Err(HbmError::input(format!("dimension must be at least 2, got {n}")));
    }
    let v = match u {
        TestFunction::HalfNormSq => 1.0,
        TestFunction::HalfX1Sq => 1.0 + (n as f64 - 1.0) / 3.0,
    };
    let mut r = BoundReport::new(u.quantity(), BoundDirection::Lower, v);
    r.input("n", n as f64);
    r.note = Some(format!("test function {u:?} on the cube"));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{polygonize, BodySpec, ConvexPolygon};

    fn rect(a: f64, b: f64) -> PlanarBoundary {
        PlanarBoundary::polygon(ConvexPolygon::new(vec![[-a, -b], [a, -b], [a, b], [-a, b]]).unwrap()).unwrap()
    }

    #[test]
    fn basis_is_harmonic() {
        let b = HarmonicBasis::new(8, Parity::All).unwrap();
        assert_eq!(b.len(), 14);
        assert!(b.members.iter().all(|m| m.u.laplacian().is_zero(1e-12)));
        assert_eq!(HarmonicBasis::new(8, Parity::Even).unwrap().len(), 8);
        assert_eq!(HarmonicBasis::new(8, Parity::Unconditional).unwrap().len(), 4);
        assert!(HarmonicBasis::new(1, Parity::Even).is_err());
    }

    #[test]
    fn square_is_one() {
        let s = rect(1.0, 1.0);
        let r = bh_planar_estimate(&s, &HarmonicBasis::new(2, Parity::Even).unwrap()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
        let mut last = 0.0;
        for d in 2..=8 {
            let r = bh_planar_estimate(&s, &HarmonicBasis::new(d, Parity::Even).unwrap()).unwrap();
            assert!(r.value <= 1.0 + 1e-9 && r.value >= last - 1e-12, "{d} {}", r.value);
            last = r.value;
        }
    }

    #[test]
    fn rectangle_example() {
        let r = bh_planar_estimate(&rect(1.0, 2.0), &HarmonicBasis::new(2, Parity::Even).unwrap()).unwrap();
        assert!(r.value >= (4.0 + 0.25) / 6.0 - 1e-9, "{}", r.value);
    }

    #[test]
    fn disk_is_half() {
        let p = polygonize(&BodySpec::ball(2, 1.0).unwrap(), 720).unwrap();
        let r = bh_planar_estimate(&PlanarBoundary::polygon(p).unwrap(), &HarmonicBasis::new(8, Parity::Even).unwrap())
            .unwrap();
        assert!((r.value - 0.5).abs() < 1e-3, "{}", r.value);
        let s = PlanarBoundary::smooth(&BodySpec::ball(2, 1.0).unwrap(), 512).unwrap();
        let r = bh_planar_estimate(&s, &HarmonicBasis::new(8, Parity::Even).unwrap()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn quotients() {
        for b in [rect(1.0, 1.0), rect(1.0, 2.0)] {
            let q = test_function_quotient(&b, TestFunction::HalfNormSq);
            assert!((q.value - 1.0).abs() < 1e-12);
        }
        let e = PlanarBoundary::smooth(&BodySpec::ellipsoid(&[1.5, 0.7]).unwrap(), 1024).unwrap();
        assert!((test_function_quotient(&e, TestFunction::HalfNormSq).value - 1.0).abs() < 1e-10);
        let sq = test_function_quotient(&rect(1.0, 1.0), TestFunction::HalfX1Sq);
        assert!((sq.value - 4.0 / 3.0).abs() < 1e-12);
        assert!((cube_test_function_quotient(2, TestFunction::HalfX1Sq).unwrap().value - 4.0 / 3.0).abs() < 1e-15);
        assert!((cube_test_function_quotient(10, TestFunction::HalfX1Sq).unwrap().value - 4.0).abs() < 1e-15);
        assert!("bogus".parse::<TestFunction>().is_err());
    }
}
