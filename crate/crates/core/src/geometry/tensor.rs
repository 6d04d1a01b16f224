use crate::sphere_disc::Vec3;
use nalgebra::{Matrix2, Matrix3};

/// D²h in an orthonormal tangent frame: a scalar on S¹, a symmetric 2×2 on S².
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TangentTensor {
    Scalar(f64),
    Mat(Matrix2<f64>),
}

impl TangentTensor {
    /// Restriction of an ambient symmetric matrix to span(frame).
    pub fn from_ambient(h: &Matrix3<f64>, frame: &[Vec3; 2], dim: usize) -> Self {
        if dim == 2 {
            TangentTensor::Scalar(frame[0].dot(&(h * frame[0])))
        } else {
            let a = frame[0].dot(&(h * frame[0]));
            let b = 0.5 * (frame[0].dot(&(h * frame[1])) + frame[1].dot(&(h * frame[0])));
            let c = frame[1].dot(&(h * frame[1]));
            TangentTensor::Mat(Matrix2::new(a, b, b, c))
        }
    }

    /// `E C Eᵗ` as an ambient 3×3 matrix.
    pub fn to_ambient(&self, frame: &[Vec3; 2]) -> Matrix3<f64> {
        match self {
            TangentTensor::Scalar(s) => frame[0] * frame[0].transpose() * *s,
            TangentTensor::Mat(m) => {
                let mut out = Matrix3::zeros();
                for i in 0..2 {
                    for j in 0..2 {
                        out += frame[i] * frame[j].transpose() * m[(i, j)];
                    }
                }
                out
            }
        }
    }

    pub fn identity(dim: usize) -> Self {
        if dim == 2 {
            TangentTensor::Scalar(1.0)
        } else {
            TangentTensor::Mat(Matrix2::identity())
        }
    }

    pub fn det(&self) -> f64 {
        match self {
            TangentTensor::Scalar(s) => *s,
            TangentTensor::Mat(m) => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            TangentTensor::Scalar(s) => *s,
            TangentTensor::Mat(m) => m[(0, 0)] + m[(1, 1)],
        }
    }

    /// Adjugate; `A adj(A) = det(A) I`. The 1×1 adjugate is 1.
    pub fn adjugate(&self) -> Self {
        match self {
            TangentTensor::Scalar(_) => TangentTensor::Scalar(1.0),
            TangentTensor::Mat(m) => TangentTensor::Mat(Matrix2::new(m[(1, 1)], -m[(0, 1)], -m[(1, 0)], m[(0, 0)])),
        }
    }

    /// (smallest, largest) eigenvalue.
    pub fn eigen_range(&self) -> (f64, f64) {
        match self {
            TangentTensor::Scalar(s) => (*s, *s),
            TangentTensor::Mat(m) => {
                let mean = 0.5 * (m[(0, 0)] + m[(1, 1)]);
                let dev = (0.25 * (m[(0, 0)] - m[(1, 1)]).powi(2) + m[(0, 1)] * m[(1, 0)]).max(0.0).sqrt();
                (mean - dev, mean + dev)
            }
        }
    }

    /// Inverse, refusing when the smallest eigenvalue is below 1e-10 of the largest.
    pub fn checked_inverse(&self) -> Option<Self> {
        let (lo, hi) = self.eigen_range();
        if !(lo > 1e-10 * hi.abs()) || lo <= 0.0 {
            return None;
        }
        let d = self.det();
        Some(self.adjugate().scale(1.0 / d))
    }

    pub fn scale(&self, a: f64) -> Self {
        match self {
            TangentTensor::Scalar(s) => TangentTensor::Scalar(a * s),
            TangentTensor::Mat(m) => TangentTensor::Mat(m * a),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        match (self, o) {
            (TangentTensor::Scalar(a), TangentTensor::Scalar(b)) => TangentTensor::Scalar(a + b),
            (TangentTensor::Mat(a), TangentTensor::Mat(b)) => TangentTensor::Mat(a + b),
            _ => panic!("tangent tensors of different dimension"),
        }
    }

    /// Frobenius-style distance, used in tests and invariant checks.
    pub fn distance(&self, o: &Self) -> f64 {
        match (self, o) {
            (TangentTensor::Scalar(a), TangentTensor::Scalar(b)) => (a - b).abs(),
            (TangentTensor::Mat(a), TangentTensor::Mat(b)) => (a - b).norm(),
            _ => f64::INFINITY,
        }
    }
}
