use std::ops::Mul;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};
use crate::projline::ProjPoint;

/// A real 2×2 matrix in row-major order, acting on `RP^1` by `[x] ↦ [Ax]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a11: 1.0, a12: 0.0, a21: 0.0, a22: 1.0 };

    /// Builds an invertible matrix; a zero determinant is a domain error.
    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64) -> Result<Self> {
        let m = Mat2 { a11, a12, a21, a22 };
        if ![a11, a12, a21, a22].iter().all(|v| v.is_finite()) {
            return Err(domain("matrix entries must be finite"));
        }
        if m.det() == 0.0 {
            return Err(domain(format!("singular matrix {m:?}")));
        }
        Ok(m)
    }

    /// `x ↦ a x + b` in the chart.
    pub fn affine(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, 0.0, 1.0)
    }

    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn scale(&self, c: f64) -> Mat2 {
        Mat2 { a11: c * self.a11, a12: c * self.a12, a21: c * self.a21, a22: c * self.a22 }
    }

    pub fn inverse(&self) -> Mat2 {
        let d = self.det();
        Mat2 { a11: self.a22 / d, a12: -self.a12 / d, a21: -self.a21 / d, a22: self.a11 / d }
    }

    /// True when the induced map fixes infinity, i.e. is affine on the chart.
    pub fn is_affine(&self) -> bool {
        self.a21 == 0.0
    }

    /// The chart point sent to infinity, if any.
    pub fn pole(&self) -> Option<f64> {
        (self.a21 != 0.0).then(|| -self.a22 / self.a21)
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        let (h0, h1) = (p.h0(), p.h1());
        // an invertible matrix never sends a nonzero vector to zero
        ProjPoint::normalize(self.a11 * h0 + self.a12 * h1, self.a21 * h0 + self.a22 * h1)
            .unwrap_or(ProjPoint::INFINITY)
    }

    /// Möbius action on a chart coordinate; `None` when the image is infinity.
    pub fn apply_chart(&self, x: f64) -> Option<f64> {
        let den = self.a21 * x + self.a22;
        if den == 0.0 {
            return None;
        }
        let y = (self.a11 * x + self.a12) / den;
        y.is_finite().then_some(y)
    }

    /// `A / sqrt(det A)`, defined for positive determinant.
    pub fn sl2_normalize(&self) -> Result<Mat2> {
        let d = self.det();
        if d <= 0.0 {
            return Err(domain(format!("SL(2) normalization needs a positive determinant, got {d}")));
        }
        Ok(self.scale(1.0 / d.sqrt()))
    }

    /// `A / sqrt(|det A|)`: the unimodular representative used by the norm-growth estimates.
    pub(crate) fn unimodular(&self) -> Mat2 {
        self.scale(1.0 / self.det().abs().sqrt())
    }

    /// Largest absolute entry.
    pub fn norm_max(&self) -> f64 {
        self.a11.abs().max(self.a12.abs()).max(self.a21.abs()).max(self.a22.abs())
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        let half_trace = 0.5 * self.trace();
        let disc = half_trace * half_trace - self.det();
        if disc >= 0.0 {
            half_trace.abs() + disc.sqrt()
        } else {
            // complex pair: |λ|² = det > 0
            self.det().sqrt()
        }
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        Mat2 {
            a11: self.a11 * rhs.a11 + self.a12 * rhs.a21,
            a12: self.a11 * rhs.a12 + self.a12 * rhs.a22,
            a21: self.a21 * rhs.a11 + self.a22 * rhs.a21,
            a22: self.a21 * rhs.a12 + self.a22 * rhs.a22,
        }
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [[self.a11, self.a12], [self.a21, self.a22]].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Mat2 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [[a11, a12], [a21, a22]] = <[[f64; 2]; 2]>::deserialize(deserializer)?;
        Mat2::new(a11, a12, a21, a22).map_err(D::Error::custom)
    }
}
