//! Points of the real projective line and arithmetic on its affine chart.
//!
//! A point `[h0:h1]` is stored in normalized form: `[x:1]` when `h1 != 0`
//! and `[1:0]` (the point at infinity) otherwise. The chart operations and
//! the metric are only defined on the finite points `[x:1]`.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjPoint {
    h0: f64,
    h1: f64,
}

impl ProjPoint {
    /// The point at infinity `[1:0]`.
    pub const INFINITY: ProjPoint = ProjPoint { h0: 1.0, h1: 0.0 };

    /// The chart origin `[0:1]`.
    pub const ORIGIN: ProjPoint = ProjPoint { h0: 0.0, h1: 1.0 };

    /// Canonical representative of the class of `(h0, h1)`.
    ///
    /// Division by `h1` happens whenever `h1` is nonzero, with no threshold.
    pub fn normalize(h0: f64, h1: f64) -> Result<Self> {
        if !(h0.is_finite() && h1.is_finite()) {
            return Err(domain(format!("non-finite homogeneous coordinates ({h0}, {h1})")));
        }
        if h1 != 0.0 {
            let x = h0 / h1;
            if !x.is_finite() {
                return Err(domain(format!("chart coordinate {h0}/{h1} overflows")));
            }
            Ok(ProjPoint { h0: x, h1: 1.0 })
        } else if h0 != 0.0 {
            Ok(Self::INFINITY)
        } else {
            Err(domain("the zero vector does not represent a projective point"))
        }
    }

    /// The chart point `[x:1]`.
    ///
    /// # Panics
    /// If `x` is not finite.
    pub fn finite(x: f64) -> Self {
        assert!(x.is_finite(), "chart coordinate must be finite, got {x}");
        ProjPoint { h0: x, h1: 1.0 }
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn h1(&self) -> f64 {
        self.h1
    }

    pub fn is_infinite(&self) -> bool {
        self.h1 == 0.0
    }

    /// Chart coordinate, or `None` for the point at infinity.
    pub fn x(&self) -> Option<f64> {
        (!self.is_infinite()).then_some(self.h0)
    }

    /// Chart coordinate, failing on the point at infinity.
    pub fn chart(&self) -> Result<f64> {
        self.x().ok_or_else(|| domain("operation is undefined at the point at infinity"))
    }

    pub fn oplus(&self, other: &ProjPoint) -> Result<ProjPoint> {
        Ok(Self::finite(self.chart()? + other.chart()?))
    }

    pub fn star(&self, other: &ProjPoint) -> Result<ProjPoint> {
        Ok(Self::finite(self.chart()? * other.chart()?))
    }

    pub fn scalar(&self, c: f64) -> Result<ProjPoint> {
        Ok(Self::finite(c * self.chart()?))
    }

    pub fn ominus(&self, other: &ProjPoint) -> Result<ProjPoint> {
        Ok(Self::finite(self.chart()? - other.chart()?))
    }

    /// The chart metric `|x1 - x2|`.
    pub fn dist(&self, other: &ProjPoint) -> Result<f64> {
        Ok((self.chart()? - other.chart()?).abs())
    }

    /// Tolerance comparison of normalized coordinates. Infinity only matches infinity.
    pub fn approx_eq(&self, other: &ProjPoint, tol: f64) -> bool {
        match (self.x(), other.x()) {
            (Some(a), Some(b)) => (a - b).abs() <= tol,
            (None, None) => true,
            _ => false,
        }
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", self.h0, self.h1)
    }
}

impl Serialize for ProjPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        [self.h0, self.h1].serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ProjPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let [h0, h1] = <[f64; 2]>::deserialize(deserializer)?;
        ProjPoint::normalize(h0, h1).map_err(D::Error::custom)
    }
}
