use serde::{Deserialize, Serialize};

use super::SelfSimilarMeasure;
use crate::error::{check_budget, domain, Result};
use crate::rpifs::{Cone, Mat2};

/// Two-sided bounds `lower <= P(C) <= upper` from a cylinder cover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassBounds {
    pub lower: f64,
    pub upper: f64,
}

impl SelfSimilarMeasure {
    /// Bounds on `P(c)` from the cylinder cones of length `depth`.
    ///
    /// `lower` sums the cylinders contained in `c`, `upper` those meeting it.
    /// Cylinders that are decided before `depth` are not subdivided further,
    /// which gives the same sums as full enumeration.
    pub fn cone_mass(&self, c: &Cone, depth: usize) -> Result<MassBounds> {
        if depth < 1 {
            return Err(domain("cone mass needs depth >= 1"));
        }
        check_budget(self.spec.len(), depth)?;
        let mut bounds = MassBounds { lower: 0.0, upper: 0.0 };
        self.cover(c, Mat2::IDENTITY, 1.0, depth, &mut bounds)?;
        Ok(bounds)
    }

    fn cover(&self, c: &Cone, map: Mat2, mass: f64, remaining: usize, acc: &mut MassBounds) -> Result<()> {
        let cyl = self.base.image(&map)?;
        if c.contains_cone(&cyl) {
            acc.lower += mass;
            acc.upper += mass;
            return Ok(());
        }
        if !c.intersects(&cyl) {
            return Ok(());
        }
        if remaining == 0 {
            acc.upper += mass;
            return Ok(());
        }
        for (a, p) in self.spec.mats().iter().zip(&self.probs) {
            self.cover(c, map * *a, mass * p, remaining - 1, acc)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{cantor, Error};

    #[test]
    fn level_one_cylinder_is_exact() {
        let m = cantor::measure();
        let c = Cone::new(-1.0, -1.0 / 3.0).unwrap();
        for depth in [1, 3, 8, 15] {
            let b = m.cone_mass(&c, depth).unwrap();
            assert_eq!((b.lower, b.upper), (0.5, 0.5), "depth {depth}");
        }
    }

    #[test]
    fn base_has_full_mass() {
        let b = cantor::measure().cone_mass(&cantor::base_cone(), 4).unwrap();
        assert_eq!((b.lower, b.upper), (1.0, 1.0));
    }

    #[test]
    fn gap_has_no_mass() {
        let m = cantor::measure();
        let c = Cone::new(0.0, 0.01).unwrap();
        for depth in [1, 5, 10] {
            let b = m.cone_mass(&c, depth).unwrap();
            assert_eq!((b.lower, b.upper), (0.0, 0.0));
        }
    }

    #[test]
    fn bounds_tighten_with_depth() {
        let m = cantor::measure();
        let c = Cone::new(-0.5, 0.77).unwrap();
        let mut prev = MassBounds { lower: 0.0, upper: 1.0 };
        for depth in 1..=16 {
            let b = m.cone_mass(&c, depth).unwrap();
            assert!(b.lower <= b.upper);
            assert!(b.lower >= prev.lower - 1e-15 && b.upper <= prev.upper + 1e-15);
            // at most two straddling cylinders of mass 2^-depth
            assert!(b.upper - b.lower <= 2.0 * 0.5f64.powi(depth as i32) + 1e-15);
            prev = b;
        }
    }

    #[test]
    fn depth_checks() {
        let m = cantor::measure();
        let c = Cone::new(-0.5, 0.5).unwrap();
        assert!(matches!(m.cone_mass(&c, 0), Err(Error::Domain(_))));
        assert!(matches!(m.cone_mass(&c, 40), Err(Error::Resource(_))));
    }
}
