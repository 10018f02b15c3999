use serde::{Deserialize, Serialize};

use crate::error::{check_budget, domain, geometry, Result};
use crate::projline::ProjPoint;
use crate::rpifs::{Mat2, RpifsSpec, Word};

/// A generating cone: the closed chart segment `[lo, hi]` that avoids infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    lo: f64,
    hi: f64,
}

impl Cone {
    /// A cone with `lo < hi`, both finite.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(domain(format!("cone endpoints must be finite, got [{lo}, {hi}]")));
        }
        if lo >= hi {
            return Err(domain(format!("cone needs lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Cone { lo, hi })
    }

    /// The cone generated by two finite points, in either order.
    pub fn generated_by(p: &ProjPoint, q: &ProjPoint) -> Result<Self> {
        let (a, b) = (p.chart()?, q.chart()?);
        Cone::new(a.min(b), a.max(b))
    }

    /// Possibly degenerate cone `[a, b]` (sorted); used for images under contractions.
    pub(crate) fn spanning(a: f64, b: f64) -> Cone {
        Cone { lo: a.min(b), hi: a.max(b) }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo_point(&self) -> ProjPoint {
        ProjPoint::finite(self.lo)
    }

    pub fn hi_point(&self) -> ProjPoint {
        ProjPoint::finite(self.hi)
    }

    pub fn diameter(&self) -> f64 {
        self.hi - self.lo
    }

    /// The chart point equidistant from both endpoints.
    pub fn midpoint(&self) -> ProjPoint {
        ProjPoint::finite(self.mid())
    }

    pub(crate) fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_cone(&self, other: &Cone) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &Cone) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `w_A(C)`, computed from the endpoint images.
    ///
    /// Möbius maps are monotone on any segment missing their pole, so the
    /// image is the segment between the mapped endpoints. A pole inside the
    /// closed segment means the image wraps through infinity.
    pub fn image(&self, a: &Mat2) -> Result<Cone> {
        if let Some(pole) = a.pole() {
            if self.contains(pole) {
                return Err(geometry(format!("pole {pole} of {a:?} lies in cone [{}, {}]", self.lo, self.hi)));
            }
        }
        match (a.apply_chart(self.lo), a.apply_chart(self.hi)) {
            (Some(x), Some(y)) => Ok(Cone::spanning(x, y)),
            _ => Err(geometry(format!("image of [{}, {}] under {a:?} is unbounded", self.lo, self.hi))),
        }
    }
}

/// Every cylinder cone `C_ω = w_{A_ω}(base)` with `|ω| = depth`, in lexicographic word order.
pub fn refine(spec: &RpifsSpec, base: &Cone, depth: usize) -> Result<Vec<(Word, Cone)>> {
    check_budget(spec.len(), depth)?;
    let mut out = Vec::with_capacity(spec.len().pow(depth as u32));
    descend(spec, base, Word::empty(), Mat2::IDENTITY, depth, &mut out)?;
    Ok(out)
}

fn descend(
    spec: &RpifsSpec,
    base: &Cone,
    word: Word,
    map: Mat2,
    remaining: usize,
    out: &mut Vec<(Word, Cone)>,
) -> Result<()> {
    // every prefix image is checked, not just the leaves
    let cone = base.image(&map)?;
    if remaining == 0 {
        out.push((word, cone));
        return Ok(());
    }
    for (i, a) in spec.mats().iter().enumerate() {
        descend(spec, base, word.child(i as u32 + 1), map * *a, remaining - 1, out)?;
    }
    Ok(())
}
