//! Bernoulli measures on code space and the invariant measure they induce on
//! the projective line.

mod mass;
mod sample;

use serde::{Deserialize, Serialize};

pub use mass::MassBounds;
pub(crate) use sample::unit_interval;

use crate::error::{domain, unsupported, Result};
use crate::rpifs::{validate_probs, Cone, Mat2, RpifsSpec, Word};

/// Product measure on `{1..m}^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliSpec {
    probs: Vec<f64>,
}

impl BernoulliSpec {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        validate_probs(&probs, probs.len())?;
        Ok(BernoulliSpec { probs })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(domain("alphabet must be non-empty"));
        }
        Ok(BernoulliSpec { probs: vec![1.0 / m as f64; m] })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// `μ([i_1 … i_n]) = Π p_{i_k}`; the empty cylinder has mass 1.
    pub fn cylinder_mass(&self, word: &Word) -> Result<f64> {
        Ok(word.indices(self.probs.len())?.into_iter().map(|i| self.probs[i]).product())
    }
}

/// A chart map `x ↦ scale · x + shift`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartAffine {
    pub scale: f64,
    pub shift: f64,
}

impl ChartAffine {
    pub fn apply(&self, x: f64) -> f64 {
        self.scale * x + self.shift
    }

    /// `self ∘ inner`.
    pub fn then_inner(&self, inner: &ChartAffine) -> ChartAffine {
        ChartAffine { scale: self.scale * inner.scale, shift: self.scale * inner.shift + self.shift }
    }

    pub const IDENTITY: ChartAffine = ChartAffine { scale: 1.0, shift: 0.0 };
}

/// Mean, central variance and second moment about the chart origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub second_moment: f64,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum MomentState {
    Solved(Moments),
    NonAffine,
    NonContractive(f64),
}

/// The invariant probability measure `P = Σ p_i P ∘ w_i^{-1}`, supported in a base cone.
///
/// The base cone must be mapped into itself by every map so that every
/// cylinder image `w_ω(base)` is a cone containing the support of
/// `P ∘ w_ω^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarMeasure {
    spec: RpifsSpec,
    probs: Vec<f64>,
    base: Cone,
    affine: Option<Vec<ChartAffine>>,
    moments: MomentState,
}

impl SelfSimilarMeasure {
    /// Measure of an affine contracting system, with a base cone computed from the maps.
    ///
    /// Missing probabilities default to the uniform vector. Systems with a
    /// non-affine or non-contracting map need [`SelfSimilarMeasure::with_base`].
    pub fn new(spec: RpifsSpec) -> Result<Self> {
        let maps = chart_affine_maps(&spec)
            .ok_or_else(|| unsupported("no canonical base cone for a non-affine system; supply one with with_base"))?;
        if let Some(s) = maps.iter().find(|f| !(f.scale.abs() < 1.0)) {
            return Err(domain(format!(
                "map with chart scale {} is not a contraction; supply a base cone with with_base",
                s.scale
            )));
        }
        let base = invariant_interval(&maps);
        Self::with_base(spec, base)
    }

    /// Measure whose support is declared to lie in `base`; `base` must be forward invariant.
    pub fn with_base(spec: RpifsSpec, base: Cone) -> Result<Self> {
        let probs = match spec.probs() {
            Some(p) => p.to_vec(),
            None => vec![1.0 / spec.len() as f64; spec.len()],
        };
        let spec = spec.with_probs(probs.clone())?;
        let slack = 1e-12 * (1.0 + base.lo().abs() + base.hi().abs());
        for (i, a) in spec.mats().iter().enumerate() {
            let img = base.image(a)?;
            if img.lo() < base.lo() - slack || img.hi() > base.hi() + slack {
                return Err(domain(format!(
                    "map {} sends the base cone [{}, {}] to [{}, {}], outside itself",
                    i + 1,
                    base.lo(),
                    base.hi(),
                    img.lo(),
                    img.hi()
                )));
            }
        }
        let affine = chart_affine_maps(&spec);
        let moments = match &affine {
            None => MomentState::NonAffine,
            Some(maps) => solve_affine_moments(maps, &probs),
        };
        Ok(SelfSimilarMeasure { spec, probs, base, affine, moments })
    }

    pub fn spec(&self) -> &RpifsSpec {
        &self.spec
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn base(&self) -> &Cone {
        &self.base
    }

    pub fn bernoulli(&self) -> BernoulliSpec {
        BernoulliSpec { probs: self.probs.clone() }
    }

    pub fn is_affine(&self) -> bool {
        self.affine.is_some()
    }

    /// Chart form of each map, for affine systems.
    pub fn affine_maps(&self) -> Option<&[ChartAffine]> {
        self.affine.as_deref()
    }

    /// Exact mean and second moment, from the fixed-point equations
    /// `m = Σ p_i (s_i m + b_i)` and `v = Σ p_i (s_i² v + (s_i m + b_i - m)²)`.
    pub fn solve_moments(&self) -> Result<Moments> {
        match &self.moments {
            MomentState::Solved(m) => Ok(*m),
            MomentState::NonAffine => Err(unsupported("exact moments need every map to fix infinity (a21 = 0)")),
            MomentState::NonContractive(q) => {
                Err(domain(format!("not contractive in mean square: Σ p_i s_i² = {q} >= 1")))
            }
        }
    }

    /// The image measure under `T = [[a11, a12], [0, a22]]`.
    pub fn push_forward(&self, t: &Mat2) -> Result<SelfSimilarMeasure> {
        if t.a21 != 0.0 {
            return Err(unsupported("push-forward is only supported for transforms fixing infinity (v = 0)"));
        }
        let t = t.scale(1.0 / t.a22);
        let t_inv = t.inverse();
        let mats = self.spec.mats().iter().map(|a| t * *a * t_inv).collect();
        let spec = RpifsSpec::new(mats, Some(self.probs.clone()))?;
        let base = self.base.image(&t)?;
        Self::with_base(spec, base)
    }
}

fn chart_affine_maps(spec: &RpifsSpec) -> Option<Vec<ChartAffine>> {
    spec.mats()
        .iter()
        .map(|a| a.is_affine().then(|| ChartAffine { scale: a.a11 / a.a22, shift: a.a12 / a.a22 }))
        .collect()
}

/// Smallest symmetric interval about the centre of the fixed points that every map sends into itself.
fn invariant_interval(maps: &[ChartAffine]) -> Cone {
    let fixed: Vec<f64> = maps.iter().map(|f| f.shift / (1.0 - f.scale)).collect();
    let lo = fixed.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = fixed.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let centre = 0.5 * (lo + hi);
    // |s| R + |f(c) - c| <= R  <=>  R >= |f(c) - c| / (1 - |s|)
    let radius = maps.iter().map(|f| (f.apply(centre) - centre).abs() / (1.0 - f.scale.abs())).fold(0.0, f64::max);
    let radius = if radius > 0.0 { radius } else { 1.0 };
    Cone::spanning(centre - radius, centre + radius)
}

fn solve_affine_moments(maps: &[ChartAffine], probs: &[f64]) -> MomentState {
    let q2: f64 = maps.iter().zip(probs).map(|(f, p)| p * f.scale * f.scale).sum();
    if !(q2 < 1.0) {
        return MomentState::NonContractive(q2);
    }
    let q1: f64 = maps.iter().zip(probs).map(|(f, p)| p * f.scale).sum();
    let shift_mean: f64 = maps.iter().zip(probs).map(|(f, p)| p * f.shift).sum();
    let mean = shift_mean / (1.0 - q1);
    let spread: f64 = maps
        .iter()
        .zip(probs)
        .map(|(f, p)| {
            let d = f.apply(mean) - mean;
            p * d * d
        })
        .sum();
    let variance = spread / (1.0 - q2);
    MomentState::Solved(Moments { mean, second_moment: variance + mean * mean, variance })
}
