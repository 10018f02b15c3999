//! Quantization error of a quantizer against an affine self-similar measure.
//!
//! The measure splits into cylinders `P = Σ_ω p_ω P ∘ f_ω^{-1}`. A cylinder
//! whose cone lies inside one closed Voronoi cell with site `a` contributes
//! `p_ω ((f_ω(m) - a)² + s_ω² σ²)` exactly. A cylinder straddling a boundary
//! is refined until the spread of `min_a (x - a)²` over its cone is within
//! tolerance, and then contributes the midpoint of that spread.

use crate::error::{check_budget, domain, resource, unsupported, Result};
use crate::measure::{ChartAffine, SelfSimilarMeasure};
use crate::quant::{ErrorReport, Method, Quantizer, VoronoiDiagram};
use crate::rpifs::Cone;
use crate::MAX_PRODUCTS;

/// Refinement stops at this depth even if a straddling cylinder is still wide.
const MAX_DEPTH: usize = 200;

/// Chaos-game iterates discarded before Monte Carlo sampling.
pub const MC_BURN_IN: usize = 64;

/// A cylinder at which the recursion stopped.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Leaf {
    pub mass: f64,
    pub map: ChartAffine,
    /// Cell holding the cone, or holding its barycenter if the cone straddles.
    pub cell: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Decomposition {
    pub leaves: Vec<Leaf>,
    pub value: f64,
    pub bound: f64,
}

/// Splits the measure along the cells of `diagram`; `tol` bounds `|value - error|`.
pub(crate) fn decompose(m: &SelfSimilarMeasure, diagram: &VoronoiDiagram, tol: f64) -> Result<Decomposition> {
    let maps =
        m.affine_maps().ok_or_else(|| unsupported("exact evaluation needs every map to fix infinity (a21 = 0)"))?;
    let moments = m.solve_moments()?;
    let (mean, var) = (moments.mean, moments.variance);
    let (lo, hi) = (m.base().lo(), m.base().hi());
    let probs = m.probs();

    let mut out = Decomposition { leaves: Vec::new(), value: 0.0, bound: 0.0 };
    let mut stack = vec![(1.0, ChartAffine::IDENTITY, 0usize)];
    let mut visited = 0usize;
    while let Some((p, f, depth)) = stack.pop() {
        visited += 1;
        if visited as f64 > MAX_PRODUCTS {
            return Err(resource(format!("exact evaluation visited more than {MAX_PRODUCTS} cylinders")));
        }
        let cone = Cone::spanning(f.apply(lo), f.apply(hi));
        let centre = f.apply(mean);
        let j = diagram.locate(cone.mid());
        let (cell_lo, cell_hi) = diagram.cell(j);
        let inside = cell_lo.is_none_or(|b| b <= cone.lo()) && cell_hi.is_none_or(|b| cone.hi() <= b);
        if inside {
            let d = centre - diagram.site(j);
            out.value += p * (d * d + f.scale * f.scale * var);
            out.leaves.push(Leaf { mass: p, map: f, cell: j });
            continue;
        }
        let (gmin, gmax) = envelope(diagram, &cone);
        let half = 0.5 * (gmax - gmin);
        if half <= tol || depth >= MAX_DEPTH {
            out.value += p * 0.5 * (gmin + gmax);
            out.bound += p * half;
            out.leaves.push(Leaf { mass: p, map: f, cell: diagram.locate(centre) });
            continue;
        }
        // reversed so that children pop in word order
        for (g, q) in maps.iter().zip(probs).rev() {
            stack.push((p * q, f.then_inner(g), depth + 1));
        }
    }
    Ok(out)
}

/// Exact range of `x ↦ min_a (x - a)²` over a cone.
fn envelope(diagram: &VoronoiDiagram, cone: &Cone) -> (f64, f64) {
    let (mut gmin, mut gmax) = (f64::INFINITY, 0.0f64);
    for j in diagram.locate(cone.lo())..=diagram.locate(cone.hi()) {
        let (cell_lo, cell_hi) = diagram.cell(j);
        let a = cone.lo().max(cell_lo.unwrap_or(f64::NEG_INFINITY));
        let b = cone.hi().min(cell_hi.unwrap_or(f64::INFINITY));
        let site = diagram.site(j);
        let nearest = site.clamp(a.min(b), b.max(a));
        gmin = gmin.min((nearest - site).powi(2));
        gmax = gmax.max((a - site).powi(2)).max((b - site).powi(2));
    }
    (gmin, gmax)
}

/// `∫ min_a (x - a)² dP(x)` for an affine system, with `bound <= tol`
/// unless a straddling cylinder hits the refinement depth limit.
pub fn error_exact_r2(m: &SelfSimilarMeasure, q: &Quantizer, tol: f64) -> Result<ErrorReport> {
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    let d = decompose(m, &VoronoiDiagram::new(q), tol)?;
    Ok(ErrorReport { value: d.value, method: Method::ExactR2, bound: d.bound, n: q.len(), r: 2.0 })
}

/// Sample mean of `min_a |x - a|^r` over chaos-game points; the bound is three standard errors.
pub fn error_monte_carlo(
    m: &SelfSimilarMeasure,
    q: &Quantizer,
    r: f64,
    samples: usize,
    seed: u64,
) -> Result<ErrorReport> {
    if !(r >= 1.0 && r.is_finite()) {
        return Err(domain(format!("exponent r must be finite and >= 1, got {r}")));
    }
    if samples < 2 {
        return Err(domain(format!("Monte Carlo needs at least 2 samples, got {samples}")));
    }
    check_budget(samples, 1)?;
    let diagram = VoronoiDiagram::new(q);
    let values: Vec<f64> =
        m.sample_chart(samples, seed, MC_BURN_IN)?.into_iter().map(|x| diagram.nearest_distance(x).powf(r)).collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(ErrorReport { value: mean, method: Method::MonteCarlo, bound: 3.0 * (var / n).sqrt(), n: q.len(), r })
}
