use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::measure::unit_interval;
use crate::projline::ProjPoint;
use crate::rpifs::Mat2;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A finite set of distinct chart points, kept sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Quantizer {
    sites: Vec<f64>,
}

impl Quantizer {
    pub fn new(mut sites: Vec<f64>) -> Result<Self> {
        if sites.is_empty() {
            return Err(domain("a quantizer needs at least one site"));
        }
        if let Some(x) = sites.iter().find(|x| !x.is_finite()) {
            return Err(domain(format!("quantizer site {x} is not a finite chart point")));
        }
        sites.sort_by(f64::total_cmp);
        if let Some(w) = sites.windows(2).find(|w| w[0] == w[1]) {
            return Err(domain(format!("duplicate quantizer site {}", w[0])));
        }
        Ok(Quantizer { sites })
    }

    pub fn from_points(points: &[ProjPoint]) -> Result<Self> {
        Self::new(points.iter().map(ProjPoint::chart).collect::<Result<_>>()?)
    }

    /// Sorted chart coordinates.
    pub fn sites(&self) -> &[f64] {
        &self.sites
    }

    pub fn points(&self) -> Vec<ProjPoint> {
        self.sites.iter().copied().map(ProjPoint::finite).collect()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Quantizer {
    type Error = crate::Error;

    fn try_from(sites: Vec<f64>) -> Result<Self> {
        Quantizer::new(sites)
    }
}

impl From<Quantizer> for Vec<f64> {
    fn from(q: Quantizer) -> Self {
        q.sites
    }
}

/// Voronoi cells of a quantizer on the chart.
///
/// Cell `j` is the half-open interval `[b_{j-1}, b_j)` with `b_j` the midpoint
/// of sites `j` and `j + 1`; the first and last cells are unbounded.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiDiagram {
    sites: Quantizer,
    boundaries: Vec<f64>,
}

impl VoronoiDiagram {
    pub fn new(sites: &Quantizer) -> Self {
        let boundaries = sites.sites.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        VoronoiDiagram { sites: sites.clone(), boundaries }
    }

    pub fn sites(&self) -> &Quantizer {
        &self.sites
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    /// Index of the cell containing `x`.
    pub fn locate(&self, x: f64) -> usize {
        self.boundaries.partition_point(|&b| b <= x)
    }

    /// Lower and upper bounds of cell `j` (`None` where unbounded).
    pub fn cell(&self, j: usize) -> (Option<f64>, Option<f64>) {
        let lo = j.checked_sub(1).map(|i| self.boundaries[i]);
        let hi = self.boundaries.get(j).copied();
        (lo, hi)
    }

    pub fn site(&self, j: usize) -> f64 {
        self.sites.sites[j]
    }

    /// Distance from `x` to its nearest site.
    pub fn nearest_distance(&self, x: f64) -> f64 {
        (x - self.site(self.locate(x))).abs()
    }
}

pub fn voronoi(q: &Quantizer) -> VoronoiDiagram {
    VoronoiDiagram::new(q)
}

/// Result of a randomized search for a point whose Voronoi label does not commute with `T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivarianceOutcome {
    /// No counterexample was found.
    pub holds: bool,
    pub witness: Option<ProjPoint>,
    pub trials: usize,
    /// `holds` with `v != 0`: absence of a witness proves nothing.
    pub inconclusive: bool,
}

/// Relative gap under which two site distances count as a tie.
const TIE_TOL: f64 = 1e-9;

/// Checks `W(T[a] | T(Δ)) = T(W([a] | Δ))` at `samples` random chart points.
///
/// `t` must have the form `[[a11, a12], [v, a22]]` with `a22 != 0`; it is
/// rescaled to `a22 = 1`. Query points are drawn uniformly from the hull of
/// the sites widened on both sides by `max(1, hull width)`. A query whose
/// image is infinity is a witness, since infinity lies in no chart cell.
pub fn voronoi_equivariance_check(q: &Quantizer, t: &Mat2, samples: usize, seed: u64) -> Result<EquivarianceOutcome> {
    if t.a22 == 0.0 {
        return Err(domain("precondition: transform must have a22 != 0"));
    }
    let t = t.scale(1.0 / t.a22);
    let images: Vec<f64> = q
        .sites
        .iter()
        .map(|&x| t.apply_chart(x).ok_or_else(|| domain(format!("precondition: T sends site {x} to infinity"))))
        .collect::<Result<_>>()?;
    let original = VoronoiDiagram::new(q);
    // sorted image sites, remembering which original site each one came from
    let mut order: Vec<usize> = (0..images.len()).collect();
    order.sort_by(|&a, &b| images[a].total_cmp(&images[b]));
    let image_q = Quantizer::new(order.iter().map(|&i| images[i]).collect())?;
    let image = VoronoiDiagram::new(&image_q);

    let (first, last) = (q.sites[0], q.sites[q.len() - 1]);
    let widen = (last - first).max(1.0);
    let (lo, hi) = (first - widen, last + widen);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..samples {
        let x = lo + (hi - lo) * unit_interval(&mut rng);
        let witness = match t.apply_chart(x) {
            None => true,
            Some(y) => match (label(&original, x), label(&image, y)) {
                (Some(j), Some(k)) => order[k] != j,
                _ => false,
            },
        };
        if witness {
            return Ok(EquivarianceOutcome {
                holds: false,
                witness: Some(ProjPoint::finite(x)),
                trials: trial + 1,
                inconclusive: false,
            });
        }
    }
    Ok(EquivarianceOutcome { holds: true, witness: None, trials: samples, inconclusive: t.a21 != 0.0 })
}

/// Nearest-site index, or `None` when `x` is (numerically) equidistant from two sites.
fn label(d: &VoronoiDiagram, x: f64) -> Option<usize> {
    let j = d.locate(x);
    let best = (x - d.site(j)).abs();
    let runner_up = [j.checked_sub(1), Some(j + 1)]
        .into_iter()
        .flatten()
        .filter(|&i| i < d.sites.len())
        .map(|i| (x - d.site(i)).abs())
        .fold(f64::INFINITY, f64::min);
    let scale = 1.0 + x.abs() + best;
    (runner_up - best > TIE_TOL * scale).then_some(j)
}
