use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::measure::{ChartAffine, SelfSimilarMeasure};
use crate::quant::exact::{decompose, Decomposition};
use crate::quant::{ErrorReport, Method, Quantizer, VoronoiDiagram};

/// Evaluation tolerance for the error of each Lloyd iterate.
pub const LLOYD_EVAL_TOL: f64 = 1e-14;

/// Levels below the heaviest cylinder searched for a fresh site.
const RESEED_LEVELS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LloydOutcome {
    pub quantizer: Quantizer,
    pub report: ErrorReport,
    /// Error of the initial quantizer followed by that of every accepted iterate; non-increasing.
    pub history: Vec<f64>,
    pub iterations: usize,
    /// Stopped because the decrease fell below `tol` (or the iterate was a fixed point).
    pub converged: bool,
}

/// Lloyd's algorithm for `r = 2` on an affine measure, with exact cell statistics.
///
/// Each step moves every site to the barycenter of its cell. A step that
/// would raise the error is discarded and the iteration stops. A cell that
/// receives no mass, or two sites that land on the same point, are replaced
/// by a barycenter of a sub-cylinder of the heaviest cylinder in the heaviest cell.
pub fn lloyd(m: &SelfSimilarMeasure, n: usize, init: &Quantizer, max_iters: usize, tol: f64) -> Result<LloydOutcome> {
    if init.len() != n {
        return Err(domain(format!("initial quantizer has {} sites, expected {n}", init.len())));
    }
    if !(tol >= 0.0) {
        return Err(domain(format!("tolerance must be non-negative, got {tol}")));
    }
    let mut q = init.clone();
    let mut dec = decompose(m, &VoronoiDiagram::new(&q), LLOYD_EVAL_TOL)?;
    let mut history = vec![dec.value];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        let next = centroid_step(m, &q, &dec)?;
        if next == q {
            converged = true;
            break;
        }
        let next_dec = decompose(m, &VoronoiDiagram::new(&next), LLOYD_EVAL_TOL)?;
        if next_dec.value > dec.value {
            converged = true;
            break;
        }
        iterations += 1;
        let decrease = dec.value - next_dec.value;
        q = next;
        dec = next_dec;
        history.push(dec.value);
        if decrease < tol {
            converged = true;
            break;
        }
    }
    Ok(LloydOutcome {
        report: ErrorReport { value: dec.value, method: Method::ExactR2, bound: dec.bound, n, r: 2.0 },
        quantizer: q,
        history,
        iterations,
        converged,
    })
}

fn centroid_step(m: &SelfSimilarMeasure, q: &Quantizer, dec: &Decomposition) -> Result<Quantizer> {
    let mean = m.solve_moments()?.mean;
    let n = q.len();
    let mut mass = vec![0.0; n];
    let mut first = vec![0.0; n];
    let mut heaviest_leaf: Vec<Option<usize>> = vec![None; n];
    for (i, leaf) in dec.leaves.iter().enumerate() {
        let j = leaf.cell;
        mass[j] += leaf.mass;
        first[j] += leaf.mass * leaf.map.apply(mean);
        if heaviest_leaf[j].is_none_or(|h| dec.leaves[h].mass < leaf.mass) {
            heaviest_leaf[j] = Some(i);
        }
    }
    let mut sites: Vec<f64> = (0..n).filter(|&j| mass[j] > 0.0).map(|j| first[j] / mass[j]).collect();
    sites.sort_by(f64::total_cmp);
    sites.dedup();
    if sites.len() < n {
        let heaviest_cell = (0..n).max_by(|&a, &b| mass[a].total_cmp(&mass[b])).expect("at least one cell");
        let leaf = dec.leaves[heaviest_leaf[heaviest_cell].expect("heaviest cell has mass")];
        reseed(m, leaf.map, mean, &mut sites, n)?;
    }
    Quantizer::new(sites)
}

/// Adds sites until there are `n`, each time picking the sub-cylinder
/// barycenter of `map` farthest from the current sites.
fn reseed(m: &SelfSimilarMeasure, map: ChartAffine, mean: f64, sites: &mut Vec<f64>, n: usize) -> Result<()> {
    let maps = m.affine_maps().expect("decomposition needs affine maps");
    let mut level = vec![map];
    let mut candidates = Vec::new();
    for _ in 0..RESEED_LEVELS {
        level = level.iter().flat_map(|f| maps.iter().map(move |g| f.then_inner(g))).collect();
        candidates.extend(level.iter().map(|f| f.apply(mean)));
    }
    while sites.len() < n {
        let gap = |x: f64| sites.iter().map(|s| (x - s).abs()).fold(f64::INFINITY, f64::min);
        let best = candidates
            .iter()
            .copied()
            .max_by(|&a, &b| gap(a).total_cmp(&gap(b)))
            .filter(|&x| gap(x) > 0.0)
            .ok_or_else(|| domain("cannot reseed an empty Voronoi cell: no distinct candidate site"))?;
        sites.push(best);
    }
    sites.sort_by(f64::total_cmp);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quant::{delta_n, dn_bound, error_exact_r2};
    use crate::rpifs::{Mat2, RpifsSpec};
    use crate::{cantor, Error};

    #[test]
    fn delta_n_is_a_fixed_point() {
        let m = cantor::measure();
        for n in 1..=12 {
            let init = delta_n(n).unwrap();
            let out = lloyd(&m, n, &init, 50, 1e-15).unwrap();
            assert!((out.report.value - dn_bound(n).unwrap()).abs() < 1e-14, "n={n}");
            for (a, b) in out.quantizer.sites().iter().zip(init.sites()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_sites_from_asymmetric_start() {
        let m = cantor::measure();
        let init = Quantizer::new(vec![-0.1, 0.9]).unwrap();
        let out = lloyd(&m, 2, &init, 100, 1e-15).unwrap();
        assert!((out.report.value - 1.0 / 18.0).abs() < 1e-13, "{:?}", out.report);
        assert!((out.quantizer.sites()[0] + 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn history_is_non_increasing_and_matches_exact() {
        let m = cantor::measure();
        let init = Quantizer::new(vec![-0.95, -0.9, 0.0, 0.1, 0.95]).unwrap();
        let out = lloyd(&m, 5, &init, 200, 1e-15).unwrap();
        for w in out.history.windows(2) {
            assert!(w[1] <= w[0]);
        }
        assert_eq!(out.history.len(), out.iterations + 1);
        let check = error_exact_r2(&m, &out.quantizer, 1e-14).unwrap();
        assert!((check.value - out.report.value).abs() < 1e-13);
        assert!(out.report.value >= dn_bound(5).unwrap() - 1e-13);
    }

    #[test]
    fn empty_cells_are_reseeded() {
        // three sites far to the right: the two outer ones receive no mass
        let m = cantor::measure();
        let init = Quantizer::new(vec![0.9, 5.0, 9.0]).unwrap();
        let out = lloyd(&m, 3, &init, 100, 1e-15).unwrap();
        assert_eq!(out.quantizer.len(), 3);
        assert!(out.quantizer.sites().iter().all(|x| x.abs() <= 1.0));
        assert!(out.report.value < error_exact_r2(&m, &init, 1e-14).unwrap().value);
    }

    #[test]
    fn zero_iterations_returns_init() {
        let m = cantor::measure();
        let init = Quantizer::new(vec![-0.5, 0.25]).unwrap();
        let out = lloyd(&m, 2, &init, 0, 1e-12).unwrap();
        assert_eq!(out.quantizer, init);
        assert_eq!(out.iterations, 0);
        assert_eq!(out.history.len(), 1);
    }

    #[test]
    fn argument_checks() {
        let m = cantor::measure();
        let init = Quantizer::new(vec![0.0]).unwrap();
        assert!(matches!(lloyd(&m, 2, &init, 5, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(lloyd(&m, 1, &init, 5, -1.0), Err(Error::Domain(_))));
        let spec = RpifsSpec::new(vec![Mat2::new(0.0, 1.0, 1.0, 3.0).unwrap()], None).unwrap();
        let non_affine = SelfSimilarMeasure::with_base(spec, crate::rpifs::Cone::new(0.0, 1.0).unwrap()).unwrap();
        assert!(matches!(lloyd(&non_affine, 1, &init, 5, 1e-12), Err(Error::Unsupported(_))));
    }
}
