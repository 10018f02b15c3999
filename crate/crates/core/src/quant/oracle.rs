//! Optimal quantization of a discretized measure.
//!
//! The measure is replaced by point masses at the barycenters of its depth-`d`
//! cylinders. Optimal quantizers of a discrete measure on the line partition
//! the sorted atoms into contiguous runs, so the optimum for every `n` follows
//! from a dynamic program over prefix sums.
//!
//! Writing `Q` for the discretized measure, coupling each point of a cylinder
//! with its barycenter gives
//! `V_n(Q) - 2 diam(base) Σ_ω p_ω |s_ω| σ <= V_n(P) <= V_n(Q) + Σ_ω p_ω s_ω² σ²`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, resource, unsupported, Result};
use crate::measure::{ChartAffine, SelfSimilarMeasure};
use crate::quant::{ErrorReport, Method, Quantizer};

/// Largest number of cylinders the oracle will discretize.
pub const MAX_ATOMS: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub x: f64,
    pub w: f64,
}

/// Optimal quantizer of a discrete measure, as contiguous runs of atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteSolution {
    pub centers: Vec<f64>,
    /// Start index of each run; run `i` ends where run `i + 1` starts.
    pub starts: Vec<usize>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub quantizer: Quantizer,
    /// `value` is the optimal error of the discretized measure; `bound` is the
    /// larger of `upper_slack` and `lower_slack`.
    pub report: ErrorReport,
    /// `V_n(P) <= value + upper_slack`.
    pub upper_slack: f64,
    /// `V_n(P) >= value - lower_slack`.
    pub lower_slack: f64,
    pub depth: usize,
    pub atoms: usize,
}

/// Cylinder barycenters at `depth` with their masses, sorted and merged.
pub fn discretize(m: &SelfSimilarMeasure, depth: usize) -> Result<Vec<Atom>> {
    let maps = m.affine_maps().ok_or_else(|| unsupported("the oracle needs every map to fix infinity (a21 = 0)"))?;
    let mean = m.solve_moments()?.mean;
    let count = (maps.len() as f64).powi(depth as i32);
    if count > MAX_ATOMS as f64 {
        return Err(resource(format!(
            "{}^{depth} = {count:.3e} cylinders exceeds the oracle limit of {MAX_ATOMS}",
            maps.len()
        )));
    }
    let mut level = vec![(1.0, ChartAffine::IDENTITY)];
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|&(p, f)| maps.iter().zip(m.probs()).map(move |(g, q)| (p * q, f.then_inner(g))))
            .collect();
    }
    let mut atoms: Vec<Atom> = level.iter().map(|(p, f)| Atom { x: f.apply(mean), w: *p }).collect();
    atoms.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match merged.last_mut() {
            Some(last) if last.x == a.x => last.w += a.w,
            _ => merged.push(a),
        }
    }
    Ok(merged)
}

/// Weighted prefix sums of atoms, centred at the overall mean to limit cancellation.
struct Prefix {
    w: Vec<f64>,
    s: Vec<f64>,
    q: Vec<f64>,
}

impl Prefix {
    fn new(atoms: &[Atom]) -> Self {
        let total: f64 = atoms.iter().map(|a| a.w).sum();
        let centre = atoms.iter().map(|a| a.w * a.x).sum::<f64>() / total;
        let mut p = Prefix { w: vec![0.0], s: vec![0.0], q: vec![0.0] };
        for a in atoms {
            let y = a.x - centre;
            p.w.push(p.w.last().unwrap() + a.w);
            p.s.push(p.s.last().unwrap() + a.w * y);
            p.q.push(p.q.last().unwrap() + a.w * y * y);
        }
        p
    }

    /// Within-run squared error of atoms `i..j`.
    fn cost(&self, i: usize, j: usize) -> f64 {
        let w = self.w[j] - self.w[i];
        let s = self.s[j] - self.s[i];
        let q = self.q[j] - self.q[i];
        (q - s * s / w).max(0.0)
    }
}

/// Optimal `n`-point quantizers of the discrete measure for `n = 1..=n_max`.
///
/// `atoms` must be sorted by strictly increasing position with positive weights.
pub fn quantize_discrete(atoms: &[Atom], n_max: usize) -> Result<Vec<DiscreteSolution>> {
    let len = atoms.len();
    if n_max == 0 || n_max > len {
        return Err(domain(format!("need 1 <= n <= {len} atoms, got n = {n_max}")));
    }
    if atoms.windows(2).any(|w| !(w[0].x < w[1].x)) || atoms.iter().any(|a| !(a.w > 0.0)) {
        return Err(domain("atoms must be strictly increasing with positive weights"));
    }
    let prefix = Prefix::new(atoms);
    // best[j] = optimal cost of atoms 0..j with k runs; arg[k - 1][j] = start of the last run
    let mut best: Vec<f64> = (0..=len).map(|j| if j == 0 { 0.0 } else { prefix.cost(0, j) }).collect();
    let mut arg = vec![vec![0u32; len + 1]];
    for k in 2..=n_max {
        let mut next = vec![f64::INFINITY; len + 1];
        let mut starts = vec![0u32; len + 1];
        fill_row(&prefix, &best, &mut next, &mut starts, k, len, k - 1, len - 1);
        best = next;
        arg.push(starts);
    }
    Ok((1..=n_max).map(|n| backtrack(atoms, &arg, n)).collect())
}

/// Fills `next[j]` for `j` in `lo..=hi` given that the optimal last-run start
/// lies in `opt_lo..=opt_hi`; optimal starts are monotone in `j`.
#[allow(clippy::too_many_arguments)]
fn fill_row(
    prefix: &Prefix,
    prev: &[f64],
    next: &mut [f64],
    starts: &mut [u32],
    lo: usize,
    hi: usize,
    opt_lo: usize,
    opt_hi: usize,
) {
    if lo > hi {
        return;
    }
    let mid = lo + (hi - lo) / 2;
    let (mut best, mut best_i) = (f64::INFINITY, opt_lo);
    for (i, &p) in prev.iter().enumerate().take(opt_hi.min(mid - 1) + 1).skip(opt_lo) {
        let c = p + prefix.cost(i, mid);
        if c < best {
            best = c;
            best_i = i;
        }
    }
    next[mid] = best;
    starts[mid] = best_i as u32;
    if mid > lo {
        fill_row(prefix, prev, next, starts, lo, mid - 1, opt_lo, best_i);
    }
    fill_row(prefix, prev, next, starts, mid + 1, hi, best_i, opt_hi);
}

fn backtrack(atoms: &[Atom], arg: &[Vec<u32>], n: usize) -> DiscreteSolution {
    let mut starts = vec![0; n];
    let mut end = atoms.len();
    for k in (1..n).rev() {
        starts[k] = arg[k][end] as usize;
        end = starts[k];
    }
    let mut centers = Vec::with_capacity(n);
    let mut cost = 0.0;
    for (k, &s) in starts.iter().enumerate() {
        let e = starts.get(k + 1).copied().unwrap_or(atoms.len());
        let run = &atoms[s..e];
        let w: f64 = run.iter().map(|a| a.w).sum();
        let c = run.iter().map(|a| a.w * a.x).sum::<f64>() / w;
        cost += run.iter().map(|a| a.w * (a.x - c).powi(2)).sum::<f64>();
        centers.push(c);
    }
    DiscreteSolution { centers, starts, cost }
}

/// Oracle outcomes for `n = 1..=n_max` from one discretization at `depth`.
pub fn oracle_table(m: &SelfSimilarMeasure, n_max: usize, depth: usize) -> Result<Vec<OracleOutcome>> {
    let atoms = discretize(m, depth)?;
    if n_max == 0 || n_max > atoms.len() {
        return Err(domain(format!(
            "oracle needs 1 <= n <= {} (cylinders at depth {depth}), got n = {n_max}",
            atoms.len()
        )));
    }
    let (upper_slack, lower_slack) = slack(m, depth)?;
    let bound = upper_slack.max(lower_slack);
    let n_atoms = atoms.len();
    quantize_discrete(&atoms, n_max)?
        .into_iter()
        .enumerate()
        .map(|(i, sol)| {
            Ok(OracleOutcome {
                quantizer: Quantizer::new(sol.centers)?,
                report: ErrorReport { value: sol.cost, method: Method::Oracle, bound, n: i + 1, r: 2.0 },
                upper_slack,
                lower_slack,
                depth,
                atoms: n_atoms,
            })
        })
        .collect()
}

/// Optimal `n`-point quantizer of the depth-`depth` discretization.
pub fn oracle(m: &SelfSimilarMeasure, n: usize, depth: usize) -> Result<OracleOutcome> {
    let mut table = oracle_table(m, n, depth)?;
    Ok(table.pop().expect("table has n >= 1 rows"))
}

/// `(Σ p_ω s_ω² σ², 2 diam(base) Σ p_ω |s_ω| σ)` over cylinders of length `depth`.
fn slack(m: &SelfSimilarMeasure, depth: usize) -> Result<(f64, f64)> {
    let maps = m.affine_maps().expect("checked by discretize");
    let var = m.solve_moments()?.variance;
    let q1: f64 = maps.iter().zip(m.probs()).map(|(f, p)| p * f.scale.abs()).sum();
    let q2: f64 = maps.iter().zip(m.probs()).map(|(f, p)| p * f.scale * f.scale).sum();
    let d = depth as i32;
    Ok((q2.powi(d) * var, 2.0 * m.base().diameter() * q1.powi(d) * var.sqrt()))
}
