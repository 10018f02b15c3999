//! Norm growth of matrix products: hyperbolicity certificates, partial sums
//! of the zeta function and its critical exponent.
//!
//! All routines first rescale every matrix to determinant `±1`, which does
//! not change the projective maps. The hyperbolicity certificate measures
//! products with the max-entry norm; the zeta function uses the spectral
//! radius.

use serde::{Deserialize, Serialize};

use crate::error::{check_budget, domain, Result};
use crate::rpifs::{Mat2, RpifsSpec};

/// Numeric evidence of uniform hyperbolicity up to a finite depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityCertificate {
    /// `(m_depth)^(1/depth)` where `m_n` is the smallest max-norm over products of length `n`.
    pub lambda_est: f64,
    /// `min_n m_n / lambda_est^n`.
    pub c_est: f64,
    pub pass: bool,
    /// `m_n` for `n = 1..=depth`.
    pub min_norms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZetaPartial {
    /// `level_sums[n - 1] = Σ_{|i| = n} ρ(A_i)^(-2t)`.
    pub level_sums: Vec<f64>,
    pub total: f64,
}

/// Visits every product of length `1..=depth` in depth-first lexicographic order.
fn for_each_product(mats: &[Mat2], depth: usize, visit: &mut impl FnMut(usize, &Mat2)) -> Result<()> {
    check_budget(mats.len(), depth)?;
    fn go(mats: &[Mat2], acc: Mat2, level: usize, depth: usize, visit: &mut impl FnMut(usize, &Mat2)) {
        for a in mats {
            let prod = acc * *a;
            visit(level, &prod);
            if level < depth {
                go(mats, prod, level + 1, depth, visit);
            }
        }
    }
    if depth > 0 {
        go(mats, Mat2::IDENTITY, 1, depth, visit);
    }
    Ok(())
}

fn unimodular(spec: &RpifsSpec) -> Vec<Mat2> {
    spec.mats().iter().map(Mat2::unimodular).collect()
}

pub fn hyperbolicity_certificate(spec: &RpifsSpec, max_depth: usize) -> Result<HyperbolicityCertificate> {
    if max_depth < 2 {
        return Err(domain(format!("hyperbolicity certificate needs depth >= 2, got {max_depth}")));
    }
    let mats = unimodular(spec);
    let mut min_norms = vec![f64::INFINITY; max_depth];
    for_each_product(&mats, max_depth, &mut |level, a| {
        let slot = &mut min_norms[level - 1];
        *slot = slot.min(a.norm_max());
    })?;
    let lambda_est = min_norms[max_depth - 1].powf(1.0 / max_depth as f64);
    let c_est =
        min_norms.iter().enumerate().map(|(i, m)| m / lambda_est.powi(i as i32 + 1)).fold(f64::INFINITY, f64::min);
    Ok(HyperbolicityCertificate { lambda_est, c_est, pass: lambda_est > 1.0, min_norms })
}

pub fn zeta_partial(spec: &RpifsSpec, t: f64, depth: usize) -> Result<ZetaPartial> {
    if !(t >= 0.0) {
        return Err(domain(format!("zeta exponent must be >= 0, got {t}")));
    }
    if depth < 1 {
        return Err(domain("zeta partial sums need depth >= 1"));
    }
    let mats = unimodular(spec);
    let mut level_sums = vec![0.0; depth];
    for_each_product(&mats, depth, &mut |level, a| {
        level_sums[level - 1] += a.spectral_radius().powf(-2.0 * t);
    })?;
    let total = level_sums.iter().sum();
    Ok(ZetaPartial { level_sums, total })
}

/// Log spectral radii of all products at lengths `depth - 1` and `depth`.
fn top_levels(spec: &RpifsSpec, depth: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mats = unimodular(spec);
    let (mut prev, mut last) = (Vec::new(), Vec::new());
    for_each_product(&mats, depth, &mut |level, a| {
        if level == depth {
            last.push(a.spectral_radius().ln());
        } else if level + 1 == depth {
            prev.push(a.spectral_radius().ln());
        }
    })?;
    Ok((prev, last))
}

/// `ln Σ exp(-2 t ℓ_i)` without overflow.
fn log_level_sum(log_radii: &[f64], t: f64) -> f64 {
    let top = log_radii.iter().map(|l| -2.0 * t * l).fold(f64::NEG_INFINITY, f64::max);
    top + log_radii.iter().map(|l| (-2.0 * t * l - top).exp()).sum::<f64>().ln()
}

/// Root of the level ratio `S_depth(t) / S_{depth-1}(t) = 1`, found by bisection.
///
/// The ratio isolates the exponential growth rate of the level sums, which is
/// what decides convergence of the full series. The returned `t*` is the
/// critical-exponent estimate; the dimension estimate is `min(1, t*)`.
pub fn critical_exponent(spec: &RpifsSpec, depth: usize, tol: f64) -> Result<f64> {
    if depth < 3 {
        return Err(domain(format!("critical exponent needs depth >= 3, got {depth}")));
    }
    if !(tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {tol}")));
    }
    if spec.len() <= 1 {
        return Err(domain(
            "no bracketing: level ratio at t = 0 is at most 1 (a single map gives a summable zeta series)",
        ));
    }
    let (prev, last) = top_levels(spec, depth)?;
    let log_ratio = |t: f64| log_level_sum(&last, t) - log_level_sum(&prev, t);
    if log_ratio(0.0) <= 0.0 {
        return Err(domain("no bracketing: level ratio at t = 0 is at most 1"));
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while log_ratio(hi) >= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(domain("no bracketing: level ratio never drops below 1 (norms do not grow)"));
        }
    }
    let mut lo = 0.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if log_ratio(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `min(1, critical_exponent)`.
pub fn dimension_estimate(spec: &RpifsSpec, depth: usize, tol: f64) -> Result<f64> {
    critical_exponent(spec, depth, tol).map(|xi| xi.min(1.0))
}
