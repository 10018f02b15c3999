use serde::{Deserialize, Serialize};

use crate::error::{domain, unsupported, Result};
use crate::measure::SelfSimilarMeasure;
use crate::quant::{cylinder_midpoint_quantizer, lloyd, oracle, Method, Quantizer};
use crate::rpifs::Mat2;

/// Discretization depth used when comparing optima with the oracle.
pub const SCALING_ORACLE_DEPTH: usize = 12;

const LLOYD_ITERS: usize = 500;
const LLOYD_TOL: f64 = 1e-16;

/// Comparison of `V_{n,r}(T μ)` with `|a|^r V_{n,r}(μ)` for `T x = a x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingOutcome {
    /// Optimal error of the pushed-forward measure.
    pub lhs: f64,
    /// `|a|^r` times the optimal error of the original measure.
    pub rhs: f64,
    pub rel_err: f64,
    /// Largest distance between `T` applied to the original optimizer and the pushed-forward optimizer.
    pub optimizer_deviation: f64,
    pub optimizers_match: bool,
}

/// Checks the scaling law for a transform `T = [[a11, a12], [0, a22]]`.
///
/// Both optima are searched independently, by Lloyd from the cylinder-midpoint
/// start (`ExactR2`) or by the discretization oracle (`Oracle`); only `r = 2` is supported.
pub fn scaling_check(m: &SelfSimilarMeasure, t: &Mat2, n: usize, r: f64, method: Method) -> Result<ScalingOutcome> {
    if t.a21 != 0.0 {
        return Err(unsupported("the scaling law holds only for transforms fixing infinity (v = 0)"));
    }
    if r != 2.0 {
        return Err(unsupported(format!("optimal errors are only computed for r = 2, got r = {r}")));
    }
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let t = t.scale(1.0 / t.a22);
    let pushed = m.push_forward(&t)?;
    let (base_opt, pushed_opt) = (optimum(m, n, method)?, optimum(&pushed, n, method)?);
    let lhs = pushed_opt.1;
    let rhs = t.a11.abs().powf(r) * base_opt.1;
    let rel_err = if lhs == rhs { 0.0 } else { (lhs - rhs).abs() / lhs.abs().max(rhs.abs()) };

    let mut mapped: Vec<f64> = base_opt.0.sites().iter().map(|&x| t.a11 * x + t.a12).collect();
    mapped.sort_by(f64::total_cmp);
    let optimizer_deviation = mapped.iter().zip(pushed_opt.0.sites()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let scale = mapped.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    Ok(ScalingOutcome { lhs, rhs, rel_err, optimizer_deviation, optimizers_match: optimizer_deviation <= 1e-9 * scale })
}

fn optimum(m: &SelfSimilarMeasure, n: usize, method: Method) -> Result<(Quantizer, f64)> {
    match method {
        Method::ExactR2 => {
            let init = cylinder_midpoint_quantizer(m, n)?;
            let out = lloyd(m, n, &init, LLOYD_ITERS, LLOYD_TOL)?;
            Ok((out.quantizer, out.report.value))
        }
        Method::Oracle => {
            let out = oracle(m, n, SCALING_ORACLE_DEPTH)?;
            Ok((out.quantizer, out.report.value))
        }
        Method::MonteCarlo => Err(unsupported("Monte Carlo estimates cannot certify optimal errors")),
    }
}
