//! Quantizers on the chart, their Voronoi cells, quantization errors and
//! optimizers.

mod delta;
mod exact;
mod lloyd;
mod oracle;
mod scaling;
mod voronoi;

use serde::{Deserialize, Serialize};

pub use delta::{cylinder_midpoint_quantizer, delta_n, dn_bound};
pub use exact::{error_exact_r2, error_monte_carlo, MC_BURN_IN};
pub use lloyd::{lloyd, LloydOutcome, LLOYD_EVAL_TOL};
pub use oracle::{
    discretize, oracle, oracle_table, quantize_discrete, Atom, DiscreteSolution, OracleOutcome, MAX_ATOMS,
};
pub use scaling::{scaling_check, ScalingOutcome, SCALING_ORACLE_DEPTH};
pub use voronoi::{voronoi, voronoi_equivariance_check, EquivarianceOutcome, Quantizer, VoronoiDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactR2,
    MonteCarlo,
    Oracle,
}

/// An error value with an absolute error bar.
///
/// For `ExactR2` the bar bounds the numerical evaluation, for `MonteCarlo` it
/// is three standard errors, and for `Oracle` it bounds the gap between the
/// discretized and the continuous optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub value: f64,
    pub method: Method,
    pub bound: f64,
    pub n: usize,
    pub r: f64,
}
