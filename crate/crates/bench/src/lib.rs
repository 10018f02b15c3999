//! Inputs shared by the benchmarks.

use rpifs_core::{cantor, Mat2, RpifsSpec, SelfSimilarMeasure};

/// Cantor measure and a skewed three-map affine measure on `[0, 1]`.
pub fn measures() -> Vec<(&'static str, SelfSimilarMeasure)> {
    let skew = RpifsSpec::new(
        vec![Mat2::affine(0.25, 0.0).unwrap(), Mat2::affine(0.2, 0.4).unwrap(), Mat2::affine(0.3, 0.7).unwrap()],
        Some(vec![0.5, 0.2, 0.3]),
    )
    .unwrap();
    vec![("cantor", cantor::measure()), ("skew3", SelfSimilarMeasure::new(skew).unwrap())]
}
