//! The two-map Cantor-like system `x ↦ x/3 ∓ 2/3` with equal weights.

use crate::measure::SelfSimilarMeasure;
use crate::rpifs::{Cone, RpifsSpec};

/// Contents of the bundled `cantor.json`.
pub const CANTOR_JSON: &str = include_str!("../data/cantor.json");

pub fn system() -> RpifsSpec {
    RpifsSpec::from_json(CANTOR_JSON).expect("bundled spec is valid")
}

/// `C_{ab}` generated by `[-1:1]` and `[1:1]`.
pub fn base_cone() -> Cone {
    Cone::new(-1.0, 1.0).expect("valid cone")
}

/// The invariant measure with weights `(1/2, 1/2)`.
pub fn measure() -> SelfSimilarMeasure {
    SelfSimilarMeasure::with_base(system(), base_cone()).expect("base cone is invariant")
}

/// True when `spec` induces the same maps and weights as [`system`].
pub fn is_cantor(spec: &RpifsSpec) -> bool {
    let reference = system();
    spec.len() == 2
        && spec.mats().iter().zip(reference.mats()).all(|(a, b)| {
            // compare the projective maps, i.e. matrices up to scale
            let (sa, sb) = (a.a22, b.a22);
            sa != 0.0
                && a.a21 == 0.0
                && (a.a11 / sa - b.a11 / sb).abs() < 1e-12
                && (a.a12 / sa - b.a12 / sb).abs() < 1e-12
        })
        && spec.probs().is_none_or(|p| p.iter().all(|&x| (x - 0.5).abs() < 1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rpifs::Mat2;

    #[test]
    fn bundled_matrices() {
        let spec = system();
        assert_eq!(spec.mats()[0], Mat2::affine(1.0 / 3.0, -2.0 / 3.0).unwrap());
        assert_eq!(spec.mats()[1], Mat2::affine(1.0 / 3.0, 2.0 / 3.0).unwrap());
        assert_eq!(spec.probs(), Some(&[0.5, 0.5][..]));
        assert!(is_cantor(&spec));
        assert!(is_cantor(&spec.sl2_normalized().unwrap()));
        assert!(!is_cantor(&spec.with_probs(vec![0.25, 0.75]).unwrap()));
    }
}
