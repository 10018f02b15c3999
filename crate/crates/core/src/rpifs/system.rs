use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, geometry, Error, Result};
use crate::projline::ProjPoint;
use crate::rpifs::Mat2;

const PROB_SUM_TOL: f64 = 1e-9;

/// A finite index word `i_1 i_2 … i_n` with letters in `1..=m`.
///
/// The empty word addresses the whole system and composes to the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<u32>);

impl Word {
    pub fn new(letters: Vec<u32>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` followed by `letter`.
    pub fn child(&self, letter: u32) -> Word {
        let mut letters = self.0.clone();
        letters.push(letter);
        Word(letters)
    }

    /// The 0-based map indices, checked against an alphabet of size `m`.
    pub fn indices(&self, m: usize) -> Result<Vec<usize>> {
        self.0
            .iter()
            .map(|&l| {
                if l == 0 || l as usize > m {
                    Err(domain(format!("letter {l} outside the alphabet 1..={m}")))
                } else {
                    Ok(l as usize - 1)
                }
            })
            .collect()
    }

    /// Every word of length `len` over `1..=m`, lexicographically ordered.
    pub fn all(m: usize, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            out = out.into_iter().flat_map(|w| (1..=m as u32).map(move |l| w.child(l))).collect();
        }
        out
    }
}

impl From<Vec<u32>> for Word {
    fn from(letters: Vec<u32>) -> Self {
        Word(letters)
    }
}

impl fmt::Display for Word {
    /// Dot-separated letters; the empty word prints as an empty string.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// How a finite prefix is continued into the infinite code fed to the coding map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Extension {
    /// `i_1 … i_k i_k i_k …`
    #[default]
    RepeatLast,
    /// `i_1 … i_k i_1 … i_k …`
    Periodic,
}

/// A finite set of invertible matrices with an optional probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecFile", into = "SpecFile")]
pub struct RpifsSpec {
    mats: Vec<Mat2>,
    probs: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct SpecFile {
    matrices: Vec<Mat2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probs: Option<Vec<f64>>,
}

impl TryFrom<SpecFile> for RpifsSpec {
    type Error = Error;

    fn try_from(file: SpecFile) -> Result<Self> {
        RpifsSpec::new(file.matrices, file.probs)
    }
}

impl From<RpifsSpec> for SpecFile {
    fn from(spec: RpifsSpec) -> Self {
        SpecFile { matrices: spec.mats, probs: spec.probs }
    }
}

impl RpifsSpec {
    pub fn new(mats: Vec<Mat2>, probs: Option<Vec<f64>>) -> Result<Self> {
        if mats.is_empty() {
            return Err(domain("an RPIFS needs at least one matrix"));
        }
        if let Some(m) = mats.iter().find(|m| m.det() == 0.0 || !m.det().is_finite()) {
            return Err(domain(format!("singular matrix {m:?}")));
        }
        if let Some(p) = &probs {
            validate_probs(p, mats.len())?;
        }
        Ok(RpifsSpec { mats, probs })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serialization cannot fail")
    }

    pub fn mats(&self) -> &[Mat2] {
        &self.mats
    }

    pub fn probs(&self) -> Option<&[f64]> {
        self.probs.as_deref()
    }

    /// Number of maps `m = |I|`.
    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn with_probs(&self, probs: Vec<f64>) -> Result<Self> {
        RpifsSpec::new(self.mats.clone(), Some(probs))
    }

    /// The same system with every matrix divided by `sqrt(det)`.
    pub fn sl2_normalized(&self) -> Result<Self> {
        let mats = self.mats.iter().map(Mat2::sl2_normalize).collect::<Result<_>>()?;
        Ok(RpifsSpec { mats, probs: self.probs.clone() })
    }

    /// `A_{i_1} A_{i_2} ⋯ A_{i_n}`; the empty word gives the identity.
    pub fn compose(&self, word: &Word) -> Result<Mat2> {
        Ok(word.indices(self.len())?.into_iter().fold(Mat2::IDENTITY, |acc, i| acc * self.mats[i]))
    }

    /// `w_{i_1} ∘ ⋯ ∘ w_{i_depth}(seed)` for the prefix continued to `depth` letters.
    pub fn coding_map(&self, prefix: &Word, seed: &ProjPoint, depth: usize, extension: Extension) -> Result<ProjPoint> {
        let idx = prefix.indices(self.len())?;
        if depth < idx.len() {
            return Err(domain(format!("depth {depth} is shorter than the prefix length {}", idx.len())));
        }
        if idx.is_empty() && depth > 0 {
            return Err(domain("an empty prefix cannot be extended"));
        }
        let letter = |k: usize| match (k < idx.len(), extension) {
            (true, _) => idx[k],
            (false, Extension::RepeatLast) => idx[idx.len() - 1],
            (false, Extension::Periodic) => idx[k % idx.len()],
        };
        let mut p = *seed;
        for k in (0..depth).rev() {
            p = self.mats[letter(k)].apply(&p);
            if p.is_infinite() {
                return Err(geometry(format!("coding map iterate reached infinity at position {}", k + 1)));
            }
        }
        Ok(p)
    }
}

pub(crate) fn validate_probs(p: &[f64], m: usize) -> Result<()> {
    if p.len() != m {
        return Err(domain(format!("invalid probability vector: {} entries for {m} maps", p.len())));
    }
    if p.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(domain("invalid probability vector: entries must be positive"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(domain(format!("invalid probability vector: entries sum to {total}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor;

    #[test]
    fn compose_examples() {
        let spec = cantor::system();
        assert_eq!(spec.compose(&Word::new(vec![1])).unwrap(), spec.mats()[0]);
        assert_eq!(spec.compose(&Word::empty()).unwrap(), Mat2::IDENTITY);
        assert!(matches!(spec.compose(&Word::new(vec![3])), Err(Error::Domain(_))));
        assert!(matches!(spec.compose(&Word::new(vec![0])), Err(Error::Domain(_))));
    }

    #[test]
    fn normalized_products_are_triangular_with_reciprocal_diagonal() {
        let spec = cantor::system().sl2_normalized().unwrap();
        for n in 1..=8 {
            for w in Word::all(2, n) {
                let a = spec.compose(&w).unwrap();
                let big = 3f64.powf(n as f64 / 2.0);
                assert_eq!(a.a21, 0.0);
                assert!((a.a11 - 1.0 / big).abs() < 1e-12 / big);
                assert!((a.a22 - big).abs() < 1e-12 * big);
            }
        }
    }

    #[test]
    fn coding_map_fixed_points() {
        let spec = cantor::system();
        for seed in [-1.0, -0.3, 0.0, 0.8, 1.0] {
            let seed = ProjPoint::finite(seed);
            let ones = spec.coding_map(&Word::new(vec![1]), &seed, 40, Extension::RepeatLast).unwrap();
            assert!(ones.approx_eq(&ProjPoint::finite(-1.0), 1e-12));
            let twos = spec.coding_map(&Word::new(vec![2]), &seed, 40, Extension::Periodic).unwrap();
            assert!(twos.approx_eq(&ProjPoint::finite(1.0), 1e-12));
            let mixed = spec.coding_map(&Word::new(vec![1, 2]), &seed, 40, Extension::RepeatLast).unwrap();
            assert!(mixed.approx_eq(&ProjPoint::finite(-1.0 / 3.0), 1e-12));
        }
    }

    #[test]
    fn coding_map_is_cauchy() {
        let spec = cantor::system();
        let w = Word::new(vec![1, 2, 2, 1, 2]);
        let seed = ProjPoint::finite(0.5);
        let mut prev = spec.coding_map(&w, &seed, 5, Extension::Periodic).unwrap();
        for depth in 6..40 {
            let next = spec.coding_map(&w, &seed, depth, Extension::Periodic).unwrap();
            let step = prev.dist(&next).unwrap();
            assert!(step <= 2.0 * 3f64.powi(-(depth as i32 - 1)) + 1e-15);
            prev = next;
        }
    }

    #[test]
    fn coding_map_errors() {
        let spec = cantor::system();
        let seed = ProjPoint::ORIGIN;
        let err = spec.coding_map(&Word::new(vec![1, 2]), &seed, 1, Extension::RepeatLast);
        assert!(matches!(err, Err(Error::Domain(_))));
        let err = spec.coding_map(&Word::empty(), &seed, 3, Extension::RepeatLast);
        assert!(matches!(err, Err(Error::Domain(_))));
        let inv = RpifsSpec::new(vec![Mat2::new(0.0, 1.0, 1.0, 0.0).unwrap()], None).unwrap();
        let err = inv.coding_map(&Word::new(vec![1]), &ProjPoint::ORIGIN, 1, Extension::RepeatLast);
        assert!(matches!(err, Err(Error::Geometry(_))));
    }

    #[test]
    fn spec_json_schema() {
        let text = r#"{"matrices": [[[2, 0], [0, 0.5]], [[2, 1], [0, 0.5]]], "probs": [0.25, 0.75]}"#;
        let spec = RpifsSpec::from_json(text).unwrap();
        assert_eq!(spec.len(), 2);
        assert_eq!(spec.probs(), Some(&[0.25, 0.75][..]));
        let again = RpifsSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(again, spec);
        let no_probs = RpifsSpec::from_json(r#"{"matrices": [[[1, 0], [0, 1]]]}"#).unwrap();
        assert_eq!(no_probs.probs(), None);
        assert!(!no_probs.to_json().contains("probs"));
    }

    #[test]
    fn invalid_specs() {
        let bad_sum = r#"{"matrices": [[[1, 0], [0, 1]], [[2, 0], [0, 1]]], "probs": [0.5, 0.6]}"#;
        match RpifsSpec::from_json(bad_sum) {
            Err(Error::Domain(msg)) => assert!(msg.contains("invalid probability vector")),
            other => panic!("unexpected {other:?}"),
        }
        let degenerate = r#"{"matrices": [[[1, 0], [0, 1]], [[2, 0], [0, 1]]], "probs": [1, 0]}"#;
        assert!(matches!(RpifsSpec::from_json(degenerate), Err(Error::Domain(_))));
        let empty = r#"{"matrices": []}"#;
        assert!(matches!(RpifsSpec::from_json(empty), Err(Error::Domain(_))));
        assert!(matches!(RpifsSpec::from_json("{"), Err(Error::Parse(_))));
    }

    #[test]
    fn word_enumeration_is_lexicographic() {
        let words = Word::all(2, 2);
        let shown: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["1.1", "1.2", "2.1", "2.2"]);
        assert_eq!(Word::all(3, 0), vec![Word::empty()]);
    }
}
