use crate::cantor;
use crate::error::{check_budget, domain, Result};
use crate::measure::SelfSimilarMeasure;
use crate::quant::Quantizer;
use crate::rpifs::Word;

/// `D_n = ½ · 18^{-k} (2^{k+1} - n + (n - 2^k)/9)` with `k = ⌊log₂ n⌋`.
///
/// This is the squared-error of [`delta_n`] for the Cantor measure.
pub fn dn_bound(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    let k = n.ilog2() as i32;
    let pk = (1usize << k) as f64;
    let n = n as f64;
    Ok(0.5 * 18f64.powi(-k) * (2.0 * pk - n + (n - pk) / 9.0))
}

/// The words whose cylinders carry the sites of [`cylinder_midpoint_quantizer`].
fn midpoint_words(m: usize, n: usize) -> Result<Vec<Word>> {
    if n == 0 {
        return Err(domain("n must be at least 1"));
    }
    check_budget(n, 1)?;
    if m == 1 {
        return if n == 1 {
            Ok(vec![Word::empty()])
        } else {
            Err(domain("a single map has one cylinder per level; only n = 1 is possible"))
        };
    }
    let mut k = 0;
    while m.pow(k + 1) <= n {
        k += 1;
    }
    let mut need = n - m.pow(k);
    let mut words = Vec::with_capacity(n);
    for w in Word::all(m, k as usize) {
        // splitting a word into c children adds c - 1 sites
        let children = if need >= m - 1 { m } else { need + 1 };
        need -= children - 1;
        if children == 1 {
            words.push(w);
        } else {
            words.extend((1..=children as u32).map(|c| w.child(c)));
        }
    }
    Ok(words)
}

/// Midpoints of `n` cylinder cones: every cone of the deepest level `k` with
/// `m^k <= n`, where the lexicographically first ones are replaced by their
/// children until there are `n` sites.
pub fn cylinder_midpoint_quantizer(m: &SelfSimilarMeasure, n: usize) -> Result<Quantizer> {
    let spec = m.spec();
    let sites = midpoint_words(spec.len(), n)?
        .iter()
        .map(|w| Ok(m.base().image(&spec.compose(w)?)?.mid()))
        .collect::<Result<Vec<f64>>>()?;
    Quantizer::new(sites)
}

/// `Δ_n` for the Cantor measure: midpoints of the level-`k` cylinders, with
/// the first `n - 2^k` of them (in word order) split into their two children.
pub fn delta_n(n: usize) -> Result<Quantizer> {
    cylinder_midpoint_quantizer(&cantor::measure(), n)
}
