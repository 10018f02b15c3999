//! Chaos-game sampling.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64(seed)`. Each step draws one `u64`, converts it to a
//! uniform `u = (bits >> 11) · 2^-53` in `[0, 1)` and picks the first map
//! index `i` with `u < p_1 + … + p_i` (the last map if rounding leaves a
//! gap). The walk starts at the midpoint of the base cone; the first
//! `burn_in` iterates are discarded.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SelfSimilarMeasure;
use crate::error::{domain, geometry, Result};
use crate::projline::ProjPoint;

pub(crate) fn unit_interval(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl SelfSimilarMeasure {
    /// `n` chaos-game points; identical for identical `(seed, n, burn_in)`.
    pub fn sample(&self, n: usize, seed: u64, burn_in: usize) -> Result<Vec<ProjPoint>> {
        Ok(self.sample_chart(n, seed, burn_in)?.into_iter().map(ProjPoint::finite).collect())
    }

    /// [`SelfSimilarMeasure::sample`] as raw chart coordinates.
    pub fn sample_chart(&self, n: usize, seed: u64, burn_in: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(domain("sample size must be at least 1"));
        }
        let cumulative: Vec<f64> = self
            .probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        let last = cumulative.len() - 1;
        let mats = self.spec.mats();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = self.base.mid();
        let mut out = Vec::with_capacity(n);
        for step in 0..burn_in + n {
            let u = unit_interval(&mut rng);
            let i = cumulative.iter().position(|&c| u < c).unwrap_or(last);
            x = mats[i]
                .apply_chart(x)
                .ok_or_else(|| geometry(format!("chaos-game iterate {step} escaped to infinity")))?;
            if step >= burn_in {
                out.push(x);
            }
        }
        Ok(out)
    }
}
