use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::transcript::{SelectionStep, SelectionTranscript};
use crate::omega::FinSet;
use crate::scalar::Scalar;
use crate::submeasure::{DensityBlocks, WeightFn};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SummableExtension<S: Scalar> {
    /// `f(n) = Σ_k 2^{-k}·μ_{n_k}({n})`
    pub f: WeightFn<S>,
    /// step `k - 1` records `n_k`, the support of `μ_{n_k}` and its mass against `k·2^k`
    pub transcript: SelectionTranscript<S>,
}

impl<S: Scalar> SummableExtension<S> {
    /// `(k, n_k)` for the selected blocks.
    pub fn selected(&self) -> Vec<(usize, u64)> {
        self.transcript.steps.iter().map(|s| (s.level, s.index.expect("block index"))).collect()
    }

    /// `ρ(F) = Σ_k 2^{-k}·μ_{n_k}(F)`, evaluated block by block.
    pub fn rho(&self, blocks: &DensityBlocks<S>, f: &FinSet) -> S {
        self.selected().into_iter().fold(S::zero(), |acc, (k, n)| acc + S::pow2(-(k as i64)) * blocks.measure(n, f))
    }

    /// `Σ_{n∈F} f(n)`
    pub fn weight_sum(&self, f: &FinSet) -> S {
        f.iter().fold(S::zero(), |acc, &n| acc + self.f.weight(n))
    }
}

/// Picks `n_1 < n_2 < …` with `μ_{n_k}(ω) > k·2^k` for `k = 1..=depth`, examining block indices
/// below `budget`, and returns the induced summable weight.
pub fn summable_extension<S: Scalar>(blocks: &DensityBlocks<S>, depth: usize, budget: u64) -> SummableExtension<S> {
    let mut transcript = SelectionTranscript::default();
    let mut entries: BTreeMap<u64, S> = BTreeMap::new();
    let limit = blocks.len().map_or(budget, |l| budget.min(l as u64));
    let mut n = 0u64;
    for k in 1..=depth {
        let threshold = S::from_usize(k) * S::pow2(k as i64);
        while n < limit && blocks.mass(n) <= threshold {
            n += 1;
        }
        if n >= limit {
            transcript = transcript.fail(k, n, "no block mass exceeds k·2^k within budget");
            break;
        }
        let scale = S::pow2(-(k as i64));
        let support = blocks.support(n).unwrap_or_default();
        for &x in &support {
            let w = scale.clone() * blocks.weight(n, x);
            if !w.is_zero() {
                let e = entries.entry(x).or_insert_with(S::zero);
                *e = e.clone() + w;
            }
        }
        transcript.steps.push(SelectionStep {
            level: k,
            index: Some(n),
            sign: None,
            set: support,
            value: blocks.mass(n),
            threshold,
        });
        n += 1;
    }
    SummableExtension { f: WeightFn::Sparse { entries }, transcript }
}
