use serde::{Deserialize, Serialize};

use crate::constructions::{summable_extension, SummableExtension};
use crate::error::{Error, Result};
use crate::omega::{FinSet, OmegaSet};
use crate::scalar::{serde_scalar, Scalar};
use crate::submeasure::{DensityBlocks, WeightFn};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum DominanceReport {
    /// `f(n) ≤ g(n)` for `n ≤ … < horizon` from the least such `n`
    Dominated { from: u64, horizon: u64 },
    /// `f(horizon − 1) > g(horizon − 1)`, so no tested `N` works
    Falsified { horizon: u64 },
}

impl DominanceReport {
    pub fn from(&self) -> Option<u64> {
        match self {
            DominanceReport::Dominated { from, .. } => Some(*from),
            DominanceReport::Falsified { .. } => None,
        }
    }
}

/// The least `N ≤ horizon` with `f(n) ≤ g(n)` for all `N ≤ n < horizon`.
pub fn dominance<S: Scalar>(f: &WeightFn<S>, g: &WeightFn<S>, horizon: u64) -> DominanceReport {
    match (0..horizon).rev().find(|&n| f.weight(n) > g.weight(n)) {
        None => DominanceReport::Dominated { from: 0, horizon },
        Some(n) if n + 1 < horizon => DominanceReport::Dominated { from: n + 1, horizon },
        Some(_) => DominanceReport::Falsified { horizon },
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct InclusionRow<S: Scalar> {
    pub generator: OmegaSet,
    /// `Σ_{n∈A} f(n)`, a finite sum since `f` has finite support
    #[serde(with = "serde_scalar")]
    pub sum: S,
    /// `Σ_k 2^{-k}·μ_{n_k}(A)`
    #[serde(with = "serde_scalar")]
    pub rho: S,
    pub agrees: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct TukeyReport<S: Scalar> {
    pub extensions: Vec<SummableExtension<S>>,
    /// `matrix[i][j]` compares `f_i ≤* f_j`
    pub matrix: Vec<Vec<DominanceReport>>,
    pub inclusion: Vec<Vec<InclusionRow<S>>>,
}

impl<S: Scalar> TukeyReport<S> {
    pub fn inclusion_holds(&self) -> bool {
        self.inclusion.iter().flatten().all(|r| r.agrees)
    }
}

/// Generators of `exh(φ)` for a witness: each selected block support, their union, and two thin
/// infinite sets.
fn witness_generators<S: Scalar>(blocks: &DensityBlocks<S>, ext: &SummableExtension<S>) -> Vec<OmegaSet> {
    let mut union = FinSet::new();
    let mut out = Vec::new();
    for (_, n) in ext.selected() {
        let s = blocks.support(n).unwrap_or_default();
        union.extend(s.iter().copied());
        out.push(OmegaSet::Finite { elements: s });
    }
    out.push(OmegaSet::Finite { elements: union });
    out.push(OmegaSet::program(crate::omega::Formula::Squares));
    out.push(OmegaSet::program(crate::omega::Formula::PowersOfTwo));
    out
}

/// Maps each witness to its extracted summable weight, compares the weights pairwise and checks
/// that each generator gets a finite weight sum equal to its `ρ` value.
pub fn tukey_demo<S: Scalar>(witnesses: &[DensityBlocks<S>], depth: usize, horizon: u64) -> Result<TukeyReport<S>> {
    let mut extensions = Vec::with_capacity(witnesses.len());
    for (i, w) in witnesses.iter().enumerate() {
        w.validate()?;
        let ext = summable_extension(w, depth, horizon.max(64));
        if let Some(f) = &ext.transcript.failure {
            return Err(Error::Budget(format!("witness {i}: level {} unreachable: {}", f.level, f.reason)));
        }
        extensions.push(ext);
    }
    let matrix =
        extensions.iter().map(|a| extensions.iter().map(|b| dominance(&a.f, &b.f, horizon)).collect()).collect();
    let inclusion = witnesses
        .iter()
        .zip(&extensions)
        .map(|(blocks, ext)| {
            let cap = match &ext.f {
                WeightFn::Sparse { entries } => entries.keys().next_back().map_or(0, |&k| k + 1),
                _ => horizon,
            };
            witness_generators(blocks, ext)
                .into_iter()
                .map(|g| {
                    let part = g.prefix(cap);
                    let sum = ext.weight_sum(&part);
                    let rho = ext.rho(blocks, &part);
                    InclusionRow { agrees: sum == rho, generator: g, sum, rho }
                })
                .collect()
        })
        .collect();
    Ok(TukeyReport { extensions, matrix, inclusion })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submeasure::{Layout, MassFormula};
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn dominance_examples() {
        let id = WeightFn::<Q>::power(1);
        let sq = WeightFn::<Q>::power(2);
        assert_eq!(dominance(&id, &sq, 100).from(), Some(0));
        assert_eq!(dominance(&id, &id, 100).from(), Some(0));
        let succ = WeightFn::Explicit { values: (1..=100u64).map(Q::from_u64).collect() };
        assert_eq!(dominance(&succ, &id, 100), DominanceReport::Falsified { horizon: 100 });
        let late = WeightFn::Sparse { entries: [(5, Q::from_u64(9))].into_iter().collect() };
        assert_eq!(dominance(&late, &id, 100).from(), Some(6));
    }

    fn blocks(power: u32) -> DensityBlocks<Q> {
        DensityBlocks::generated(Layout::Dyadic, MassFormula::new(Q::from_u64(1), power, 2, Q::from_u64(1)))
    }

    #[test]
    fn two_witnesses() {
        let r = tukey_demo(&[blocks(1), blocks(2)], 6, 256).unwrap();
        assert_eq!(r.matrix.len(), 2);
        assert!(r.matrix.iter().all(|row| row.len() == 2));
        assert_eq!(r.matrix[0][1].from(), Some(0));
        assert!(r.inclusion_holds());
        let single = tukey_demo(&[blocks(1)], 4, 64).unwrap();
        assert_eq!(single.matrix[0][0].from(), Some(0));
    }

    #[test]
    fn bounded_witness_fails() {
        let bounded = DensityBlocks::generated(Layout::Dyadic, MassFormula::constant(Q::from_u64(3)));
        assert!(matches!(tukey_demo(&[bounded], 3, 64), Err(Error::Budget(_))));
    }
}
