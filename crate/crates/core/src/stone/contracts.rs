use serde::{Deserialize, Serialize};

use super::measure::{ClopenCode, FinMeasure, Point};
use crate::error::{invalid, Result};
use crate::omega::MapFormula;
use crate::scalar::{serde_scalar, Scalar};
use crate::submeasure::DensityBlocks;

/// A sequence of finitely supported measures, explicit or generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum MeasureStream<S: Scalar> {
    Explicit {
        measures: Vec<FinMeasure<S>>,
    },
    /// `n·δ_{x_n} − n·δ_p` with `x_n = points(n)`
    DeltaPair {
        points: MapFormula,
    },
    /// the `n`-th block of a density stream, as a measure on ω
    Blocks {
        blocks: DensityBlocks<S>,
    },
    /// `μ_n(ω)·δ_p − μ_n` for the blocks `μ_n`
    NfStrong {
        blocks: DensityBlocks<S>,
    },
}

impl<S: Scalar> MeasureStream<S> {
    pub fn delta_pair(points: MapFormula) -> Self {
        MeasureStream::DeltaPair { points }
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            MeasureStream::Explicit { measures } => Some(measures.len()),
            MeasureStream::DeltaPair { .. } => None,
            MeasureStream::Blocks { blocks } | MeasureStream::NfStrong { blocks } => blocks.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn get(&self, n: u64) -> Option<FinMeasure<S>> {
        match self {
            MeasureStream::Explicit { measures } => measures.get(n as usize).cloned(),
            MeasureStream::DeltaPair { points } => Some(delta_pair_witness(points, n)),
            MeasureStream::Blocks { blocks } => block_measure(blocks, n),
            MeasureStream::NfStrong { blocks } => block_measure(blocks, n).map(|m| nf_strong_step(&m)),
        }
    }

    /// The first `count` measures (fewer if the stream is shorter).
    pub fn prefix(&self, count: usize) -> Vec<FinMeasure<S>> {
        (0..count as u64).map_while(|n| self.get(n)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureStream::Explicit { measures } => measures.iter().try_for_each(|m| m.validate()),
            MeasureStream::DeltaPair { points } => {
                points.validate()?;
                Ok(())
            }
            MeasureStream::Blocks { blocks } | MeasureStream::NfStrong { blocks } => {
                blocks.validate()?;
                Ok(())
            }
        }
    }
}

fn block_measure<S: Scalar>(blocks: &DensityBlocks<S>, n: u64) -> Option<FinMeasure<S>> {
    if blocks.len().is_some_and(|l| n as usize >= l) {
        return None;
    }
    let support = blocks.support(n)?;
    Some(FinMeasure::from_weights(support.into_iter().map(|x| (Point::Nat(x), blocks.weight(n, x)))))
}

/// `n·δ_{x_n} − n·δ_p`
pub fn delta_pair_witness<S: Scalar>(points: &MapFormula, n: u64) -> FinMeasure<S> {
    let c = S::from_u64(n);
    FinMeasure::from_weights([(Point::Nat(points.apply(n)), c.clone()), (Point::P, -c)])
}

fn nf_strong_step<S: Scalar>(mu: &FinMeasure<S>) -> FinMeasure<S> {
    FinMeasure::dirac(Point::P, mu.total()).minus(mu)
}

/// `ν_n = μ_n(ω)·δ_p − μ_n` for non-negative measures supported in ω.
pub fn nf_strong_witness<S: Scalar>(seq: &[FinMeasure<S>]) -> Result<Vec<FinMeasure<S>>> {
    for (i, m) in seq.iter().enumerate() {
        if !m.is_nonnegative() {
            return invalid(format!("measure {i} has a negative weight"));
        }
        if !m.p_weight().is_zero() {
            return invalid(format!("measure {i} charges p"));
        }
    }
    Ok(seq.iter().map(nf_strong_step).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PFreeVerdict {
    pub passed: bool,
    /// first index whose support contains `p`
    pub witness: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GrowthHit<S: Scalar> {
    #[serde(with = "serde_scalar")]
    pub target: S,
    /// first index whose norm exceeds the target
    pub index: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GrowthVerdict<S: Scalar> {
    pub passed: bool,
    #[serde(with = "serde_scalar::vec")]
    pub norms: Vec<S>,
    pub hits: Vec<GrowthHit<S>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NullRow<S: Scalar> {
    pub test: usize,
    #[serde(with = "serde_scalar")]
    pub eps: S,
    /// least index from which every value stays below `eps`, if that tail is nonempty
    pub settles_at: Option<usize>,
    #[serde(with = "serde_scalar")]
    pub last_value: S,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NullVerdict<S: Scalar> {
    pub passed: bool,
    pub rows: Vec<NullRow<S>>,
}

/// Verdicts on the three anti-Nikodym conditions over a finite prefix of a sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SequenceContractReport<S: Scalar> {
    pub length: usize,
    pub p_free: PFreeVerdict,
    pub growth: GrowthVerdict<S>,
    pub pointwise_null: NullVerdict<S>,
}

impl<S: Scalar> SequenceContractReport<S> {
    pub fn passed(&self) -> bool {
        self.p_free.passed && self.growth.passed && self.pointwise_null.passed
    }
}

/// Checks that no measure charges `p`, that the norms pass every growth target, and that on the
/// complement of each test set the values eventually stay below each `ε`.
pub fn anti_nikodym_contract<S: Scalar>(
    seq: &[FinMeasure<S>],
    tests: &[ClopenCode],
    targets: &[S],
    eps: &[S],
) -> Result<SequenceContractReport<S>> {
    if let Some(i) = tests.iter().position(|t| t.is_small()) {
        return invalid(format!("test set {i} must be a cosmall code"));
    }
    if let Some(e) = eps.iter().find(|e| !e.is_positive()) {
        return invalid(format!("tolerance {} must be positive", e.to_exact_string()));
    }
    let witness = seq.iter().position(|m| !m.p_weight().is_zero());
    let p_free = PFreeVerdict { passed: witness.is_none(), witness };

    let norms: Vec<S> = seq.iter().map(|m| m.norm()).collect();
    let hits: Vec<GrowthHit<S>> =
        targets.iter().map(|t| GrowthHit { target: t.clone(), index: norms.iter().position(|n| n > t) }).collect();
    let growth = GrowthVerdict { passed: hits.iter().all(|h| h.index.is_some()), norms, hits };

    let mut rows = Vec::new();
    for (ti, t) in tests.iter().enumerate() {
        let comp = t.complement();
        let values: Vec<S> = seq.iter().map(|m| m.eval(&comp).abs()).collect();
        for e in eps {
            let last_bad = values.iter().rposition(|v| v >= e);
            let settles_at = match last_bad {
                None => Some(0),
                Some(i) if i + 1 < values.len() => Some(i + 1),
                Some(_) => None,
            };
            rows.push(NullRow {
                test: ti,
                eps: e.clone(),
                settles_at: if values.is_empty() { None } else { settles_at },
                last_value: values.last().cloned().unwrap_or_else(S::zero),
            });
        }
    }
    let pointwise_null = NullVerdict { passed: rows.iter().all(|r| r.settles_at.is_some()), rows };
    Ok(SequenceContractReport { length: seq.len(), p_free, growth, pointwise_null })
}
