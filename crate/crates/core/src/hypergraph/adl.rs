use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::blocks::{HyperBlocks, HypergraphSubmeasure};
use super::graph::HitRatio;
use crate::error::{invalid, Error, Result};
use crate::omega::{Chain, FinSet, MapFormula, OmegaSet, PartitionScheme};
use crate::scalar::Scalar;
use crate::submeasure::Submeasure;

/// Base blocks with edge sizes `2^n` at index `n`, and the selected indices `n₀ < n₁ < …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdlConfig {
    pub blocks: HyperBlocks,
    pub selected: Vec<u64>,
}

/// One instance of `|e| > k · Σ_{i<k} |G_{n_i}|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarCheck {
    pub k: usize,
    pub index: u64,
    pub min_edge: u64,
    pub bound: u128,
    pub holds: bool,
}

fn check_edge_schedule(blocks: &HyperBlocks, n: u64) -> Result<()> {
    let b = blocks.block(n).ok_or_else(|| Error::Budget(format!("block stream ends before index {n}")))?;
    let size = 1u64.checked_shl(n as u32).filter(|_| n < 64).unwrap_or(u64::MAX);
    if !b.graph.has_edges() || !b.graph.uniform_of_size(size) {
        return invalid(format!("block {n} does not have all edges of size 2^{n}"));
    }
    Ok(())
}

impl AdlConfig {
    pub fn star_checks(&self) -> Result<Vec<StarCheck>> {
        let mut out = Vec::new();
        let mut sum: u128 = 0;
        for (k, &n) in self.selected.iter().enumerate() {
            let b = self
                .blocks
                .block(n)
                .ok_or_else(|| Error::InvalidInput(format!("selected block {n} does not exist")))?;
            let min_edge = b.graph.min_edge_size().unwrap_or(0);
            let bound = k as u128 * sum;
            out.push(StarCheck { k, index: n, min_edge, bound, holds: min_edge as u128 > bound });
            sum += b.ground.size() as u128;
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        self.blocks.validate()?;
        if self.selected.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("selected indices must be strictly increasing");
        }
        for &n in &self.selected {
            check_edge_schedule(&self.blocks, n)?;
        }
        if let Some(c) = self.star_checks()?.into_iter().find(|c| !c.holds) {
            return invalid(format!("inequality (*) fails at k={} (|e|={} ≤ {})", c.k, c.min_edge, c.bound));
        }
        Ok(())
    }
}

/// Selects `n₀ < … < n_{depth−1}`, each minimal, with `|e| > k·Σ_{i<k}|G_{n_i}|` for every edge of `H_{n_k}`.
pub fn adl_select(blocks: &HyperBlocks, depth: usize, index_budget: u64) -> Result<AdlConfig> {
    if depth == 0 {
        return invalid("depth must be >= 1");
    }
    blocks.validate()?;
    let mut selected: Vec<u64> = Vec::with_capacity(depth);
    let mut sum: u128 = 0;
    for k in 0..depth {
        let from = selected.last().map_or(0, |&n| n + 1);
        let mut found = None;
        for n in from..=index_budget {
            if blocks.block(n).is_none() {
                break;
            }
            check_edge_schedule(blocks, n)?;
            let b = blocks.block(n).expect("checked");
            if b.graph.min_edge_size().unwrap_or(0) as u128 > k as u128 * sum {
                found = Some((n, b.ground.size()));
                break;
            }
        }
        match found {
            Some((n, g)) => {
                selected.push(n);
                sum += g as u128;
            }
            None => return Err(Error::Budget(format!("no block index ≤ {index_budget} satisfies (*) at k={k}"))),
        }
    }
    Ok(AdlConfig { blocks: blocks.clone(), selected })
}

/// `φ_M`: the hypergraph submeasure over the selected blocks `n_k` with `k ∈ M`.
pub fn adl_ideal<S: Scalar>(config: &AdlConfig, m: &OmegaSet) -> Submeasure<S> {
    let selected: BTreeSet<u64> =
        config.selected.iter().enumerate().filter(|(k, _)| m.contains(*k as u64)).map(|(_, &n)| n).collect();
    Submeasure::Hypergraph(HypergraphSubmeasure { blocks: config.blocks.clone(), selected: Some(selected) })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NppStep {
    pub level: usize,
    pub cell: usize,
    pub index: u64,
    pub edge: Vec<u64>,
    pub preimage: FinSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NppWitness {
    pub chain: Chain,
    pub steps: Vec<NppStep>,
    pub m: FinSet,
    pub b_m: OmegaSet,
    /// block ratio of `B_M` at `n_k` for each `k ∈ M`
    pub ratios: Vec<(usize, HitRatio)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum NppOutcome {
    Witness(NppWitness),
    Failure { level: usize, searched_up_to: u64, partial: Vec<NppStep> },
}

/// Longest stretch of ground points scanned when looking for an edge inside a cell.
const SCAN_LIMIT: u64 = 1 << 22;

/// Builds a decreasing chain of cells with edges `e_k` of `H_{n_k}` whose preimages lie inside the cells.
pub fn npp_failure_witness(
    blocks: &HyperBlocks,
    scheme: &PartitionScheme,
    depth: usize,
    m: &FinSet,
    index_budget: u64,
) -> Result<NppOutcome> {
    if depth == 0 {
        return invalid("depth must be >= 1");
    }
    if let Some(&k) = m.iter().find(|&&k| k as usize >= depth) {
        return invalid(format!("index {k} in M is beyond depth {depth}"));
    }
    blocks.validate()?;
    scheme.validate()?;
    let mut steps: Vec<NppStep> = Vec::new();
    for level in 0..depth {
        let candidates = match steps.last() {
            None => (0..scheme.cells(0)?).collect::<Vec<_>>(),
            Some(prev) => scheme.children(level - 1, prev.cell)?,
        };
        let from = steps.last().map_or(0, |s| s.index + 1);
        let mut found = None;
        'search: for n in from..=index_budget {
            let Some(b) = blocks.block(n) else { break };
            for &cell in &candidates {
                let mut inside = Vec::new();
                let need = b.graph.rank();
                for x in b.ground.points().take(SCAN_LIMIT as usize) {
                    if scheme.label(level, x)? == cell {
                        inside.push(b.ground.vertex(x).expect("ground point"));
                        if need.is_some_and(|r| inside.len() as u64 >= r) {
                            break;
                        }
                    }
                }
                inside.sort_unstable();
                if let Some(edge) = b.graph.least_edge_within(&inside) {
                    let preimage = b.preimage(&edge);
                    found = Some(NppStep { level, cell, index: n, edge, preimage });
                    break 'search;
                }
            }
        }
        match found {
            Some(step) => steps.push(step),
            None => return Ok(NppOutcome::Failure { level, searched_up_to: index_budget, partial: steps }),
        }
    }
    let b_m: FinSet =
        steps.iter().filter(|s| m.contains(&(s.level as u64))).flat_map(|s| s.preimage.iter().copied()).collect();
    let ratios = steps
        .iter()
        .filter(|s| m.contains(&(s.level as u64)))
        .map(|s| (s.level, blocks.block(s.index).expect("selected block").ratio(&b_m)))
        .collect();
    let chain = Chain { cells: steps.iter().map(|s| s.cell).collect() };
    Ok(NppOutcome::Witness(NppWitness { chain, steps, m: m.clone(), b_m: OmegaSet::Finite { elements: b_m }, ratios }))
}

impl NppWitness {
    /// Re-checks cells, chain shape and the unit ratios.
    pub fn verify(&self, blocks: &HyperBlocks, scheme: &PartitionScheme) -> Result<bool> {
        if !self.chain.is_valid(scheme) {
            return Ok(false);
        }
        for s in &self.steps {
            for &x in &s.preimage {
                if scheme.label(s.level, x)? != s.cell {
                    return Ok(false);
                }
            }
            let b = blocks.block(s.index).ok_or_else(|| Error::InvalidInput("missing block".into()))?;
            if b.preimage(&s.edge) != s.preimage {
                return Ok(false);
            }
        }
        if self.steps.windows(2).any(|w| w[0].index >= w[1].index) {
            return Ok(false);
        }
        let b_m = self.b_m.as_finite().cloned().unwrap_or_default();
        for s in self.steps.iter().filter(|s| self.m.contains(&(s.level as u64))) {
            if !blocks.block(s.index).expect("checked").ratio(&b_m).is_full() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexVerdict {
    Pass,
    Fail,
    Unknown,
    /// `k < 2` in `M_β`: the displayed bound only applies from `k = 2` on
    Unconstrained,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub k: usize,
    pub index: u64,
    pub ratio: Option<HitRatio>,
    pub verdict: IndexVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceVerdict {
    Evidence,
    NoEvidence,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonIsoReport {
    pub tested: Vec<usize>,
    pub a: FinSet,
    pub alpha: Vec<IndexReport>,
    pub beta: Vec<IndexReport>,
    /// `k ∈ M_α ∩ M_β`: ratio of `φ[A_k]` at `n_k`
    pub overlap: Vec<IndexReport>,
    pub verdict: EvidenceVerdict,
}

/// Points of `b⁻¹[e_k]` whose images avoid the earlier selected grounds, at least `⌈|e_k|/2⌉` of them.
fn half_edge(config: &AdlConfig, k: usize, map: &MapFormula) -> Option<FinSet> {
    let b = config.blocks.block(config.selected[k])?;
    let edge = b.graph.least_edge()?;
    let need = edge.len().div_ceil(2);
    let earlier: Vec<(u64, u64)> =
        config.selected[..k].iter().map(|&n| config.blocks.block(n).expect("selected").ground.span()).collect();
    let earlier_blocks: Vec<u64> = config.selected[..k].to_vec();
    let avoids = |y: u64| {
        !earlier.iter().zip(&earlier_blocks).any(|(&(lo, hi), &n)| {
            lo <= y && y < hi && config.blocks.block(n).expect("selected").ground.vertex(y).is_some()
        })
    };
    let chosen: FinSet = b.preimage(&edge).into_iter().filter(|&x| avoids(map.apply(x))).take(need).collect();
    (chosen.len() == need).then_some(chosen)
}

fn ratio_at(config: &AdlConfig, k: usize, set: &FinSet) -> HitRatio {
    config.blocks.block(config.selected[k]).expect("selected").ratio(set)
}

/// Evidence that `𝓘_{M_α}` is not carried onto `𝓘_{M_β}` by the given map.
pub fn nonisomorphism_evidence(
    config: &AdlConfig,
    m_alpha: &OmegaSet,
    m_beta: &OmegaSet,
    map: &MapFormula,
    horizon: u64,
) -> Result<NonIsoReport> {
    config.validate()?;
    map.validate()?;
    let tested: Vec<usize> = (0..config.selected.len())
        .filter(|&k| {
            config.blocks.block(config.selected[k]).and_then(|b| b.graph.min_edge_size()).is_some_and(|s| s <= horizon)
        })
        .collect();
    let in_a = |k: usize| m_alpha.contains(k as u64);
    let in_b = |k: usize| m_beta.contains(k as u64);

    let mut a = FinSet::new();
    let mut alpha = Vec::new();
    let mut pieces = Vec::new();
    for &k in tested.iter().filter(|&&k| in_a(k) && !in_b(k)) {
        match half_edge(config, k, map) {
            Some(ak) => {
                a.extend(ak.iter().copied());
                pieces.push(k);
            }
            None => {
                alpha.push(IndexReport { k, index: config.selected[k], ratio: None, verdict: IndexVerdict::Unknown })
            }
        }
    }
    for &k in &pieces {
        let r = ratio_at(config, k, &a);
        let pass = 2 * r.hits >= r.size;
        alpha.push(IndexReport {
            k,
            index: config.selected[k],
            ratio: Some(r),
            verdict: if pass { IndexVerdict::Pass } else { IndexVerdict::Fail },
        });
    }
    alpha.sort_by_key(|r| r.k);

    let image: FinSet = a.iter().map(|&x| map.apply(x)).collect();
    let mut beta = Vec::new();
    for &k in tested.iter().filter(|&&k| in_b(k) && !in_a(k)) {
        let r = ratio_at(config, k, &image);
        let verdict = if k < 2 {
            IndexVerdict::Unconstrained
        } else if (r.hits as u128) * (k as u128) < r.size as u128 {
            IndexVerdict::Pass
        } else {
            IndexVerdict::Fail
        };
        beta.push(IndexReport { k, index: config.selected[k], ratio: Some(r), verdict });
    }

    let mut overlap = Vec::new();
    for &k in tested.iter().filter(|&&k| in_a(k) && in_b(k)) {
        let report = match half_edge(config, k, map) {
            Some(ak) => {
                let img: FinSet = ak.iter().map(|&x| map.apply(x)).collect();
                let r = ratio_at(config, k, &img);
                let small = k >= 2 && (r.hits as u128) * (k as u128) < r.size as u128;
                IndexReport {
                    k,
                    index: config.selected[k],
                    ratio: Some(r),
                    verdict: if small { IndexVerdict::Pass } else { IndexVerdict::Fail },
                }
            }
            None => IndexReport { k, index: config.selected[k], ratio: None, verdict: IndexVerdict::Unknown },
        };
        overlap.push(report);
    }

    let all: Vec<&IndexReport> = alpha.iter().chain(beta.iter()).collect();
    let constrained_beta = beta.iter().filter(|r| r.verdict != IndexVerdict::Unconstrained).count();
    let verdict = if all.iter().any(|r| r.verdict == IndexVerdict::Fail) {
        EvidenceVerdict::NoEvidence
    } else if all.iter().any(|r| r.verdict == IndexVerdict::Unknown) {
        EvidenceVerdict::Unknown
    } else if alpha.is_empty() || constrained_beta == 0 {
        EvidenceVerdict::NoEvidence
    } else {
        EvidenceVerdict::Evidence
    };
    Ok(NonIsoReport { tested, a, alpha, beta, overlap, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{Hypergraph, HypergraphBlock};
    use num_rational::BigRational;

    #[test]
    fn depth_one_selects_zero() {
        let c = adl_select(&HyperBlocks::adl_kneser(), 1, 10).unwrap();
        assert_eq!(c.selected, vec![0]);
    }

    #[test]
    fn single_edge_blocks_step_by_one() {
        let c = adl_select(&HyperBlocks::dyadic_single_edge(), 2, 10).unwrap();
        assert_eq!(c.selected, vec![0, 1]);
    }

    #[test]
    fn four_point_first_block() {
        // block 0: four singleton edges, later blocks single edges of size 2^n
        let mut blocks =
            vec![HypergraphBlock::identity(Hypergraph::new(0..4, (0..4).map(|v| vec![v]).collect()).unwrap())];
        let mut lo = 4;
        for n in 1..6u32 {
            let size = 1u64 << n;
            blocks.push(HypergraphBlock::identity(
                Hypergraph::new(lo..lo + size, vec![(lo..lo + size).collect()]).unwrap(),
            ));
            lo += size;
        }
        let c = adl_select(&HyperBlocks::explicit(blocks).unwrap(), 2, 10).unwrap();
        assert_eq!(c.selected, vec![0, 3]);
    }

    #[test]
    fn wrong_edge_sizes_rejected() {
        let h = Hypergraph::new(0..3, vec![vec![0, 1, 2]]).unwrap();
        let blocks = HyperBlocks::explicit(vec![HypergraphBlock::identity(h)]).unwrap();
        assert!(matches!(adl_select(&blocks, 1, 4), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn ideal_masks() {
        type Q = BigRational;
        let c = adl_select(&HyperBlocks::adl_kneser(), 3, 20).unwrap();
        let zero: Submeasure<Q> = adl_ideal(&c, &OmegaSet::empty());
        let f: FinSet = (0..100).collect();
        assert_eq!(zero.eval_finite(&f), Q::from_u64(0));
        let only0: Submeasure<Q> = adl_ideal(&c, &OmegaSet::finite([0]));
        assert_eq!(only0.eval_finite(&(1..100).collect()), Q::from_u64(0));
        let full: Submeasure<Q> = adl_ideal(&c, &OmegaSet::all());
        assert_eq!(full.eval_finite(&f), Q::from_u64(1));
    }
}
