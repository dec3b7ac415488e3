use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::graph::{BlockGraph, HitRatio};
use crate::error::{invalid, Result};
use crate::omega::FinSet;
use crate::scalar::Scalar;

/// Ground set of a block together with its bijection onto the vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ground {
    /// `[lo, hi)` with `x ↦ x - lo`
    Interval { lo: u64, hi: u64 },
    /// sorted points; `vertices[i]` is the image of `points[i]`
    Points { points: Vec<u64>, vertices: Vec<u64> },
}

/// `(Gₙ, Hₙ, bₙ)`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphBlock {
    pub ground: Ground,
    pub graph: BlockGraph,
}

impl Ground {
    pub fn size(&self) -> u64 {
        match self {
            Ground::Interval { lo, hi } => hi - lo,
            Ground::Points { points, .. } => points.len() as u64,
        }
    }

    pub fn span(&self) -> (u64, u64) {
        match self {
            Ground::Interval { lo, hi } => (*lo, *hi),
            Ground::Points { points, .. } => match (points.first(), points.last()) {
                (Some(&a), Some(&z)) => (a, z + 1),
                _ => (0, 0),
            },
        }
    }

    pub fn vertex(&self, x: u64) -> Option<u64> {
        match self {
            Ground::Interval { lo, hi } => (*lo <= x && x < *hi).then(|| x - lo),
            Ground::Points { points, vertices } => points.binary_search(&x).ok().map(|i| vertices[i]),
        }
    }

    pub fn point(&self, v: u64) -> Option<u64> {
        match self {
            Ground::Interval { lo, hi } => (v < hi - lo).then(|| lo + v),
            Ground::Points { points, vertices } => vertices.iter().position(|&w| w == v).map(|i| points[i]),
        }
    }

    /// Ground points in increasing order.
    pub fn points(&self) -> Box<dyn Iterator<Item = u64> + '_> {
        match self {
            Ground::Interval { lo, hi } => Box::new(*lo..*hi),
            Ground::Points { points, .. } => Box::new(points.iter().copied()),
        }
    }
}

impl HypergraphBlock {
    /// Block whose ground points are the vertices themselves.
    pub fn identity(graph: super::Hypergraph) -> Self {
        let points = graph.vertices.clone();
        HypergraphBlock {
            ground: Ground::Points { vertices: points.clone(), points },
            graph: BlockGraph::Explicit { hypergraph: graph },
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.ground, &self.graph) {
            (Ground::Points { points, vertices }, g) => {
                if points.len() != vertices.len() {
                    return invalid("bijection length differs from ground size");
                }
                if points.windows(2).any(|w| w[0] >= w[1]) {
                    return invalid("ground points must be strictly increasing");
                }
                let image: BTreeSet<u64> = vertices.iter().copied().collect();
                if image.len() != vertices.len() {
                    return invalid("bijection is not injective");
                }
                match g {
                    BlockGraph::Explicit { hypergraph } => {
                        hypergraph.validate()?;
                        if hypergraph.vertices != image.into_iter().collect::<Vec<_>>() {
                            return invalid("bijection is not onto the vertex set");
                        }
                    }
                    BlockGraph::CompleteUniform { order, .. } => {
                        if image.into_iter().ne(0..*order) {
                            return invalid("bijection is not onto the vertex set");
                        }
                    }
                }
                Ok(())
            }
            (Ground::Interval { lo, hi }, g) => {
                if lo > hi {
                    return invalid("empty interval ground");
                }
                let n = hi - lo;
                match g {
                    BlockGraph::Explicit { hypergraph } => {
                        hypergraph.validate()?;
                        if hypergraph.vertices.iter().copied().ne(0..n) {
                            return invalid("vertices must be 0..|G| for interval grounds");
                        }
                        Ok(())
                    }
                    BlockGraph::CompleteUniform { order, .. } if *order == n => Ok(()),
                    _ => invalid("vertex count differs from ground size"),
                }
            }
        }
    }

    /// `max_e |b[F ∩ G] ∩ e| / |e|`
    pub fn ratio(&self, f: &FinSet) -> HitRatio {
        let (lo, hi) = self.ground.span();
        let image: BTreeSet<u64> = f.range(lo..hi).filter_map(|&x| self.ground.vertex(x)).collect();
        self.graph.max_hit(&image)
    }

    /// `b⁻¹[e]`
    pub fn preimage(&self, edge: &[u64]) -> FinSet {
        edge.iter().filter_map(|&v| self.ground.point(v)).collect()
    }
}

/// Generated block streams; ground sets are consecutive intervals starting at `start`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratedFamily {
    /// block `n ≥ 1`: complete `2^n`-uniform hypergraph on `(2^n − 1)·2^n` vertices, which is the
    /// Kneser hypergraph `KG^{2^n}((2^n − 1)·2^n, 1)` with chromatic number `2^n`;
    /// block 0: one vertex carrying a singleton edge
    AdlKneser,
    /// block `n`: `2^n` vertices forming a single edge
    DyadicSingleEdge,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HyperBlocks {
    Explicit {
        blocks: Vec<HypergraphBlock>,
    },
    Generated {
        family: GeneratedFamily,
        #[serde(default)]
        start: u64,
    },
}

impl GeneratedFamily {
    fn order(&self, n: u32) -> Option<u64> {
        let p = 1u64.checked_shl(n).filter(|&p| n < 63 && p > 0)?;
        match self {
            GeneratedFamily::AdlKneser if n == 0 => Some(1),
            GeneratedFamily::AdlKneser => (p - 1).checked_mul(p),
            GeneratedFamily::DyadicSingleEdge => Some(p),
        }
    }
}

impl HyperBlocks {
    pub fn adl_kneser() -> Self {
        HyperBlocks::Generated { family: GeneratedFamily::AdlKneser, start: 0 }
    }

    pub fn dyadic_single_edge() -> Self {
        HyperBlocks::Generated { family: GeneratedFamily::DyadicSingleEdge, start: 0 }
    }

    pub fn explicit(blocks: Vec<HypergraphBlock>) -> Result<Self> {
        let b = HyperBlocks::Explicit { blocks };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if let HyperBlocks::Explicit { blocks } = self {
            let mut last: Option<u64> = None;
            for (i, b) in blocks.iter().enumerate() {
                b.validate().map_err(|e| crate::error::Error::InvalidInput(format!("block {i}: {e}")))?;
                let (lo, hi) = b.ground.span();
                if lo < hi {
                    if last.is_some_and(|l| lo < l) {
                        return invalid(format!("block {i} ground overlaps an earlier block"));
                    }
                    last = Some(hi);
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            HyperBlocks::Explicit { blocks } => Some(blocks.len()),
            HyperBlocks::Generated { .. } => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    fn generated_span(family: &GeneratedFamily, start: u64, n: u64) -> Option<(u64, u64)> {
        let mut lo = start;
        for j in 0..n {
            lo = lo.checked_add(family.order(j as u32)?)?;
        }
        Some((lo, lo.checked_add(family.order(n as u32)?)?))
    }

    pub fn block(&self, n: u64) -> Option<Cow<'_, HypergraphBlock>> {
        match self {
            HyperBlocks::Explicit { blocks } => blocks.get(n as usize).map(Cow::Borrowed),
            HyperBlocks::Generated { family, start } => {
                let (lo, hi) = Self::generated_span(family, *start, n)?;
                let rank = 1u64 << n;
                Some(Cow::Owned(HypergraphBlock {
                    ground: Ground::Interval { lo, hi },
                    graph: BlockGraph::CompleteUniform { order: hi - lo, rank },
                }))
            }
        }
    }

    pub fn ground_size(&self, n: u64) -> Option<u64> {
        self.block(n).map(|b| b.ground.size())
    }

    pub fn block_of(&self, x: u64) -> Option<u64> {
        match self {
            HyperBlocks::Explicit { blocks } => {
                blocks.iter().position(|b| b.ground.vertex(x).is_some()).map(|i| i as u64)
            }
            HyperBlocks::Generated { family, start } => {
                let mut lo = *start;
                if x < lo {
                    return None;
                }
                for n in 0..63u32 {
                    let hi = lo.checked_add(family.order(n)?)?;
                    if x < hi {
                        return Some(n as u64);
                    }
                    lo = hi;
                }
                None
            }
        }
    }

    /// Block ratios of `F`, keyed by block index.
    pub fn ratios(&self, f: &FinSet) -> BTreeMap<u64, HitRatio> {
        let mut by_block: BTreeMap<u64, FinSet> = BTreeMap::new();
        for &x in f {
            if let Some(n) = self.block_of(x) {
                by_block.entry(n).or_default().insert(x);
            }
        }
        by_block.into_iter().map(|(n, part)| (n, self.block(n).expect("indexed block").ratio(&part))).collect()
    }
}

/// `φ(F) = sup_n sup_{e ∈ E(Hₙ)} |bₙ[F ∩ Gₙ] ∩ e| / |e|`, optionally only over `selected` block indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphSubmeasure {
    #[serde(alias = "blocks_ref")]
    pub blocks: HyperBlocks,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selected: Option<BTreeSet<u64>>,
}

impl HypergraphSubmeasure {
    pub fn new(blocks: HyperBlocks) -> Self {
        HypergraphSubmeasure { blocks, selected: None }
    }

    pub fn counts(&self, n: u64) -> bool {
        self.selected.as_ref().is_none_or(|s| s.contains(&n))
    }

    pub fn ratio(&self, f: &FinSet) -> HitRatio {
        let mut best = HitRatio::zero();
        for (n, r) in self.blocks.ratios(f) {
            if self.counts(n) && r.cmp_ratio(&best).is_gt() {
                best = r;
            }
        }
        best
    }

    pub fn eval<S: Scalar>(&self, f: &FinSet) -> S {
        let r = self.ratio(f);
        S::from_u64(r.hits) / S::from_u64(r.size)
    }

    /// Counted blocks whose ground lies inside `[lo, hi)`.
    pub fn blocks_within(&self, lo: u64, hi: u64) -> Vec<u64> {
        let mut out = Vec::new();
        let mut n = 0;
        while let Some(b) = self.blocks.block(n) {
            let (a, z) = b.ground.span();
            if a >= hi {
                break;
            }
            if a >= lo && z <= hi && a < z && self.counts(n) {
                out.push(n);
            }
            n += 1;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hypergraph;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn single_block_ratio() {
        let h = Hypergraph::new(0..4, vec![vec![0, 1, 2, 3]]).unwrap();
        let phi = HypergraphSubmeasure::new(HyperBlocks::explicit(vec![HypergraphBlock::identity(h)]).unwrap());
        assert_eq!(phi.eval::<Q>(&[0, 1].into_iter().collect()), Q::from_frac(1, 2));
        assert_eq!(phi.eval::<Q>(&FinSet::new()), Q::from_u64(0));
    }

    #[test]
    fn two_blocks_take_max() {
        let a = Hypergraph::new(0..2, vec![vec![0, 1]]).unwrap();
        let b = Hypergraph::new(2..6, vec![vec![2, 3, 4, 5]]).unwrap();
        let phi = HypergraphSubmeasure::new(
            HyperBlocks::explicit(vec![HypergraphBlock::identity(a), HypergraphBlock::identity(b)]).unwrap(),
        );
        let f: FinSet = [0, 2, 3, 4].into_iter().collect();
        assert_eq!(phi.eval::<Q>(&f), Q::from_frac(3, 4));
    }

    #[test]
    fn generated_layout() {
        let b = HyperBlocks::adl_kneser();
        assert_eq!(b.ground_size(0), Some(1));
        assert_eq!(b.ground_size(1), Some(2));
        assert_eq!(b.ground_size(2), Some(12));
        assert_eq!(b.block_of(0), Some(0));
        assert_eq!(b.block_of(2), Some(1));
        assert_eq!(b.block_of(3), Some(2));
        assert_eq!(b.block_of(14), Some(2));
        assert_eq!(b.block_of(15), Some(3));
        let d = HyperBlocks::dyadic_single_edge();
        assert_eq!(d.block(3).unwrap().ground.span(), (7, 15));
    }

    #[test]
    fn overlapping_explicit_blocks_rejected() {
        let a = Hypergraph::new(0..3, vec![vec![0, 1]]).unwrap();
        let b = Hypergraph::new(2..4, vec![vec![2, 3]]).unwrap();
        assert!(HyperBlocks::explicit(vec![HypergraphBlock::identity(a), HypergraphBlock::identity(b)]).is_err());
    }
}
