use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Finite hypergraph with explicit edges; every edge is sorted and nonempty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub vertices: Vec<u64>,
    pub edges: Vec<Vec<u64>>,
}

impl Hypergraph {
    pub fn new(vertices: impl IntoIterator<Item = u64>, edges: Vec<Vec<u64>>) -> Result<Self> {
        let vertices: BTreeSet<u64> = vertices.into_iter().collect();
        let mut clean = Vec::with_capacity(edges.len());
        for e in edges {
            let e: BTreeSet<u64> = e.into_iter().collect();
            if e.is_empty() {
                return invalid("empty edge");
            }
            if let Some(v) = e.iter().find(|v| !vertices.contains(v)) {
                return invalid(format!("edge vertex {v} is not a vertex"));
            }
            clean.push(e.into_iter().collect());
        }
        Ok(Hypergraph { vertices: vertices.into_iter().collect(), edges: clean })
    }

    pub fn empty() -> Self {
        Hypergraph { vertices: Vec::new(), edges: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        Hypergraph::new(self.vertices.iter().copied(), self.edges.clone()).and_then(|h| {
            if h.vertices.len() != self.vertices.len() {
                invalid("duplicate vertices")
            } else {
                Ok(())
            }
        })
    }

    /// `H↾W`: vertex set `W`, edges of `H` contained in `W`.
    pub fn restrict(&self, w: &BTreeSet<u64>) -> Result<Hypergraph> {
        if let Some(v) = w.iter().find(|v| self.vertices.binary_search(v).is_err()) {
            return invalid(format!("{v} is not a vertex"));
        }
        Ok(Hypergraph {
            vertices: w.iter().copied().collect(),
            edges: self.edges.iter().filter(|e| e.iter().all(|v| w.contains(v))).cloned().collect(),
        })
    }

    pub fn least_edge(&self) -> Option<&Vec<u64>> {
        self.edges.iter().min()
    }
}

/// Hypergraph attached to a block: explicit, or the complete `rank`-uniform one on `0..order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlockGraph {
    Explicit { hypergraph: Hypergraph },
    CompleteUniform { order: u64, rank: u64 },
}

/// `hits / size`, compared exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitRatio {
    pub hits: u64,
    pub size: u64,
}

impl HitRatio {
    pub fn zero() -> Self {
        HitRatio { hits: 0, size: 1 }
    }

    pub fn cmp_ratio(&self, other: &HitRatio) -> Ordering {
        (self.hits as u128 * other.size as u128).cmp(&(other.hits as u128 * self.size as u128))
    }

    pub fn is_full(&self) -> bool {
        self.hits == self.size
    }
}

impl BlockGraph {
    pub fn vertex_count(&self) -> u64 {
        match self {
            BlockGraph::Explicit { hypergraph } => hypergraph.vertices.len() as u64,
            BlockGraph::CompleteUniform { order, .. } => *order,
        }
    }

    pub fn has_edges(&self) -> bool {
        match self {
            BlockGraph::Explicit { hypergraph } => !hypergraph.edges.is_empty(),
            BlockGraph::CompleteUniform { order, rank } => rank <= order && *rank > 0,
        }
    }

    pub fn min_edge_size(&self) -> Option<u64> {
        match self {
            BlockGraph::Explicit { hypergraph } => hypergraph.edges.iter().map(|e| e.len() as u64).min(),
            BlockGraph::CompleteUniform { .. } => self.has_edges().then(|| self.rank().unwrap()),
        }
    }

    pub fn rank(&self) -> Option<u64> {
        match self {
            BlockGraph::Explicit { .. } => None,
            BlockGraph::CompleteUniform { rank, .. } => Some(*rank),
        }
    }

    /// All edges have exactly `size` vertices.
    pub fn uniform_of_size(&self, size: u64) -> bool {
        match self {
            BlockGraph::Explicit { hypergraph } => hypergraph.edges.iter().all(|e| e.len() as u64 == size),
            BlockGraph::CompleteUniform { rank, .. } => *rank == size,
        }
    }

    /// `max_e |X ∩ e| / |e|`, with the lexicographically least maximizing edge size.
    pub fn max_hit(&self, x: &BTreeSet<u64>) -> HitRatio {
        match self {
            BlockGraph::Explicit { hypergraph } => {
                let mut best = HitRatio::zero();
                for e in &hypergraph.edges {
                    let r = HitRatio { hits: e.iter().filter(|v| x.contains(v)).count() as u64, size: e.len() as u64 };
                    if r.cmp_ratio(&best) == Ordering::Greater {
                        best = r;
                    }
                }
                best
            }
            BlockGraph::CompleteUniform { order, rank } => {
                if !self.has_edges() {
                    return HitRatio::zero();
                }
                let inside = x.range(..*order).count() as u64;
                HitRatio { hits: inside.min(*rank), size: *rank }
            }
        }
    }

    /// Lexicographically least edge inside the vertex set `w` (sorted).
    pub fn least_edge_within(&self, w: &[u64]) -> Option<Vec<u64>> {
        match self {
            BlockGraph::Explicit { hypergraph } => {
                hypergraph.edges.iter().filter(|e| e.iter().all(|v| w.binary_search(v).is_ok())).min().cloned()
            }
            BlockGraph::CompleteUniform { order, rank } => {
                let inside: Vec<u64> = w.iter().copied().filter(|v| v < order).collect();
                (self.has_edges() && inside.len() as u64 >= *rank).then(|| inside[..*rank as usize].to_vec())
            }
        }
    }

    pub fn least_edge(&self) -> Option<Vec<u64>> {
        match self {
            BlockGraph::Explicit { hypergraph } => hypergraph.least_edge().cloned(),
            BlockGraph::CompleteUniform { rank, .. } => self.has_edges().then(|| (0..*rank).collect()),
        }
    }

    /// Explicit form, for graphs small enough to list.
    pub fn to_explicit(&self, max_edges: usize) -> Result<Hypergraph> {
        match self {
            BlockGraph::Explicit { hypergraph } => Ok(hypergraph.clone()),
            BlockGraph::CompleteUniform { order, rank } => {
                let count = binomial(*order, *rank);
                if count.is_none_or(|c| c > max_edges as u128) {
                    return Err(crate::error::Error::TooLarge(format!(
                        "complete {rank}-uniform hypergraph on {order} vertices"
                    )));
                }
                let mut edges = Vec::new();
                let mut cur = Vec::new();
                subsets(0, *order, *rank as usize, &mut cur, &mut edges);
                Ok(Hypergraph { vertices: (0..*order).collect(), edges })
            }
        }
    }
}

fn subsets(from: u64, n: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    let need = (k - cur.len()) as u64;
    let mut v = from;
    while v + need <= n {
        cur.push(v);
        subsets(v + 1, n, k, cur, out);
        cur.pop();
        v += 1;
    }
}

pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restrict_examples() {
        let h = Hypergraph::new(0..4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!(h.restrict(&(0..4).collect()).unwrap(), h);
        let e = h.restrict(&BTreeSet::new()).unwrap();
        assert!(e.vertices.is_empty() && e.edges.is_empty());
        let r = h.restrict(&[1, 2].into_iter().collect()).unwrap();
        assert_eq!(r.edges, vec![vec![1, 2]]);
        assert!(h.restrict(&[9].into_iter().collect()).is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Hypergraph::new(0..3, vec![vec![]]).is_err());
        assert!(Hypergraph::new(0..3, vec![vec![0, 5]]).is_err());
    }

    #[test]
    fn complete_uniform_queries() {
        let g = BlockGraph::CompleteUniform { order: 6, rank: 4 };
        let x: BTreeSet<u64> = [0, 2, 9].into_iter().collect();
        assert_eq!(g.max_hit(&x), HitRatio { hits: 2, size: 4 });
        assert_eq!(g.least_edge_within(&[1, 3, 4, 5]), Some(vec![1, 3, 4, 5]));
        assert_eq!(g.least_edge_within(&[1, 3, 4]), None);
        let h = g.to_explicit(100).unwrap();
        assert_eq!(h.edges.len(), 15);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), Some(10));
        assert_eq!(binomial(20, 10), Some(184756));
        assert_eq!(binomial(3, 5), Some(0));
    }
}
