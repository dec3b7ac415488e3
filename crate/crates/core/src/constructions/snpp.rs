use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::omega::{FinSet, OmegaSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnppDecomposition {
    pub horizon: u64,
    /// enumeration `x_m` of the last chain set below the horizon
    pub points: Vec<u64>,
    pub pieces: Vec<FinSet>,
    pub disjoint: bool,
    /// `⋃ E_m = E ∩ [0, horizon)`
    pub covers: bool,
}

/// `E_m = ({x_m} ∪ (A_m ∖ A_{m+1})) ∩ E` below the horizon, where `x_m` enumerates the last chain
/// set. Points of `E ∖ A_0` are put into `E_0`.
pub fn snpp_decomposition(e: &OmegaSet, chain: &[OmegaSet], horizon: u64) -> Result<SnppDecomposition> {
    if chain.is_empty() {
        return invalid("chain must be nonempty");
    }
    let prefixes: Vec<FinSet> = chain.iter().map(|a| a.prefix(horizon)).collect();
    if let Some(i) = prefixes.windows(2).position(|w| !w[1].is_subset(&w[0])) {
        return invalid(format!("chain is not decreasing at index {}", i + 1));
    }
    let target = e.prefix(horizon);
    let inner = prefixes.last().expect("nonempty");
    let points: Vec<u64> = inner.iter().copied().collect();
    let count = (chain.len() - 1).max(points.len());
    let mut pieces = Vec::with_capacity(count);
    for m in 0..count {
        let mut piece = FinSet::new();
        if let Some(&x) = points.get(m) {
            piece.insert(x);
        }
        if m + 1 < chain.len() {
            piece.extend(prefixes[m].difference(&prefixes[m + 1]).copied());
        }
        if m == 0 {
            piece.extend((0..horizon).filter(|n| !prefixes[0].contains(n)));
        }
        pieces.push(piece.intersection(&target).copied().collect::<FinSet>());
    }
    let mut seen = FinSet::new();
    let mut disjoint = true;
    for p in &pieces {
        disjoint &= seen.is_disjoint(p);
        seen.extend(p.iter().copied());
    }
    let covers = seen == target;
    Ok(SnppDecomposition { horizon, points, pieces, disjoint, covers })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_tails() {
        let chain: Vec<OmegaSet> = (0..=12u64).map(|m| OmegaSet::cofinite(0..m)).collect();
        let d = snpp_decomposition(&OmegaSet::interval(0, 10), &chain, 12).unwrap();
        assert!(d.points.is_empty());
        for m in 0..10u64 {
            assert_eq!(d.pieces[m as usize], [m].into_iter().collect());
        }
        assert!(d.disjoint && d.covers);
    }

    #[test]
    fn empty_set_gives_empty_pieces() {
        let chain = vec![OmegaSet::all(), OmegaSet::program(crate::omega::Formula::Evens)];
        let d = snpp_decomposition(&OmegaSet::empty(), &chain, 50).unwrap();
        assert!(d.pieces.iter().all(|p| p.is_empty()));
        assert!(d.covers);
    }

    #[test]
    fn rejects_increasing_chain() {
        let chain = vec![OmegaSet::finite([1]), OmegaSet::finite([1, 2])];
        assert!(snpp_decomposition(&OmegaSet::all(), &chain, 5).is_err());
    }
}
