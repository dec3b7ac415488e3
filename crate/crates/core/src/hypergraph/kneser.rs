use super::graph::{binomial, Hypergraph};
use crate::error::{invalid, Error, Result};

const MAX_VERTICES: u128 = 100_000;
const MAX_EDGES: usize = 5_000_000;

/// `k`-subsets of `[0, m)` in lexicographic order, as bitmasks.
pub fn k_subsets(m: u64, k: u64) -> Vec<u64> {
    let mut out = Vec::new();
    fn go(from: u64, m: u64, left: u64, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        let mut v = from;
        while v + left <= m {
            go(v + 1, m, left - 1, acc | (1 << v), out);
            v += 1;
        }
    }
    go(0, m, k, 0, &mut out);
    out
}

/// `KG^r(m, k)`: vertex `i` is the `i`-th `k`-subset of `[0, m)` in lexicographic order; edges are
/// the `r`-sets of pairwise disjoint `k`-subsets.
pub fn kneser_generate(m: u64, k: u64, r: u64) -> Result<Hypergraph> {
    if r < 2 || k == 0 || r.checked_mul(k).is_none_or(|rk| rk > m) {
        return invalid(format!("infeasible Kneser parameters m={m} k={k} r={r}"));
    }
    if m > 63 || binomial(m, k).is_none_or(|c| c > MAX_VERTICES) {
        return Err(Error::TooLarge(format!("KG^{r}({m},{k}) has too many vertices")));
    }
    let subsets = k_subsets(m, k);
    let mut edges = Vec::new();
    let mut cur = Vec::with_capacity(r as usize);
    fn extend(
        from: usize,
        used: u64,
        r: usize,
        subsets: &[u64],
        cur: &mut Vec<u64>,
        edges: &mut Vec<Vec<u64>>,
    ) -> Result<()> {
        if cur.len() == r {
            if edges.len() >= MAX_EDGES {
                return Err(Error::TooLarge("Kneser hypergraph has too many edges".into()));
            }
            edges.push(cur.clone());
            return Ok(());
        }
        for i in from..subsets.len() {
            if subsets[i] & used == 0 {
                cur.push(i as u64);
                extend(i + 1, used | subsets[i], r, subsets, cur, edges)?;
                cur.pop();
            }
        }
        Ok(())
    }
    extend(0, 0, r as usize, &subsets, &mut cur, &mut edges)?;
    Ok(Hypergraph { vertices: (0..subsets.len() as u64).collect(), edges })
}

/// `⌈(m − r(k−1)) / (r−1)⌉`, floored at 1.
pub fn kneser_lower_bound(m: u64, k: u64, r: u64) -> u64 {
    let num = m as i64 - (r as i64) * (k as i64 - 1);
    let den = r as i64 - 1;
    if num <= 0 {
        return 1;
    }
    ((num + den - 1) / den).max(1) as u64
}
