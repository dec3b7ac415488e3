use std::collections::BTreeMap;

use super::graph::Hypergraph;
use crate::error::{invalid, Error, Result};

pub const MAX_CHROMATIC_VERTICES: usize = 20;

struct Search {
    n: usize,
    alpha: usize,
    closing: Vec<Vec<u32>>,
    class_mask: Vec<u32>,
    class_size: Vec<usize>,
    color: Vec<usize>,
}

impl Search {
    fn run(&mut self, p: usize, used: usize, limit: usize) -> bool {
        if p == self.n {
            return true;
        }
        let spare: usize =
            self.class_size[..used].iter().map(|s| self.alpha - s).sum::<usize>() + (limit - used) * self.alpha;
        if self.n - p > spare {
            return false;
        }
        // a fresh colour is only ever the next unused one
        for c in 0..(used + 1).min(limit) {
            let mask = self.class_mask[c];
            if self.closing[p].iter().any(|&e| e & !(1 << p) & !mask == 0) {
                continue;
            }
            self.class_mask[c] |= 1 << p;
            self.class_size[c] += 1;
            self.color[p] = c;
            if self.run(p + 1, used.max(c + 1), limit) {
                return true;
            }
            self.class_mask[c] &= !(1 << p);
            self.class_size[c] -= 1;
        }
        false
    }
}

/// Largest independent set size, by a table over all vertex subsets.
fn independence_number(n: usize, by_vertex: &[Vec<u32>]) -> usize {
    let mut indep = vec![false; 1 << n];
    indep[0] = true;
    let mut alpha = 0;
    for s in 1u32..(1 << n) {
        let v = s.trailing_zeros() as usize;
        let ok = indep[(s & (s - 1)) as usize] && by_vertex[v].iter().all(|&e| e & !s != 0);
        indep[s as usize] = ok;
        if ok {
            alpha = alpha.max(s.count_ones() as usize);
        }
    }
    alpha
}

/// Exact chromatic number with an optimal colouring (vertex → class index).
pub fn chromatic_with_coloring(h: &Hypergraph) -> Result<(u64, BTreeMap<u64, usize>)> {
    let n = h.vertices.len();
    if n > MAX_CHROMATIC_VERTICES {
        return Err(Error::TooLarge(format!("{n} vertices exceed the exact-colouring cap")));
    }
    if n == 0 {
        return Ok((0, BTreeMap::new()));
    }
    if h.edges.iter().any(|e| e.len() == 1) {
        return invalid("a singleton edge admits no proper colouring");
    }
    let index: BTreeMap<u64, usize> = h.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut degree = vec![0usize; n];
    for e in &h.edges {
        for v in e {
            degree[index[v]] += 1;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(a.cmp(&b)));
    let mut pos = vec![0usize; n];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    let mut masks: Vec<u32> = h.edges.iter().map(|e| e.iter().fold(0u32, |m, v| m | 1 << pos[index[v]])).collect();
    masks.sort_unstable();
    masks.dedup();
    let mut closing = vec![Vec::new(); n];
    let mut by_vertex = vec![Vec::new(); n];
    for &m in &masks {
        closing[31 - m.leading_zeros() as usize].push(m);
        by_vertex[m.trailing_zeros() as usize].push(m);
    }
    let alpha = independence_number(n, &by_vertex);
    let mut search = Search { n, alpha, closing, class_mask: vec![0; n], class_size: vec![0; n], color: vec![0; n] };
    let start = n.div_ceil(alpha).max(1);
    for limit in start..=n {
        search.class_mask.iter_mut().for_each(|m| *m = 0);
        search.class_size.iter_mut().for_each(|s| *s = 0);
        if search.run(0, 0, limit) {
            let coloring = h.vertices.iter().enumerate().map(|(i, &v)| (v, search.color[pos[i]])).collect();
            return Ok((limit as u64, coloring));
        }
    }
    unreachable!("n colours always suffice without singleton edges")
}

pub fn chromatic_exact(h: &Hypergraph) -> Result<u64> {
    chromatic_with_coloring(h).map(|(c, _)| c)
}

/// No edge lies inside one colour class.
pub fn is_proper(h: &Hypergraph, coloring: &BTreeMap<u64, usize>) -> bool {
    h.edges.iter().all(|e| {
        let c = coloring.get(&e[0]);
        c.is_some() && e.iter().any(|v| coloring.get(v) != c)
    })
}
