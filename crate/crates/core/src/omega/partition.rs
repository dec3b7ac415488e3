use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Total labeling rule ω → cell index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Labeling {
    /// `n mod modulus`
    Modulo { modulus: u64 },
    /// number of cuts `<= n`
    Threshold { cuts: Vec<u64> },
    /// explicit labels for `n < labels.len()`, `default` beyond
    Table { labels: Vec<usize>, default: usize },
}

impl Labeling {
    pub fn label(&self, n: u64) -> usize {
        match self {
            Labeling::Modulo { modulus } => (n % modulus) as usize,
            Labeling::Threshold { cuts } => cuts.iter().filter(|&&c| c <= n).count(),
            Labeling::Table { labels, default } => labels.get(n as usize).copied().unwrap_or(*default),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitePartition {
    pub level: usize,
    pub cells: usize,
    pub labeling: Labeling,
}

impl FinitePartition {
    pub fn label(&self, n: u64) -> usize {
        self.labeling.label(n)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CustomLevel {
    pub cells: usize,
    pub labeling: Labeling,
    /// child cell index → parent cell index; ignored at level 0
    #[serde(default)]
    pub parent: Vec<usize>,
}

/// A sequence of finite partitions, each refining the previous one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PartitionScheme {
    /// level ℓ labels `n mod base^ℓ`
    Residue {
        #[serde(default = "default_base")]
        base: u64,
    },
    Trivial,
    Custom {
        levels: Vec<CustomLevel>,
    },
}

fn default_base() -> u64 {
    2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum RefinementVerdict {
    Verified,
    Falsified { n: u64, level: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Chain {
    pub cells: Vec<usize>,
}

impl PartitionScheme {
    pub fn residue() -> Self {
        PartitionScheme::Residue { base: 2 }
    }

    /// Number of levels available, `None` when unbounded in practice.
    pub fn depth(&self) -> Option<usize> {
        match self {
            PartitionScheme::Residue { base } => {
                let mut l = 0;
                let mut m: u64 = 1;
                while let Some(next) = m.checked_mul(*base) {
                    if next > (1 << 40) {
                        break;
                    }
                    m = next;
                    l += 1;
                }
                Some(l + 1)
            }
            PartitionScheme::Trivial => None,
            PartitionScheme::Custom { levels } => Some(levels.len()),
        }
    }

    fn check_level(&self, level: usize) -> Result<()> {
        match self.depth() {
            Some(d) if level >= d => invalid(format!("scheme has no level {level}")),
            _ => Ok(()),
        }
    }

    pub fn level(&self, level: usize) -> Result<FinitePartition> {
        self.check_level(level)?;
        Ok(match self {
            PartitionScheme::Residue { base } => {
                let modulus = base.pow(level as u32);
                FinitePartition { level, cells: modulus as usize, labeling: Labeling::Modulo { modulus } }
            }
            PartitionScheme::Trivial => FinitePartition { level, cells: 1, labeling: Labeling::Modulo { modulus: 1 } },
            PartitionScheme::Custom { levels } => {
                FinitePartition { level, cells: levels[level].cells, labeling: levels[level].labeling.clone() }
            }
        })
    }

    pub fn cells(&self, level: usize) -> Result<usize> {
        Ok(self.level(level)?.cells)
    }

    pub fn label(&self, level: usize, n: u64) -> Result<usize> {
        Ok(self.level(level)?.label(n))
    }

    /// Parent (at `level - 1`) of cell `child` at `level >= 1`.
    pub fn parent(&self, level: usize, child: usize) -> Result<usize> {
        if level == 0 {
            return invalid("level 0 has no parent");
        }
        self.check_level(level)?;
        match self {
            PartitionScheme::Residue { base } => Ok(child % base.pow(level as u32 - 1) as usize),
            PartitionScheme::Trivial => Ok(0),
            PartitionScheme::Custom { levels } => match levels[level].parent.get(child) {
                Some(&p) => Ok(p),
                None => invalid(format!("parent map of level {level} misses cell {child}")),
            },
        }
    }

    pub fn children(&self, level: usize, cell: usize) -> Result<Vec<usize>> {
        let cells = self.cells(level + 1)?;
        let mut out = Vec::new();
        for c in 0..cells {
            if self.parent(level + 1, c)? == cell {
                out.push(c);
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        if let PartitionScheme::Residue { base } = self {
            if *base < 2 {
                return invalid("residue base must be >= 2");
            }
        }
        if let PartitionScheme::Custom { levels } = self {
            if levels.is_empty() {
                return invalid("custom scheme needs at least one level");
            }
            for (l, lv) in levels.iter().enumerate() {
                if lv.cells == 0 {
                    return invalid(format!("level {l} has no cells"));
                }
                if let Labeling::Modulo { modulus } = lv.labeling {
                    if modulus == 0 || modulus as usize > lv.cells {
                        return invalid(format!("level {l} modulus does not fit its cell count"));
                    }
                }
                if l > 0 && lv.parent.len() != lv.cells {
                    return invalid(format!("level {l} parent map has wrong length"));
                }
                if l > 0 && lv.parent.iter().any(|&p| p >= levels[l - 1].cells) {
                    return invalid(format!("level {l} parent map points outside level {}", l - 1));
                }
            }
        }
        Ok(())
    }

    /// Checks `parent(label_{ℓ+1}(n)) = label_ℓ(n)` for `n < horizon` and `ℓ + 1 < max_level`.
    pub fn refinement_check(&self, max_level: usize, horizon: u64) -> Result<RefinementVerdict> {
        if max_level == 0 {
            return invalid("max_level must be >= 1");
        }
        for level in 0..max_level.saturating_sub(1) {
            let coarse = self.level(level)?;
            let fine = self.level(level + 1)?;
            for n in 0..horizon {
                let child = fine.label(n);
                if child >= fine.cells || coarse.label(n) >= coarse.cells {
                    return Ok(RefinementVerdict::Falsified { n, level });
                }
                if self.parent(level + 1, child)? != coarse.label(n) {
                    return Ok(RefinementVerdict::Falsified { n, level });
                }
            }
        }
        Ok(RefinementVerdict::Verified)
    }

    /// One chain per cell of level `depth - 1`, in cell order.
    pub fn chain_enumerate(&self, depth: usize) -> Result<Vec<Chain>> {
        if depth == 0 {
            return invalid("depth must be >= 1");
        }
        let last = depth - 1;
        let mut chains = Vec::new();
        for c in 0..self.cells(last)? {
            let mut cells = vec![c];
            let mut cur = c;
            for l in (1..=last).rev() {
                cur = self.parent(l, cur)?;
                cells.push(cur);
            }
            cells.reverse();
            chains.push(Chain { cells });
        }
        Ok(chains)
    }

    pub fn in_cell(&self, level: usize, cell: usize, n: u64) -> Result<bool> {
        Ok(self.label(level, n)? == cell)
    }
}

impl Chain {
    /// Each entry is the parent of the next one.
    pub fn is_valid(&self, scheme: &PartitionScheme) -> bool {
        self.cells.windows(2).enumerate().all(|(l, w)| scheme.parent(l + 1, w[1]).map(|p| p == w[0]).unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ignoring_scheme() -> PartitionScheme {
        PartitionScheme::Custom {
            levels: vec![
                CustomLevel { cells: 2, labeling: Labeling::Modulo { modulus: 2 }, parent: vec![] },
                CustomLevel { cells: 2, labeling: Labeling::Threshold { cuts: vec![5] }, parent: vec![0, 1] },
            ],
        }
    }

    #[test]
    fn residue_refines() {
        let s = PartitionScheme::residue();
        assert_eq!(s.refinement_check(4, 100).unwrap(), RefinementVerdict::Verified);
    }

    #[test]
    fn ignoring_labels_falsify() {
        let s = ignoring_scheme();
        assert!(s.validate().is_ok());
        assert_eq!(s.refinement_check(2, 10).unwrap(), RefinementVerdict::Falsified { n: 1, level: 0 });
        assert_eq!(s.refinement_check(1, 10).unwrap(), RefinementVerdict::Verified);
    }

    #[test]
    fn chain_counts() {
        let r = PartitionScheme::residue();
        assert_eq!(r.chain_enumerate(2).unwrap().len(), 2);
        assert_eq!(r.chain_enumerate(3).unwrap().len(), 4);
        assert_eq!(PartitionScheme::Trivial.chain_enumerate(5).unwrap().len(), 1);
        for c in r.chain_enumerate(4).unwrap() {
            assert!(c.is_valid(&r));
        }
    }

    #[test]
    fn residue_children() {
        let r = PartitionScheme::residue();
        assert_eq!(r.children(1, 1).unwrap(), vec![1, 3]);
        assert_eq!(r.children(0, 0).unwrap(), vec![0, 1]);
    }

    #[test]
    fn custom_level_out_of_range() {
        assert!(ignoring_scheme().level(2).is_err());
    }
}
