use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::omega::FinSet;
use crate::scalar::{serde_scalar, Scalar};

/// Finitely supported measures with pairwise disjoint supports in increasing position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum DensityBlocks<S: Scalar> {
    Explicit {
        blocks: Vec<MeasureBlock<S>>,
    },
    /// block `n` carries `mass(n)` spread uniformly over `layout.support(n)`
    Generated {
        layout: Layout,
        mass: MassFormula<S>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MeasureBlock<S: Scalar> {
    #[serde(with = "serde_scalar::map")]
    pub weights: BTreeMap<u64, S>,
}

/// Interval layouts for generated block streams.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layout {
    /// block `n` is `[2^n, 2^{n+1})`; the point 0 lies in no block
    Dyadic,
    /// block `n` is `{start + n}`
    Singletons {
        #[serde(default)]
        start: u64,
    },
    /// block `n` is `[start + n*length, start + (n+1)*length)`
    Intervals {
        length: u64,
        #[serde(default)]
        start: u64,
    },
}

/// `coeff * n^power * base^n + offset`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MassFormula<S: Scalar> {
    #[serde(with = "serde_scalar")]
    pub coeff: S,
    #[serde(default)]
    pub power: u32,
    #[serde(default = "one_u64")]
    pub base: u64,
    #[serde(with = "serde_scalar", default = "S::zero")]
    pub offset: S,
}

fn one_u64() -> u64 {
    1
}

impl<S: Scalar> MassFormula<S> {
    pub fn constant(c: S) -> Self {
        MassFormula { coeff: S::zero(), power: 0, base: 1, offset: c }
    }

    pub fn new(coeff: S, power: u32, base: u64, offset: S) -> Self {
        MassFormula { coeff, power, base, offset }
    }

    pub fn at(&self, n: u64) -> S {
        if self.coeff.is_zero() {
            return self.offset.clone();
        }
        self.coeff.clone()
            * num_traits::pow(S::from_u64(n), self.power as usize)
            * num_traits::pow(S::from_u64(self.base), n as usize)
            + self.offset.clone()
    }
}

impl Layout {
    pub fn support(&self, n: u64) -> Option<(u64, u64)> {
        match self {
            Layout::Dyadic => {
                if n >= 63 {
                    return None;
                }
                Some((1 << n, 1 << (n + 1)))
            }
            Layout::Singletons { start } => {
                let a = start.checked_add(n)?;
                Some((a, a.checked_add(1)?))
            }
            Layout::Intervals { length, start } => {
                let a = start.checked_add(length.checked_mul(n)?)?;
                Some((a, a.checked_add(*length)?))
            }
        }
    }

    pub fn block_of(&self, x: u64) -> Option<u64> {
        match self {
            Layout::Dyadic => (x > 0).then(|| 63 - x.leading_zeros() as u64),
            Layout::Singletons { start } => x.checked_sub(*start),
            Layout::Intervals { length, start } => x.checked_sub(*start).map(|d| d / length),
        }
    }

    /// Indices of blocks meeting `[lo, hi)`, in order.
    pub fn blocks_meeting(&self, lo: u64, hi: u64) -> std::ops::Range<u64> {
        let first_point = match self {
            Layout::Dyadic => 1,
            Layout::Singletons { start } | Layout::Intervals { start, .. } => *start,
        };
        let lo = lo.max(first_point);
        if lo >= hi {
            return 0..0;
        }
        match (self.block_of(lo), self.block_of(hi - 1)) {
            (Some(a), Some(b)) => a..b + 1,
            _ => 0..0,
        }
    }
}

impl<S: Scalar> DensityBlocks<S> {
    pub fn generated(layout: Layout, mass: MassFormula<S>) -> Self {
        DensityBlocks::Generated { layout, mass }
    }

    pub fn explicit(blocks: Vec<BTreeMap<u64, S>>) -> Result<Self> {
        let d =
            DensityBlocks::Explicit { blocks: blocks.into_iter().map(|weights| MeasureBlock { weights }).collect() };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DensityBlocks::Explicit { blocks } => {
                let mut last: Option<u64> = None;
                for (i, b) in blocks.iter().enumerate() {
                    if b.weights.values().any(|w| !w.is_positive()) {
                        return invalid(format!("block {i} has a non-positive weight"));
                    }
                    if let (Some(l), Some(&first)) = (last, b.weights.keys().next()) {
                        if first <= l {
                            return invalid(format!("block {i} is not after block {}", i - 1));
                        }
                    }
                    if let Some(&m) = b.weights.keys().next_back() {
                        last = Some(m);
                    }
                }
                Ok(())
            }
            DensityBlocks::Generated { layout, mass } => {
                if let Layout::Intervals { length: 0, .. } = layout {
                    return invalid("interval layout needs positive length");
                }
                if mass.coeff.is_negative() || mass.offset.is_negative() {
                    return invalid("block masses must be non-negative");
                }
                Ok(())
            }
        }
    }

    /// Number of blocks, `None` for infinite streams.
    pub fn len(&self) -> Option<usize> {
        match self {
            DensityBlocks::Explicit { blocks } => Some(blocks.len()),
            DensityBlocks::Generated { .. } => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn block_of(&self, x: u64) -> Option<u64> {
        match self {
            DensityBlocks::Explicit { blocks } => {
                blocks.iter().position(|b| b.weights.contains_key(&x)).map(|i| i as u64)
            }
            DensityBlocks::Generated { layout, mass } => {
                let n = layout.block_of(x)?;
                (!mass.at(n).is_zero()).then_some(n)
            }
        }
    }

    /// Weight of point `x` inside block `n` (zero outside the support).
    pub fn weight(&self, n: u64, x: u64) -> S {
        match self {
            DensityBlocks::Explicit { blocks } => {
                blocks.get(n as usize).and_then(|b| b.weights.get(&x).cloned()).unwrap_or_else(S::zero)
            }
            DensityBlocks::Generated { layout, mass } => match layout.support(n) {
                Some((a, b)) if a <= x && x < b => mass.at(n) / S::from_u64(b - a),
                _ => S::zero(),
            },
        }
    }

    /// Support of block `n`; for generated streams an interval, possibly of zero mass.
    pub fn support(&self, n: u64) -> Option<FinSet> {
        match self {
            DensityBlocks::Explicit { blocks } => blocks.get(n as usize).map(|b| b.weights.keys().copied().collect()),
            DensityBlocks::Generated { layout, mass } => {
                if mass.at(n).is_zero() {
                    return Some(FinSet::new());
                }
                layout.support(n).map(|(a, b)| (a..b).collect())
            }
        }
    }

    /// Smallest interval `[lo, hi)` containing the support of block `n`.
    pub fn span(&self, n: u64) -> Option<(u64, u64)> {
        match self {
            DensityBlocks::Explicit { blocks } => {
                let b = blocks.get(n as usize)?;
                match (b.weights.keys().next(), b.weights.keys().next_back()) {
                    (Some(&a), Some(&z)) => Some((a, z + 1)),
                    _ => Some((0, 0)),
                }
            }
            DensityBlocks::Generated { layout, .. } => layout.support(n),
        }
    }

    /// `μₙ(ω)`
    pub fn mass(&self, n: u64) -> S {
        match self {
            DensityBlocks::Explicit { blocks } => {
                blocks.get(n as usize).map(|b| crate::scalar::sum(b.weights.values().cloned())).unwrap_or_else(S::zero)
            }
            DensityBlocks::Generated { mass, .. } => mass.at(n),
        }
    }

    /// `μₙ(F)`
    pub fn measure(&self, n: u64, f: &FinSet) -> S {
        match self {
            DensityBlocks::Explicit { blocks } => match blocks.get(n as usize) {
                Some(b) => f.iter().filter_map(|x| b.weights.get(x).cloned()).fold(S::zero(), |a, w| a + w),
                None => S::zero(),
            },
            DensityBlocks::Generated { layout, mass } => match layout.support(n) {
                Some((a, b)) => {
                    let hits = f.range(a..b).count() as u64;
                    mass.at(n) * S::from_u64(hits) / S::from_u64(b - a)
                }
                None => S::zero(),
            },
        }
    }

    /// Per-block measures of `F`, keyed by block index.
    pub fn split_measures(&self, f: &FinSet) -> BTreeMap<u64, S> {
        let mut out: BTreeMap<u64, S> = BTreeMap::new();
        match self {
            DensityBlocks::Explicit { blocks } => {
                for (i, b) in blocks.iter().enumerate() {
                    let mut acc = S::zero();
                    let mut hit = false;
                    for x in f.iter() {
                        if let Some(w) = b.weights.get(x) {
                            acc = acc + w.clone();
                            hit = true;
                        }
                    }
                    if hit {
                        out.insert(i as u64, acc);
                    }
                }
            }
            DensityBlocks::Generated { layout, .. } => {
                let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
                for &x in f {
                    if let Some(n) = layout.block_of(x) {
                        *counts.entry(n).or_default() += 1;
                    }
                }
                for (n, c) in counts {
                    let (a, b) = layout.support(n).expect("block of a point has a support");
                    out.insert(n, self.mass(n) * S::from_u64(c) / S::from_u64(b - a));
                }
            }
        }
        out
    }

    /// `sup_n μₙ(F)`
    pub fn eval(&self, f: &FinSet) -> S {
        crate::scalar::sup(self.split_measures(f).into_values())
    }

    /// `sup_n μₙ([lo, hi))`
    pub fn eval_interval(&self, lo: u64, hi: u64) -> S {
        match self {
            DensityBlocks::Generated { layout, mass } => {
                let mut best = S::zero();
                for n in layout.blocks_meeting(lo, hi) {
                    if let Some((a, b)) = layout.support(n) {
                        let hits = b.min(hi).saturating_sub(a.max(lo));
                        let v = mass.at(n) * S::from_u64(hits) / S::from_u64(b - a);
                        best = S::max_of(best, v);
                    }
                }
                best
            }
            DensityBlocks::Explicit { .. } => self.eval(&(lo..hi).collect()),
        }
    }

    /// Indices of blocks whose span lies inside `[lo, hi)`.
    pub fn blocks_within(&self, lo: u64, hi: u64) -> Vec<u64> {
        match self {
            DensityBlocks::Explicit { blocks } => (0..blocks.len() as u64)
                .filter(|&n| matches!(self.span(n), Some((a, b)) if a >= lo && b <= hi && a < b))
                .collect(),
            DensityBlocks::Generated { layout, mass } => layout
                .blocks_meeting(lo, hi)
                .filter(|&n| matches!(layout.support(n), Some((a, b)) if a >= lo && b <= hi) && !mass.at(n).is_zero())
                .collect(),
        }
    }
}
