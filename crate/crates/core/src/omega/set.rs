use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type FinSet = BTreeSet<u64>;

/// A subset of ω with exact prefix materialization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OmegaSet {
    Finite { elements: FinSet },
    Cofinite { excluded: FinSet },
    Blocks(BlockStream),
    Program(Formula),
}

/// Pairwise disjoint finite half-open intervals `[a, b)` in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BlockStream {
    Explicit { blocks: Vec<(u64, u64)> },
    Generated { generator: BlockGen },
}

/// Block `k` is `[base^k, base^k + len_mul*k + len_add)` for `k >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockGen {
    pub base: u64,
    #[serde(default)]
    pub len_mul: u64,
    #[serde(default)]
    pub len_add: u64,
}

/// Registered decision procedures for the `program` variant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case")]
pub enum Formula {
    All,
    Empty,
    Evens,
    Odds,
    Residue {
        modulus: u64,
        residue: u64,
    },
    Squares,
    Cubes,
    PowersOfTwo,
    Primes,
    BitSlice {
        bit: u32,
    },
    Interval {
        start: u64,
        end: u64,
    },
    /// `n` is in the set iff `hash(seed, n) mod den < num`.
    Hashed {
        seed: u64,
        num: u64,
        den: u64,
    },
    Complement {
        set: Box<OmegaSet>,
    },
    Union {
        sets: Vec<OmegaSet>,
    },
    Intersection {
        sets: Vec<OmegaSet>,
    },
    Difference {
        left: Box<OmegaSet>,
        right: Box<OmegaSet>,
    },
    Preimage {
        map: MapFormula,
        set: Box<OmegaSet>,
    },
}

/// Total maps ω → ω.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "snake_case")]
pub enum MapFormula {
    Identity,
    /// `n ↦ a*n + b`
    Affine {
        a: u64,
        b: u64,
    },
    /// `n ↦ n / k`
    Div {
        k: u64,
    },
    /// `n ↦ n mod k`
    Mod {
        k: u64,
    },
    /// `n ↦ floor(log2(n + 1))`
    Log2,
    Square,
    /// finitely many explicit values, identity elsewhere
    Table {
        pairs: Vec<(u64, u64)>,
    },
}

impl MapFormula {
    pub fn apply(&self, n: u64) -> u64 {
        match self {
            MapFormula::Identity => n,
            MapFormula::Affine { a, b } => a.saturating_mul(n).saturating_add(*b),
            MapFormula::Div { k } => n / (*k).max(1),
            MapFormula::Mod { k } => n % (*k).max(1),
            MapFormula::Log2 => 63 - (n + 1).leading_zeros() as u64,
            MapFormula::Square => n.saturating_mul(n),
            MapFormula::Table { pairs } => pairs.iter().find(|(x, _)| *x == n).map(|(_, y)| *y).unwrap_or(n),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MapFormula::Affine { a: 0, .. } => invalid("affine map needs a >= 1"),
            MapFormula::Div { k: 0 } | MapFormula::Mod { k: 0 } => invalid("divisor must be positive"),
            _ => Ok(()),
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn icbrt(n: u64) -> u64 {
    let mut r = (n as f64).cbrt() as u64;
    while r.saturating_mul(r).saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

impl BlockGen {
    pub fn block(&self, k: u32) -> Option<(u64, u64)> {
        let start = self.base.checked_pow(k)?;
        let len = self.len_mul.checked_mul(k as u64)?.checked_add(self.len_add)?;
        Some((start, start.checked_add(len)?))
    }
}

impl BlockStream {
    pub fn explicit(blocks: Vec<(u64, u64)>) -> Result<Self> {
        let s = BlockStream::Explicit { blocks };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BlockStream::Explicit { blocks } => {
                let mut last = 0u64;
                for (i, &(a, b)) in blocks.iter().enumerate() {
                    if a > b {
                        return invalid(format!("block {i} has start > end"));
                    }
                    if i > 0 && a < last {
                        return invalid(format!("block {i} overlaps or is out of order"));
                    }
                    last = b;
                }
                Ok(())
            }
            BlockStream::Generated { generator } => {
                if generator.base < 2 {
                    return invalid("block generator base must be >= 2");
                }
                let mut last = 0u64;
                let mut k = 0;
                while let Some((a, b)) = generator.block(k) {
                    if a < last {
                        return invalid(format!("generated block {k} overlaps its predecessor"));
                    }
                    last = b;
                    k += 1;
                }
                Ok(())
            }
        }
    }

    /// Blocks in order, clipped to `[0, n)`, stopping at the first block starting at or after `n`.
    pub fn blocks_below(&self, n: u64) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        match self {
            BlockStream::Explicit { blocks } => {
                for &(a, b) in blocks {
                    if a >= n {
                        break;
                    }
                    out.push((a, b.min(n)));
                }
            }
            BlockStream::Generated { generator } => {
                let mut k = 0;
                while let Some((a, b)) = generator.block(k) {
                    if a >= n {
                        break;
                    }
                    out.push((a, b.min(n)));
                    k += 1;
                }
            }
        }
        out
    }

    fn contains(&self, x: u64) -> bool {
        match self {
            BlockStream::Explicit { blocks } => {
                let i = blocks.partition_point(|&(a, _)| a <= x);
                i > 0 && x < blocks[i - 1].1
            }
            BlockStream::Generated { generator } => {
                let mut k = 0;
                while let Some((a, b)) = generator.block(k) {
                    if a > x {
                        return false;
                    }
                    if x < b {
                        return true;
                    }
                    k += 1;
                }
                false
            }
        }
    }
}

impl Formula {
    pub fn contains(&self, n: u64) -> bool {
        match self {
            Formula::All => true,
            Formula::Empty => false,
            Formula::Evens => n.is_multiple_of(2),
            Formula::Odds => n % 2 == 1,
            Formula::Residue { modulus, residue } => n % (*modulus).max(1) == *residue,
            Formula::Squares => {
                let r = isqrt(n);
                r * r == n
            }
            Formula::Cubes => {
                let r = icbrt(n);
                r * r * r == n
            }
            Formula::PowersOfTwo => n.is_power_of_two(),
            Formula::Primes => is_prime(n),
            Formula::BitSlice { bit } => *bit < 64 && (n >> bit) & 1 == 1,
            Formula::Interval { start, end } => *start <= n && n < *end,
            Formula::Hashed { seed, num, den } => {
                splitmix(seed.wrapping_mul(0x2545_f491_4f6c_dd1d) ^ n) % (*den).max(1) < *num
            }
            Formula::Complement { set } => !set.contains(n),
            Formula::Union { sets } => sets.iter().any(|s| s.contains(n)),
            Formula::Intersection { sets } => sets.iter().all(|s| s.contains(n)),
            Formula::Difference { left, right } => left.contains(n) && !right.contains(n),
            Formula::Preimage { map, set } => set.contains(map.apply(n)),
        }
    }
}

impl OmegaSet {
    pub fn finite<I: IntoIterator<Item = u64>>(it: I) -> Self {
        OmegaSet::Finite { elements: it.into_iter().collect() }
    }

    pub fn cofinite<I: IntoIterator<Item = u64>>(it: I) -> Self {
        OmegaSet::Cofinite { excluded: it.into_iter().collect() }
    }

    pub fn empty() -> Self {
        OmegaSet::finite([])
    }

    pub fn all() -> Self {
        OmegaSet::cofinite([])
    }

    pub fn program(f: Formula) -> Self {
        OmegaSet::Program(f)
    }

    pub fn interval(start: u64, end: u64) -> Self {
        OmegaSet::finite(start..end)
    }

    pub fn complement(&self) -> Self {
        match self {
            OmegaSet::Finite { elements } => OmegaSet::Cofinite { excluded: elements.clone() },
            OmegaSet::Cofinite { excluded } => OmegaSet::Finite { elements: excluded.clone() },
            OmegaSet::Program(Formula::Complement { set }) => (**set).clone(),
            other => OmegaSet::Program(Formula::Complement { set: Box::new(other.clone()) }),
        }
    }

    pub fn intersect(&self, other: &OmegaSet) -> Self {
        match (self, other) {
            (OmegaSet::Finite { elements }, o) | (o, OmegaSet::Finite { elements }) => {
                OmegaSet::finite(elements.iter().copied().filter(|&x| o.contains(x)))
            }
            (OmegaSet::Cofinite { excluded: a }, OmegaSet::Cofinite { excluded: b }) => {
                OmegaSet::cofinite(a.union(b).copied())
            }
            _ => OmegaSet::Program(Formula::Intersection { sets: vec![self.clone(), other.clone()] }),
        }
    }

    pub fn union(&self, other: &OmegaSet) -> Self {
        match (self, other) {
            (OmegaSet::Finite { elements: a }, OmegaSet::Finite { elements: b }) => {
                OmegaSet::finite(a.union(b).copied())
            }
            (OmegaSet::Cofinite { excluded }, o) | (o, OmegaSet::Cofinite { excluded }) => {
                OmegaSet::cofinite(excluded.iter().copied().filter(|&x| !o.contains(x)))
            }
            _ => OmegaSet::Program(Formula::Union { sets: vec![self.clone(), other.clone()] }),
        }
    }

    pub fn minus(&self, other: &OmegaSet) -> Self {
        match (self, other) {
            (OmegaSet::Finite { elements }, o) => {
                OmegaSet::finite(elements.iter().copied().filter(|&x| !o.contains(x)))
            }
            (a, OmegaSet::Finite { .. }) | (a, OmegaSet::Cofinite { .. }) => a.intersect(&other.complement()),
            _ => {
                OmegaSet::Program(Formula::Difference { left: Box::new(self.clone()), right: Box::new(other.clone()) })
            }
        }
    }

    /// `f⁻¹[self]`, computed extensionally when the map is affine and the set is finite or cofinite.
    pub fn preimage(&self, map: &MapFormula) -> Self {
        let affine_inverse = |set: &FinSet, a: u64, b: u64| -> FinSet {
            set.iter().filter(|&&x| x >= b && (x - b).is_multiple_of(a)).map(|&x| (x - b) / a).collect()
        };
        match (self, map) {
            (_, MapFormula::Identity) => self.clone(),
            (OmegaSet::Finite { elements }, MapFormula::Affine { a, b }) if *a > 0 => {
                OmegaSet::Finite { elements: affine_inverse(elements, *a, *b) }
            }
            (OmegaSet::Cofinite { excluded }, MapFormula::Affine { a, b }) if *a > 0 => {
                OmegaSet::Cofinite { excluded: affine_inverse(excluded, *a, *b) }
            }
            _ => OmegaSet::Program(Formula::Preimage { map: map.clone(), set: Box::new(self.clone()) }),
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        match self {
            OmegaSet::Finite { elements } => elements.contains(&n),
            OmegaSet::Cofinite { excluded } => !excluded.contains(&n),
            OmegaSet::Blocks(b) => b.contains(n),
            OmegaSet::Program(f) => f.contains(n),
        }
    }

    /// `A ∩ [0, n)`.
    pub fn prefix(&self, n: u64) -> FinSet {
        self.window(0, n)
    }

    /// `A ∩ [m, n)`.
    pub fn window(&self, m: u64, n: u64) -> FinSet {
        if m >= n {
            return FinSet::new();
        }
        match self {
            OmegaSet::Finite { elements } => elements.range(m..n).copied().collect(),
            OmegaSet::Cofinite { excluded } => (m..n).filter(|x| !excluded.contains(x)).collect(),
            OmegaSet::Blocks(b) => b.blocks_below(n).into_iter().flat_map(|(a, b)| a.max(m)..b).collect(),
            OmegaSet::Program(Formula::Squares) => {
                (isqrt(m.saturating_sub(1))..).map(|r| r * r).skip_while(|&x| x < m).take_while(|&x| x < n).collect()
            }
            OmegaSet::Program(Formula::PowersOfTwo) => {
                (0..64).map(|e| 1u64 << e).filter(|&x| m <= x && x < n).collect()
            }
            OmegaSet::Program(f) => (m..n).filter(|&x| f.contains(x)).collect(),
        }
    }

    /// The first `count` elements that are at least `from`, scanning no further than `limit`.
    pub fn first_elements(&self, from: u64, count: usize, limit: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(count);
        let mut x = from;
        while out.len() < count && x < limit {
            if self.contains(x) {
                out.push(x);
            }
            x += 1;
        }
        out
    }

    pub fn is_finite_variant(&self) -> bool {
        matches!(self, OmegaSet::Finite { .. })
    }

    pub fn as_finite(&self) -> Option<&FinSet> {
        match self {
            OmegaSet::Finite { elements } => Some(elements),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            OmegaSet::Blocks(b) => b.validate(),
            OmegaSet::Program(f) => match f {
                Formula::Residue { modulus: 0, .. } => invalid("modulus must be positive"),
                Formula::Hashed { den: 0, .. } => invalid("hash denominator must be positive"),
                Formula::Complement { set } => set.validate(),
                Formula::Union { sets } | Formula::Intersection { sets } => sets.iter().try_for_each(|s| s.validate()),
                Formula::Difference { left, right } => {
                    left.validate()?;
                    right.validate()
                }
                Formula::Preimage { map, set } => {
                    map.validate()?;
                    set.validate()
                }
                _ => Ok(()),
            },
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_examples() {
        let evens = OmegaSet::program(Formula::Evens);
        assert_eq!(evens.prefix(8), FinSet::from([0, 2, 4, 6]));
        assert_eq!(OmegaSet::cofinite([1, 3]).prefix(5), FinSet::from([0, 2, 4]));
    }

    #[test]
    fn generated_blocks_literal_rule() {
        // [2^k, 2^k + k): block 0 is empty, so 1 is not included
        let a = OmegaSet::Blocks(BlockStream::Generated { generator: BlockGen { base: 2, len_mul: 1, len_add: 0 } });
        assert!(a.validate().is_ok());
        assert_eq!(a.prefix(10), FinSet::from([2, 4, 5, 8, 9]));
        let b = OmegaSet::Blocks(BlockStream::Generated { generator: BlockGen { base: 2, len_mul: 1, len_add: 1 } });
        assert_eq!(b.prefix(10), FinSet::from([1, 2, 3, 4, 5, 6, 8, 9]));
    }

    #[test]
    fn explicit_blocks_reject_overlap() {
        assert!(BlockStream::explicit(vec![(0, 3), (2, 5)]).is_err());
        assert!(BlockStream::explicit(vec![(0, 3), (3, 5)]).is_ok());
    }

    #[test]
    fn squares_window_matches_membership() {
        let sq = OmegaSet::program(Formula::Squares);
        let direct: FinSet = (0..500).filter(|&x| sq.contains(x)).collect();
        assert_eq!(sq.prefix(500), direct);
        assert_eq!(sq.window(17, 50), FinSet::from([25, 36, 49]));
        assert_eq!(sq.window(0, 1), FinSet::from([0]));
    }

    #[test]
    fn affine_preimage_is_extensional() {
        let a = OmegaSet::finite([1, 4, 7, 8]);
        let m = MapFormula::Affine { a: 3, b: 1 };
        assert_eq!(a.preimage(&m), OmegaSet::finite([0, 1, 2]));
        let c = OmegaSet::cofinite([4]);
        assert_eq!(c.preimage(&m), OmegaSet::cofinite([1]));
    }

    #[test]
    fn json_forms() {
        let s = OmegaSet::program(Formula::Residue { modulus: 4, residue: 1 });
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"kind":"program","name":"residue","params":{"modulus":4,"residue":1}}"#);
        let back: OmegaSet = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
        let e: OmegaSet = serde_json::from_str(r#"{"kind":"program","name":"evens"}"#).unwrap();
        assert!(e.contains(6));
        let b: OmegaSet = serde_json::from_str(r#"{"kind":"blocks","blocks":[[1,3],[5,6]]}"#).unwrap();
        assert_eq!(b.prefix(10), FinSet::from([1, 2, 5]));
        let f: OmegaSet = serde_json::from_str(r#"{"kind":"finite","elements":[3,1]}"#).unwrap();
        assert_eq!(f, OmegaSet::finite([1, 3]));
    }

    #[test]
    fn log2_map() {
        let m = MapFormula::Log2;
        assert_eq!((0..8).map(|n| m.apply(n)).collect::<Vec<_>>(), vec![0, 1, 1, 2, 2, 2, 2, 3]);
    }
}
