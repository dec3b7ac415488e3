//! Lower semicontinuous submeasures on ω, evaluated exactly on finite sets.

mod axioms;
mod certificate;
mod density;
mod lp;
mod trace;
mod weight;

use std::fmt;
use std::sync::{Arc, RwLock};

use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize};

pub use axioms::{check_axioms, AxiomKind, AxiomReport, AxiomViolation};
pub use certificate::{
    default_schedule, exh_certificate, membership, unbounded_witness, BlockBound, CertificateKind,
    MembershipCertificate, Observation, WitnessOutcome,
};
pub use density::{DensityBlocks, Layout, MassFormula, MeasureBlock};
pub use lp::{nonpath_gap, NonpathReport, MAX_NONPATH_SIZE};
pub use trace::{cylinder_measure, length_lex_index, length_lex_string, minimal_strings, trace_eval};
pub use weight::{WeightFn, WeightFormula};

use crate::error::{invalid, Result};
use crate::hypergraph::HypergraphSubmeasure;
use crate::omega::{FinSet, OmegaSet};
use crate::scalar::{serde_scalar, Scalar};

/// Largest domain accepted by the `table` family.
pub const MAX_TABLE_DOMAIN: usize = 20;

/// Memoized prefix sums `S(j) = Σ_{i<j} f(i)`; `v[j] = S(j)`.
#[derive(Clone)]
pub struct PrefixCache<S>(Arc<RwLock<Vec<S>>>);

impl<S> Default for PrefixCache<S> {
    fn default() -> Self {
        PrefixCache(Arc::new(RwLock::new(Vec::new())))
    }
}

impl<S> fmt::Debug for PrefixCache<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let len = self.0.read().map(|v| v.len()).unwrap_or(0);
        write!(f, "PrefixCache({len})")
    }
}

impl<S: Scalar> PrefixCache<S> {
    /// Runs `body` on a table holding at least `S(0..=upto)`.
    fn with<R>(&self, f: &WeightFn<S>, upto: u64, body: impl FnOnce(&[S]) -> R) -> R {
        let need = upto as usize + 1;
        {
            let v = self.0.read().expect("prefix cache lock");
            if v.len() >= need {
                return body(&v);
            }
        }
        let mut v = self.0.write().expect("prefix cache lock");
        if v.is_empty() {
            v.push(S::zero());
        }
        while v.len() < need {
            let j = v.len() as u64;
            let next = v[j as usize - 1].clone() + f.weight(j - 1);
            v.push(next);
        }
        body(&v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureTag {
    Generic,
    Summable,
    Density,
    GeneralizedDensity,
    AsymptoticDensity,
    ErdosUlam,
    TraceNull,
    Hypergraph,
}

/// Submeasure descriptors; values on infinite sets are horizon suprema of `eval_finite`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", bound = "")]
pub enum Submeasure<S: Scalar = BigRational> {
    Zero,
    /// `μ_f(F) = Σ_{n∈F} f(n)`
    Summable {
        f: WeightFn<S>,
    },
    /// `sup_n μₙ(F)`
    Density {
        #[serde(deserialize_with = "density_blocks_json")]
        blocks: DensityBlocks<S>,
    },
    /// `sup_n |F ∩ [2ⁿ, 2ⁿ⁺¹)| / 2ⁿ`
    AsymptoticDensity,
    /// `sup_n φₙ(F ∩ Iₙ)` with `Iₙ = [boundaries[n], boundaries[n+1])`; the points from the last
    /// boundary on are singleton domains carrying the zero submeasure
    GeneralizedDensity {
        boundaries: Vec<u64>,
        components: Vec<Submeasure<S>>,
    },
    /// `sup_n Σ_{i∈F∩[0,n)} f(i) / Σ_{i<n} f(i)`
    ErdosUlam {
        f: WeightFn<S>,
        #[serde(skip)]
        cache: PrefixCache<S>,
    },
    /// Lebesgue measure of the union of cylinders `[s]` over the strings coded by `F`
    /// in length-lexicographic order
    TraceNull,
    Hypergraph(HypergraphSubmeasure),
    /// explicit values on the subsets of a small domain, indexed by bitmask over `domain`
    Table {
        domain: Vec<u64>,
        #[serde(with = "serde_scalar::vec")]
        values: Vec<S>,
    },
    /// `factor · inner`
    Scaled {
        inner: Box<Submeasure<S>>,
        #[serde(with = "serde_scalar")]
        factor: S,
    },
}

/// Accepts either a tagged block stream or a bare list of weight maps.
fn density_blocks_json<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> std::result::Result<DensityBlocks<S>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged, bound = "")]
    enum Either<S: Scalar> {
        Stream(DensityBlocks<S>),
        List(Vec<MeasureBlockJson<S>>),
    }
    #[derive(Deserialize)]
    #[serde(bound = "")]
    struct MeasureBlockJson<S: Scalar>(#[serde(with = "serde_scalar::map")] std::collections::BTreeMap<u64, S>);
    match Either::<S>::deserialize(d)? {
        Either::Stream(s) => Ok(s),
        Either::List(list) => {
            Ok(DensityBlocks::Explicit { blocks: list.into_iter().map(|b| MeasureBlock { weights: b.0 }).collect() })
        }
    }
}

impl<S: Scalar> Submeasure<S> {
    pub fn summable(f: WeightFn<S>) -> Self {
        Submeasure::Summable { f }
    }

    pub fn erdos_ulam(f: WeightFn<S>) -> Self {
        Submeasure::ErdosUlam { f, cache: PrefixCache::default() }
    }

    pub fn density(blocks: DensityBlocks<S>) -> Self {
        Submeasure::Density { blocks }
    }

    pub fn hypergraph(blocks: crate::hypergraph::HyperBlocks) -> Self {
        Submeasure::Hypergraph(HypergraphSubmeasure::new(blocks))
    }

    pub fn table(domain: Vec<u64>, values: Vec<S>) -> Result<Self> {
        let t = Submeasure::Table { domain, values };
        t.validate()?;
        Ok(t)
    }

    pub fn scaled(inner: Submeasure<S>, factor: S) -> Self {
        Submeasure::Scaled { inner: Box::new(inner), factor }
    }

    /// The density submeasure whose exhaustive ideal is Fin: every point is its own block of mass 1.
    pub fn fin() -> Self {
        Submeasure::density(DensityBlocks::generated(Layout::Singletons { start: 0 }, MassFormula::constant(S::one())))
    }

    /// Parses and validates a JSON descriptor.
    pub fn from_json(value: serde_json::Value) -> Result<Self> {
        let s: Submeasure<S> = serde_json::from_value(value)
            .map_err(|e| crate::error::Error::InvalidInput(format!("submeasure descriptor: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn structure_tag(&self) -> StructureTag {
        match self {
            Submeasure::Zero | Submeasure::Table { .. } => StructureTag::Generic,
            Submeasure::Summable { .. } => StructureTag::Summable,
            Submeasure::Density { .. } => StructureTag::Density,
            Submeasure::AsymptoticDensity => StructureTag::AsymptoticDensity,
            Submeasure::GeneralizedDensity { .. } => StructureTag::GeneralizedDensity,
            Submeasure::ErdosUlam { .. } => StructureTag::ErdosUlam,
            Submeasure::TraceNull => StructureTag::TraceNull,
            Submeasure::Hypergraph(_) => StructureTag::Hypergraph,
            Submeasure::Scaled { inner, .. } => inner.structure_tag(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Submeasure::Zero | Submeasure::AsymptoticDensity | Submeasure::TraceNull => Ok(()),
            Submeasure::Summable { f } => f.validate_nonnegative(),
            Submeasure::Density { blocks } => blocks.validate(),
            Submeasure::ErdosUlam { f, .. } => {
                if f.is_positive() {
                    Ok(())
                } else {
                    invalid("Erdős–Ulam weights must be a positive formula")
                }
            }
            Submeasure::GeneralizedDensity { boundaries, components } => {
                if boundaries.first() != Some(&0) {
                    return invalid("generalized density domains must start at 0");
                }
                if boundaries.windows(2).any(|w| w[0] >= w[1]) {
                    return invalid("domain boundaries must be strictly increasing");
                }
                if components.len() + 1 != boundaries.len() {
                    return invalid("need one component per domain");
                }
                components.iter().try_for_each(|c| c.validate())
            }
            Submeasure::Hypergraph(h) => h.blocks.validate(),
            Submeasure::Table { domain, values } => {
                if domain.len() > MAX_TABLE_DOMAIN {
                    return invalid(format!("table domain exceeds {MAX_TABLE_DOMAIN} points"));
                }
                if domain.windows(2).any(|w| w[0] >= w[1]) {
                    return invalid("table domain must be strictly increasing");
                }
                if values.len() != 1 << domain.len() {
                    return invalid("table needs one value per subset of the domain");
                }
                if !values[0].is_zero() {
                    return invalid("table value of the empty set must be 0");
                }
                if values.iter().any(|v| v.is_negative()) {
                    return invalid("table values must be non-negative");
                }
                Ok(())
            }
            Submeasure::Scaled { inner, factor } => {
                if factor.is_negative() {
                    return invalid("scale factor must be non-negative");
                }
                inner.validate()
            }
        }
    }

    fn asymptotic_blocks() -> DensityBlocks<S> {
        DensityBlocks::generated(Layout::Dyadic, MassFormula::constant(S::one()))
    }

    /// Exact value on a finite set.
    pub fn eval_finite(&self, f: &FinSet) -> S {
        match self {
            Submeasure::Zero => S::zero(),
            Submeasure::Summable { f: w } => f.iter().fold(S::zero(), |a, &n| a + w.weight(n)),
            Submeasure::Density { blocks } => blocks.eval(f),
            Submeasure::AsymptoticDensity => Self::asymptotic_blocks().eval(f),
            Submeasure::GeneralizedDensity { boundaries, components } => {
                let mut best = S::zero();
                for (i, c) in components.iter().enumerate() {
                    let part: FinSet = f.range(boundaries[i]..boundaries[i + 1]).copied().collect();
                    if !part.is_empty() {
                        best = S::max_of(best, c.eval_finite(&part));
                    }
                }
                best
            }
            Submeasure::ErdosUlam { f: w, cache } => {
                let Some(&last) = f.last() else { return S::zero() };
                cache.with(w, last + 1, |sums| {
                    let mut acc = S::zero();
                    let mut best = S::zero();
                    for &x in f {
                        acc = acc + w.weight(x);
                        best = S::max_of(best, acc.clone() / sums[x as usize + 1].clone());
                    }
                    best
                })
            }
            Submeasure::TraceNull => trace_eval(f),
            Submeasure::Hypergraph(h) => h.eval(f),
            Submeasure::Table { domain, values } => {
                let mask =
                    domain.iter().enumerate().filter(|(_, x)| f.contains(x)).fold(0usize, |m, (i, _)| m | 1 << i);
                values[mask].clone()
            }
            Submeasure::Scaled { inner, factor } => factor.clone() * inner.eval_finite(f),
        }
    }

    /// `φ(A ∩ [0, n))`
    pub fn eval_prefix(&self, a: &OmegaSet, n: u64) -> S {
        self.eval_finite(&a.prefix(n))
    }

    /// `φ((A ∩ [0, n)) ∖ [0, m))`
    pub fn core_estimate(&self, a: &OmegaSet, m: u64, n: u64) -> Result<S> {
        if m > n {
            return invalid(format!("core estimate needs m ≤ n, got m={m} n={n}"));
        }
        Ok(self.eval_finite(&a.window(m, n)))
    }

    /// `φ([lo, hi))`, with closed forms where the family allows.
    pub fn eval_interval(&self, lo: u64, hi: u64) -> S {
        if lo >= hi {
            return S::zero();
        }
        match self {
            Submeasure::Zero => S::zero(),
            Submeasure::Summable { f } => f.partial_sum(hi) - f.partial_sum(lo),
            Submeasure::Density { blocks } => blocks.eval_interval(lo, hi),
            Submeasure::AsymptoticDensity => Self::asymptotic_blocks().eval_interval(lo, hi),
            Submeasure::ErdosUlam { f, cache } => cache.with(f, hi, |sums| {
                let total = sums[hi as usize].clone();
                (total.clone() - sums[lo as usize].clone()) / total
            }),
            Submeasure::Scaled { inner, factor } => factor.clone() * inner.eval_interval(lo, hi),
            _ => self.eval_finite(&(lo..hi).collect()),
        }
    }

    /// Whether tail lower bounds from whole blocks are available.
    pub fn is_block_structured(&self) -> bool {
        match self {
            Submeasure::Density { .. }
            | Submeasure::AsymptoticDensity
            | Submeasure::GeneralizedDensity { .. }
            | Submeasure::Hypergraph(_) => true,
            Submeasure::Scaled { inner, .. } => inner.is_block_structured(),
            _ => false,
        }
    }

    /// Best lower bound `φ(A ∩ block)` over the blocks lying inside `[m, n)`.
    ///
    /// `None` for families without block structure; `Some(None)` when no block fits.
    pub fn tail_block_bound(&self, a: &OmegaSet, m: u64, n: u64) -> Option<Option<BlockBound<S>>> {
        let candidates: Vec<(u64, (u64, u64))> = match self {
            Submeasure::Density { blocks } => {
                blocks.blocks_within(m, n).into_iter().filter_map(|b| blocks.span(b).map(|s| (b, s))).collect()
            }
            Submeasure::AsymptoticDensity => {
                let blocks = Self::asymptotic_blocks();
                blocks.blocks_within(m, n).into_iter().filter_map(|b| blocks.span(b).map(|s| (b, s))).collect()
            }
            Submeasure::GeneralizedDensity { boundaries, .. } => boundaries
                .windows(2)
                .enumerate()
                .filter(|(_, w)| w[0] >= m && w[1] <= n)
                .map(|(i, w)| (i as u64, (w[0], w[1])))
                .collect(),
            Submeasure::Hypergraph(h) => h
                .blocks_within(m, n)
                .into_iter()
                .map(|b| (b, h.blocks.block(b).expect("listed block").ground.span()))
                .collect(),
            Submeasure::Scaled { inner, factor } => {
                return inner.tail_block_bound(a, m, n).map(|o| {
                    o.map(|mut b| {
                        b.value = factor.clone() * b.value;
                        b
                    })
                })
            }
            _ => return None,
        };
        let mut best: Option<BlockBound<S>> = None;
        for (block, (lo, hi)) in candidates {
            let set = a.window(lo, hi);
            let value = self.eval_finite(&set);
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(BlockBound { m, n, block, set, value });
            }
        }
        Some(best)
    }
}
