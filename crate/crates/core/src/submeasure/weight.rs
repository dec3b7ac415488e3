use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::{serde_scalar, Scalar};

/// A stream of rational weights `n ↦ f(n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum WeightFn<S: Scalar> {
    Formula(WeightFormula<S>),
    /// `values[n]`, zero beyond the list
    Explicit {
        #[serde(with = "serde_scalar::vec")]
        values: Vec<S>,
    },
    /// finitely many nonzero entries
    Sparse {
        #[serde(with = "serde_scalar::map")]
        entries: BTreeMap<u64, S>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", bound = "")]
pub enum WeightFormula<S: Scalar> {
    /// `1/(n+1)`
    Reciprocal,
    Constant {
        #[serde(with = "serde_scalar")]
        value: S,
    },
    /// `scale * ratio^n`
    Geometric {
        #[serde(with = "serde_scalar")]
        scale: S,
        #[serde(with = "serde_scalar")]
        ratio: S,
    },
    /// `n^power`
    Power { power: u32 },
}

impl<S: Scalar> WeightFn<S> {
    pub fn reciprocal() -> Self {
        WeightFn::Formula(WeightFormula::Reciprocal)
    }

    pub fn constant(value: S) -> Self {
        WeightFn::Formula(WeightFormula::Constant { value })
    }

    pub fn counting() -> Self {
        Self::constant(S::one())
    }

    pub fn geometric(scale: S, ratio: S) -> Self {
        WeightFn::Formula(WeightFormula::Geometric { scale, ratio })
    }

    pub fn power(power: u32) -> Self {
        WeightFn::Formula(WeightFormula::Power { power })
    }

    pub fn weight(&self, n: u64) -> S {
        match self {
            WeightFn::Formula(f) => match f {
                WeightFormula::Reciprocal => S::one() / S::from_u64(n + 1),
                WeightFormula::Constant { value } => value.clone(),
                WeightFormula::Geometric { scale, ratio } => scale.clone() * num_traits::pow(ratio.clone(), n as usize),
                WeightFormula::Power { power } => num_traits::pow(S::from_u64(n), *power as usize),
            },
            WeightFn::Explicit { values } => values.get(n as usize).cloned().unwrap_or_else(S::zero),
            WeightFn::Sparse { entries } => entries.get(&n).cloned().unwrap_or_else(S::zero),
        }
    }

    /// `Σ_{i<n} f(i)`
    pub fn partial_sum(&self, n: u64) -> S {
        if let WeightFn::Formula(WeightFormula::Constant { value }) = self {
            return value.clone() * S::from_u64(n);
        }
        if let WeightFn::Sparse { entries } = self {
            return entries.range(..n).fold(S::zero(), |a, (_, w)| a + w.clone());
        }
        (0..n).fold(S::zero(), |a, i| a + self.weight(i))
    }

    /// Exact `Σ_{i ≥ n} |f(i)|` when available.
    pub fn tail_abs(&self, n: u64) -> Option<S> {
        match self {
            WeightFn::Formula(WeightFormula::Geometric { scale, ratio }) => {
                let r = ratio.abs();
                if r >= S::one() {
                    return if scale.is_zero() { Some(S::zero()) } else { None };
                }
                Some(scale.abs() * num_traits::pow(r.clone(), n as usize) / (S::one() - r))
            }
            WeightFn::Formula(WeightFormula::Constant { value }) if value.is_zero() => Some(S::zero()),
            WeightFn::Formula(_) => None,
            WeightFn::Explicit { values } => Some(values.iter().skip(n as usize).fold(S::zero(), |a, w| a + w.abs())),
            WeightFn::Sparse { entries } => Some(entries.range(n..).fold(S::zero(), |a, (_, w)| a + w.abs())),
        }
    }

    /// `Σ_n |f(n)|` when certified finite.
    pub fn total_abs(&self) -> Option<S> {
        self.tail_abs(0)
    }

    /// `Σ_n f(n)` when certified finite.
    pub fn total(&self) -> Option<S> {
        match self {
            WeightFn::Formula(WeightFormula::Geometric { scale, ratio }) => {
                self.tail_abs(0)?;
                Some(scale.clone() / (S::one() - ratio.clone()))
            }
            WeightFn::Formula(WeightFormula::Constant { value }) if value.is_zero() => Some(S::zero()),
            WeightFn::Formula(_) => None,
            WeightFn::Explicit { values } => Some(crate::scalar::sum(values.iter().cloned())),
            WeightFn::Sparse { entries } => Some(crate::scalar::sum(entries.values().cloned())),
        }
    }

    /// Largest index with a nonzero weight, for weights of finite support.
    pub fn support_bound(&self) -> Option<u64> {
        match self {
            WeightFn::Explicit { values } => Some(values.len() as u64),
            WeightFn::Sparse { entries } => Some(entries.keys().next_back().map_or(0, |&k| k + 1)),
            WeightFn::Formula(WeightFormula::Constant { value }) if value.is_zero() => Some(0),
            _ => None,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match self {
            WeightFn::Formula(f) => match f {
                WeightFormula::Reciprocal | WeightFormula::Power { .. } => true,
                WeightFormula::Constant { value } => !value.is_negative(),
                WeightFormula::Geometric { scale, ratio } => {
                    scale.is_zero() || (!scale.is_negative() && !ratio.is_negative())
                }
            },
            WeightFn::Explicit { values } => values.iter().all(|w| !w.is_negative()),
            WeightFn::Sparse { entries } => entries.values().all(|w| !w.is_negative()),
        }
    }

    pub fn validate_nonnegative(&self) -> Result<()> {
        if self.is_nonnegative() {
            Ok(())
        } else {
            invalid("weights must be non-negative")
        }
    }

    /// Strictly positive everywhere, as required for Erdős–Ulam ratios.
    pub fn is_positive(&self) -> bool {
        match self {
            WeightFn::Formula(WeightFormula::Reciprocal) => true,
            WeightFn::Formula(WeightFormula::Constant { value }) => value.is_positive(),
            WeightFn::Formula(WeightFormula::Geometric { scale, ratio }) => scale.is_positive() && ratio.is_positive(),
            _ => false,
        }
    }
}
