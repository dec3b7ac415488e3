use serde::{Deserialize, Serialize};

use super::measure::{ClopenCode, Polarity};
use crate::omega::OmegaSet;
use crate::scalar::{serde_scalar, Scalar};
use crate::submeasure::WeightFn;

/// A value of `T_α(μ)` on a clopen set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case", bound = "")]
pub enum ExtensionValue<S: Scalar> {
    Exact {
        #[serde(with = "serde_scalar")]
        value: S,
    },
    /// the exact value lies in `[lo, hi]`
    Interval {
        #[serde(with = "serde_scalar")]
        lo: S,
        #[serde(with = "serde_scalar")]
        hi: S,
        horizon: u64,
    },
    /// no tail bound is known; `partial` is the sum below the horizon
    Unknown {
        #[serde(with = "serde_scalar")]
        partial: S,
        horizon: u64,
    },
}

impl<S: Scalar> ExtensionValue<S> {
    pub fn exact(&self) -> Option<&S> {
        match self {
            ExtensionValue::Exact { value } => Some(value),
            _ => None,
        }
    }

    fn map(self, f: impl Fn(S) -> S, flips: bool) -> Self {
        match self {
            ExtensionValue::Exact { value } => ExtensionValue::Exact { value: f(value) },
            ExtensionValue::Interval { lo, hi, horizon } => {
                let (a, b) = (f(lo), f(hi));
                let (lo, hi) = if flips { (b, a) } else { (a, b) };
                ExtensionValue::Interval { lo, hi, horizon }
            }
            ExtensionValue::Unknown { partial, horizon } => ExtensionValue::Unknown { partial: f(partial), horizon },
        }
    }
}

/// `Σ_{n∈A} w(n)`, exact when `A` or the support of `w` is finite, otherwise bracketed by the
/// tail bound past `horizon`.
pub fn weight_sum<S: Scalar>(w: &WeightFn<S>, a: &OmegaSet, horizon: u64) -> ExtensionValue<S> {
    if let Some(f) = a.as_finite() {
        let value = f.iter().fold(S::zero(), |acc, &n| acc + w.weight(n));
        return ExtensionValue::Exact { value };
    }
    if let Some(bound) = w.support_bound() {
        let value = a.prefix(bound).iter().fold(S::zero(), |acc, &n| acc + w.weight(n));
        return ExtensionValue::Exact { value };
    }
    let partial = a.prefix(horizon).iter().fold(S::zero(), |acc, &n| acc + w.weight(n));
    match w.tail_abs(horizon) {
        Some(t) if t.is_zero() => ExtensionValue::Exact { value: partial },
        Some(t) => ExtensionValue::Interval { lo: partial.clone() - t.clone(), hi: partial + t, horizon },
        None => ExtensionValue::Unknown { partial, horizon },
    }
}

/// `T_α(μ)(A)`: `μ(A)` on small codes and `α − μ(base)` on cosmall codes, where `μ` is induced by
/// the signed weights `w`.
pub fn extend_t<S: Scalar>(w: &WeightFn<S>, alpha: &S, a: &ClopenCode, horizon: u64) -> ExtensionValue<S> {
    let inner = weight_sum(w, &a.base, horizon);
    match a.polarity {
        Polarity::Small => inner,
        Polarity::Cosmall => inner.map(|v| alpha.clone() - v, true),
    }
}

/// `g(x) = |x| + |α − x|`, the value of a complementary pair `(A, A^c)` with `μ(A) = x`.
fn pair_value<S: Scalar>(alpha: &S, x: &S) -> S {
    x.abs() + (alpha.clone() - x.clone()).abs()
}

/// Norm data of `T_α(μ_H)` where `μ_H` keeps the weights below the horizon `H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct HorizonNorms<S: Scalar> {
    pub horizon: u64,
    /// `Σ_{n<H} |w(n)|`
    #[serde(with = "serde_scalar")]
    pub mu_norm: S,
    /// `Σ_{n<H} w(n)`
    #[serde(with = "serde_scalar")]
    pub mass: S,
    /// `max(‖μ_H‖, |α|)`
    #[serde(with = "serde_scalar")]
    pub inf_norm: S,
    /// `‖μ_H‖ + |α|`
    #[serde(with = "serde_scalar")]
    pub one_norm: S,
    /// sup of `|T(A)| + |T(A^c)|` over the positive part, the negative part and the samples
    #[serde(with = "serde_scalar")]
    pub t_norm: S,
    /// `‖μ_H‖ + |α − μ_H(ω)|`
    #[serde(with = "serde_scalar")]
    pub decomposition: S,
    pub sandwich: bool,
    pub decomposition_holds: bool,
}

pub fn horizon_norms<S: Scalar>(w: &WeightFn<S>, alpha: &S, samples: &[OmegaSet], horizon: u64) -> HorizonNorms<S> {
    let mut pos = S::zero();
    let mut neg = S::zero();
    let mut mu_norm = S::zero();
    let mut mass = S::zero();
    for n in 0..horizon {
        let x = w.weight(n);
        if x.is_positive() {
            pos = pos + x.clone();
        } else {
            neg = neg + x.clone();
        }
        mu_norm = mu_norm + x.abs();
        mass = mass + x;
    }
    let mut t_norm = S::max_of(pair_value(alpha, &pos), pair_value(alpha, &neg));
    for a in samples {
        let x = a.prefix(horizon).iter().fold(S::zero(), |acc, &n| acc + w.weight(n));
        t_norm = S::max_of(t_norm, pair_value(alpha, &x));
    }
    let inf_norm = S::max_of(mu_norm.clone(), alpha.abs());
    let one_norm = mu_norm.clone() + alpha.abs();
    let decomposition = mu_norm.clone() + (alpha.clone() - mass.clone()).abs();
    let two = S::from_u64(2);
    HorizonNorms {
        horizon,
        sandwich: inf_norm <= t_norm && t_norm <= two * one_norm.clone(),
        decomposition_holds: decomposition == t_norm,
        mu_norm,
        mass,
        inf_norm,
        one_norm,
        t_norm,
        decomposition,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ExtensionReport<S: Scalar> {
    /// one row per horizon `H/8, H/4, H/2, H` (deduplicated, at least 1)
    pub rows: Vec<HorizonNorms<S>>,
    pub monotone: bool,
    /// exact `‖μ‖ + |α − Σ w|` when the weights certify their sums
    #[serde(with = "serde_scalar::opt")]
    pub limit_norm: Option<S>,
    pub holds: bool,
}

/// Checks `‖(μ,α)‖_∞ ≤ ‖T_α(μ)‖ ≤ 2‖(μ,α)‖₁` and the norm decomposition at several horizons, and
/// that the approximations increase with the horizon.
pub fn extension_bounds_check<S: Scalar>(
    w: &WeightFn<S>,
    alpha: &S,
    samples: &[OmegaSet],
    horizon: u64,
) -> ExtensionReport<S> {
    let mut hs: Vec<u64> = [8, 4, 2, 1].iter().map(|d| (horizon / d).max(1)).collect();
    hs.dedup();
    let rows: Vec<_> = hs.iter().map(|&h| horizon_norms(w, alpha, samples, h)).collect();
    let monotone = rows.windows(2).all(|p| p[0].t_norm <= p[1].t_norm);
    let limit_norm = match (w.total_abs(), w.total()) {
        (Some(a), Some(t)) => Some(a + (alpha.clone() - t).abs()),
        _ => None,
    };
    let holds = monotone
        && rows.iter().all(|r| r.sandwich && r.decomposition_holds)
        && limit_norm.as_ref().is_none_or(|l| rows.iter().all(|r| r.t_norm <= *l));
    ExtensionReport { rows, monotone, limit_norm, holds }
}
