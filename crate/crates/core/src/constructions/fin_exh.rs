use serde::{Deserialize, Serialize};

use super::transcript::{SelectionStep, SelectionTranscript};
use crate::error::{invalid, Result};
use crate::omega::{FinSet, OmegaSet};
use crate::scalar::Scalar;
use crate::submeasure::{exh_certificate, MembershipCertificate, Submeasure};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FinToExh<S: Scalar> {
    /// `k_0 = 0 < k_1 < …`
    pub boundaries: Vec<u64>,
    /// `ψ = sup_n φ(· ∩ X_n)/max(n, 1)` with `X_n = [k_n, k_{n+1})`
    pub psi: Submeasure<S>,
    /// step `n` records `X_n` by its endpoints and `φ(X_n)` against `max(n², 1)`
    pub transcript: SelectionTranscript<S>,
}

impl<S: Scalar> FinToExh<S> {
    /// `ψ_n(X_n) = φ(X_n)/max(n, 1)`
    pub fn psi_n_on_block(&self, phi: &Submeasure<S>, n: usize) -> S {
        let (lo, hi) = (self.boundaries[n], self.boundaries[n + 1]);
        phi.eval_interval(lo, hi) / S::from_usize(n.max(1))
    }
}

/// Least `k > lo` with `φ([lo, k)) ≥ target`, searching `k ≤ budget`.
fn next_boundary<S: Scalar>(phi: &Submeasure<S>, lo: u64, target: &S, budget: u64) -> Option<u64> {
    if lo >= budget {
        return None;
    }
    let reaches = |k: u64| phi.eval_interval(lo, k) >= *target;
    let mut step = 1u64;
    let mut prev = lo + 1;
    let mut hi = lo + 1;
    while !reaches(hi) {
        if hi == budget {
            return None;
        }
        prev = hi + 1;
        step = step.saturating_mul(2);
        hi = lo.saturating_add(step).min(budget);
    }
    // reaches(hi) and every k < prev fails
    let (mut a, mut b) = (prev, hi);
    while a < b {
        let mid = a + (b - a) / 2;
        if reaches(mid) {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    Some(a)
}

/// Cuts ω into intervals `X_n` with `φ(X_n) ≥ max(n², 1)` for `n < depth` and rescales.
pub fn fin_to_exh<S: Scalar>(phi: &Submeasure<S>, depth: usize, budget: u64) -> FinToExh<S> {
    let mut boundaries = vec![0u64];
    let mut transcript = SelectionTranscript::default();
    for n in 0..depth {
        let threshold = S::from_usize((n * n).max(1));
        let lo = *boundaries.last().expect("k_0");
        let Some(hi) = next_boundary(phi, lo, &threshold, budget) else {
            transcript = transcript.fail(n, budget, "φ of the next interval stays below max(n², 1)");
            break;
        };
        boundaries.push(hi);
        transcript.steps.push(SelectionStep {
            level: n,
            index: Some(hi),
            sign: None,
            set: [lo, hi].into_iter().collect(),
            value: phi.eval_interval(lo, hi),
            threshold,
        });
    }
    let components = (0..boundaries.len() - 1)
        .map(|n| Submeasure::scaled(phi.clone(), S::one() / S::from_usize(n.max(1))))
        .collect();
    let psi = Submeasure::GeneralizedDensity { boundaries: boundaries.clone(), components };
    FinToExh { boundaries, psi, transcript }
}

/// ExhYes evidence for `A` in `exh(ψ)` from a bound `φ(A) ≤ bound`: past `X_n` with
/// `n > bound/ε` every component is below `ε`.
pub fn fin_to_exh_certificate<S: Scalar>(
    built: &FinToExh<S>,
    a: &OmegaSet,
    bound: &S,
    eps: &S,
) -> Result<MembershipCertificate<S>> {
    if !eps.is_positive() {
        return invalid("eps must be positive");
    }
    let ratio = bound.clone() / eps.clone();
    let last = built.boundaries.len() - 1;
    let Some(n) = (1..last).find(|&n| S::from_usize(n) > ratio) else {
        return invalid(format!("depth {last} does not reach n > bound/eps"));
    };
    let m = built.boundaries[n];
    let end = built.boundaries[last];
    exh_certificate(&built.psi, a, eps, &[(m, end)])
}

/// `φ(A ∩ X_n)` for each constructed `n`; every entry is at most `φ(A)`.
pub fn block_traces<S: Scalar>(built: &FinToExh<S>, phi: &Submeasure<S>, a: &FinSet) -> Vec<S> {
    built.boundaries.windows(2).map(|w| phi.eval_finite(&a.range(w[0]..w[1]).copied().collect())).collect()
}
