use serde::{Deserialize, Serialize};

use super::contracts::MeasureStream;
use super::measure::{ClopenCode, FinMeasure, Point};
use crate::error::{invalid, Error, Result};
use crate::omega::FinSet;
use crate::scalar::{serde_scalar, Scalar};

/// A sequence of positive rationals indexed by `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum Schedule<S: Scalar> {
    /// `a·k + b`
    Affine {
        #[serde(with = "serde_scalar")]
        a: S,
        #[serde(with = "serde_scalar")]
        b: S,
    },
    Explicit {
        #[serde(with = "serde_scalar::vec")]
        values: Vec<S>,
    },
}

impl<S: Scalar> Schedule<S> {
    pub fn affine(a: u64, b: u64) -> Self {
        Schedule::Affine { a: S::from_u64(a), b: S::from_u64(b) }
    }

    /// `N_k = k + 1`
    pub fn default_n() -> Self {
        Self::affine(1, 1)
    }

    /// `M_k = k + 2`
    pub fn default_m() -> Self {
        Self::affine(1, 2)
    }

    pub fn at(&self, k: usize) -> Result<S> {
        match self {
            Schedule::Affine { a, b } => Ok(a.clone() * S::from_usize(k) + b.clone()),
            Schedule::Explicit { values } => {
                values.get(k).cloned().ok_or_else(|| Error::InvalidInput(format!("schedule has no entry {k}")))
            }
        }
    }

    pub fn validate_positive(&self, name: &str) -> Result<()> {
        let bad = match self {
            Schedule::Affine { a, b } => a.is_negative() || !b.is_positive(),
            Schedule::Explicit { values } => values.iter().any(|v| !v.is_positive()),
        };
        if bad {
            return invalid(format!("schedule {name} must be positive"));
        }
        Ok(())
    }
}

/// One selection of the first stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Stage1Step<S: Scalar> {
    pub k: usize,
    /// selected index `n_k`
    pub n: u64,
    #[serde(with = "serde_scalar")]
    pub big_n: S,
    #[serde(with = "serde_scalar")]
    pub big_m: S,
    /// `A_k`, a cosmall code
    pub a: ClopenCode,
    /// `‖μ_{n_k}↾A_k^c‖`
    #[serde(with = "serde_scalar")]
    pub restricted_norm: S,
    /// `N_k·M_k²·(‖μ_{n_k}↾A_k^c‖ + 1)`
    #[serde(with = "serde_scalar")]
    pub threshold: S,
    pub u: FinSet,
    #[serde(with = "serde_scalar")]
    pub u_value: S,
    /// `M_k·‖μ_{n_k}↾A_k^c‖ + M_k`
    #[serde(with = "serde_scalar")]
    pub scale: S,
    pub theta: FinMeasure<S>,
    /// `B_k = A_k ∖ A_{k+1}`
    pub b: ClopenCode,
    /// `θ_k↾(B_k ∪ {p})`
    pub nu: FinMeasure<S>,
    #[serde(with = "serde_scalar")]
    pub nu_norm_off_p: S,
}

impl<S: Scalar> Stage1Step<S> {
    /// `(|ν_k(A)|, |θ_k(A)| + 1/M_k + 1/(k+1))`
    pub fn pointwise_bound(&self, a: &ClopenCode) -> (S, S) {
        let lhs = self.nu.eval(a).abs();
        let rhs = self.theta.eval(a).abs() + S::one() / self.big_m.clone() + S::one() / S::from_usize(self.k + 1);
        (lhs, rhs)
    }

    pub fn pointwise_holds(&self, a: &ClopenCode) -> bool {
        let (l, r) = self.pointwise_bound(a);
        l < r
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageFailure {
    pub k: usize,
    /// indices `< searched_up_to` were examined
    pub searched_up_to: u64,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Stage1Transcript<S: Scalar> {
    pub steps: Vec<Stage1Step<S>>,
    pub failure: Option<StageFailure>,
}

/// Greedy selection of `n_k` and `U_k ⊆ A_k ∖ {p}` with `|μ_{n_k}(U_k)|` above the threshold.
///
/// `A_0` is the whole space and `A_{k+1}` excludes every support point in ω seen so far, so the
/// blocks `B_k` are pairwise disjoint finite sets. Indices `≥ budget` are never examined.
pub fn disjointify_stage1<S: Scalar>(
    seq: &MeasureStream<S>,
    big_n: &Schedule<S>,
    big_m: &Schedule<S>,
    depth: usize,
    budget: u64,
) -> Result<Stage1Transcript<S>> {
    big_n.validate_positive("N")?;
    big_m.validate_positive("M")?;
    if big_m.at(0)? <= S::one() {
        return invalid("M_0 must exceed 1");
    }
    let mut excluded = FinSet::new();
    let mut next = 0u64;
    let mut steps = Vec::with_capacity(depth);
    for k in 0..depth {
        let (nk, mk) = (big_n.at(k)?, big_m.at(k)?);
        let factor = nk.clone() * mk.clone() * mk.clone();
        let mut found = None;
        let mut n = next;
        while n < budget {
            let Some(mu) = seq.get(n) else { break };
            let restricted_norm = excluded.iter().fold(S::zero(), |a, &x| a + mu.weight(Point::Nat(x)).abs());
            let threshold = factor.clone() * (restricted_norm.clone() + S::one());
            let inside = mu.restrict(&ClopenCode::cosmall_finite(excluded.iter().copied()));
            let ((pos, pv), (neg, nv)) = inside.hahn_parts();
            let (u, u_value) = if pv >= nv.abs() { (pos, pv) } else { (neg, nv) };
            if u_value.abs() > threshold {
                found = Some((n, mu, restricted_norm, threshold, u, u_value));
                break;
            }
            n += 1;
        }
        let Some((n, mu, restricted_norm, threshold, u, u_value)) = found else {
            let reason = if n < budget { "stream ended" } else { "budget exhausted" };
            return Ok(Stage1Transcript {
                steps,
                failure: Some(StageFailure { k, searched_up_to: n, reason: reason.into() }),
            });
        };
        let a = ClopenCode::cosmall_finite(excluded.iter().copied());
        let fresh: FinSet = mu.support_in_omega().difference(&excluded).copied().collect();
        let b = ClopenCode::small_finite(fresh.iter().copied());
        excluded.extend(fresh);
        let scale = mk.clone() * restricted_norm.clone() + mk.clone();
        let theta = mu.scale(&(S::one() / scale.clone()));
        let nu = theta.restrict(&b).plus(&FinMeasure::from_weights([(Point::P, theta.p_weight())]));
        let nu_norm_off_p = nu.off_p().norm();
        if nu_norm_off_p <= nk {
            return Err(Error::InvalidInput(format!(
                "stage 1 postcondition failed at k = {k}: ‖ν_k off p‖ = {} ≤ N_k",
                nu_norm_off_p.to_exact_string()
            )));
        }
        steps.push(Stage1Step {
            k,
            n,
            big_n: nk,
            big_m: mk,
            a,
            restricted_norm,
            threshold,
            u,
            u_value,
            scale,
            theta,
            b,
            nu,
            nu_norm_off_p,
        });
        next = n + 1;
    }
    Ok(Stage1Transcript { steps, failure: None })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", bound = "")]
pub enum CaseRule<S: Scalar> {
    /// Case 2 when the `|p`-atoms| strictly increase, start positive and end above `threshold`
    Auto {
        #[serde(with = "serde_scalar")]
        threshold: S,
    },
    ForceCase1,
    ForceCase2,
}

impl<S: Scalar> Default for CaseRule<S> {
    fn default() -> Self {
        CaseRule::Auto { threshold: S::one() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage2Case {
    /// bounded atoms: consecutive differences
    Case1,
    /// growing atoms: ratio-corrected differences along a subsequence
    Case2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Stage2Step<S: Scalar> {
    pub k: usize,
    /// input indices `n_{2k}` and `n_{2k+1}`
    pub left: usize,
    pub right: usize,
    #[serde(with = "serde_scalar")]
    pub alpha: S,
    pub nu: FinMeasure<S>,
    #[serde(with = "serde_scalar")]
    pub norm: S,
    /// `N_{n_{2k}}`
    #[serde(with = "serde_scalar")]
    pub bound: S,
    /// `B_{n_{2k}} ∨ B_{n_{2k+1}}`
    pub support_code: ClopenCode,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Stage2Transcript<S: Scalar> {
    pub case: Stage2Case,
    /// `|ρ_n(p)|` over the input window
    #[serde(with = "serde_scalar::vec")]
    pub atoms: Vec<S>,
    pub steps: Vec<Stage2Step<S>>,
    pub failure: Option<StageFailure>,
}

fn strictly_growing<S: Scalar>(atoms: &[S]) -> bool {
    atoms.first().is_some_and(|a| a.is_positive()) && atoms.windows(2).all(|w| w[0] < w[1])
}

fn check_blocks<S: Scalar>(rho: &[(FinMeasure<S>, ClopenCode)]) -> Result<Vec<FinSet>> {
    let mut seen = FinSet::new();
    let mut out = Vec::with_capacity(rho.len());
    for (i, (m, b)) in rho.iter().enumerate() {
        let Some(set) = b.base.as_finite().filter(|_| b.is_small()) else {
            return invalid(format!("B_{i} must be a small finite code"));
        };
        if !m.support_in_omega().is_subset(set) {
            return invalid(format!("measure {i} is not supported in B_{i} ∪ {{p}}"));
        }
        if !seen.is_disjoint(set) {
            return invalid(format!("B_{i} meets an earlier block"));
        }
        seen.extend(set.iter().copied());
        out.push(set.clone());
    }
    Ok(out)
}

/// Removes the atom at `p` by pairing inputs, choosing the case with `rule`.
pub fn disjointify_stage2<S: Scalar>(
    rho: &[(FinMeasure<S>, ClopenCode)],
    big_n: &Schedule<S>,
    rule: &CaseRule<S>,
) -> Result<Stage2Transcript<S>> {
    let blocks = check_blocks(rho)?;
    let atoms: Vec<S> = rho.iter().map(|(m, _)| m.p_weight().abs()).collect();
    let case = match rule {
        CaseRule::ForceCase1 => Stage2Case::Case1,
        CaseRule::ForceCase2 => Stage2Case::Case2,
        CaseRule::Auto { threshold } => {
            if strictly_growing(&atoms) && atoms.last().is_some_and(|a| a > threshold) {
                Stage2Case::Case2
            } else {
                Stage2Case::Case1
            }
        }
    };
    let indices: Vec<usize> = match case {
        Stage2Case::Case1 => (0..rho.len()).collect(),
        Stage2Case::Case2 => {
            let mut picked: Vec<usize> = Vec::new();
            for (i, a) in atoms.iter().enumerate() {
                let ok = match picked.last() {
                    None => a.is_positive(),
                    Some(&j) => *a > atoms[j],
                };
                if ok {
                    picked.push(i);
                }
            }
            picked
        }
    };
    let mut steps = Vec::new();
    for (k, pair) in indices.chunks_exact(2).enumerate() {
        let (l, r) = (pair[0], pair[1]);
        let (ml, mr) = (&rho[l].0, &rho[r].0);
        let alpha = match case {
            Stage2Case::Case1 => S::one(),
            Stage2Case::Case2 => ml.p_weight() / mr.p_weight(),
        };
        let nu = ml.minus(&mr.scale(&alpha)).off_p();
        let bound = big_n.at(l)?;
        let norm = nu.norm();
        if norm <= bound {
            return Err(Error::InvalidInput(format!(
                "stage 2 postcondition failed at k = {k}: ‖ν_k‖ = {} ≤ N",
                norm.to_exact_string()
            )));
        }
        let support_code = ClopenCode::small_finite(blocks[l].union(&blocks[r]).copied());
        steps.push(Stage2Step { k, left: l, right: r, alpha, nu, norm, bound, support_code });
    }
    let failure = steps.is_empty().then(|| StageFailure {
        k: 0,
        searched_up_to: rho.len() as u64,
        reason: format!("no pair could be extracted for {case:?}"),
    });
    Ok(Stage2Transcript { case, atoms, steps, failure })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NormalizedStep<S: Scalar> {
    pub measure: FinMeasure<S>,
    /// the larger of the positive and negative parts
    pub u: ClopenCode,
    #[serde(with = "serde_scalar")]
    pub value: S,
}

/// Rescales disjointly supported measures to norm 1 and picks a witness `U_n` with
/// `|ν_n(U_n)| ≥ 1/2`.
pub fn anti_grothendieck_normalize<S: Scalar>(seq: &[FinMeasure<S>]) -> Result<Vec<NormalizedStep<S>>> {
    let mut seen = FinSet::new();
    let mut out = Vec::with_capacity(seq.len());
    for (i, m) in seq.iter().enumerate() {
        if !m.p_weight().is_zero() {
            return invalid(format!("measure {i} charges p"));
        }
        let norm = m.norm();
        if norm.is_zero() {
            return invalid(format!("measure {i} is zero"));
        }
        let support = m.support_in_omega();
        if !seen.is_disjoint(&support) {
            return invalid(format!("measure {i} overlaps an earlier support"));
        }
        seen.extend(support);
        let measure = m.scale(&(S::one() / norm));
        let ((pos, pv), (neg, nv)) = measure.hahn_parts();
        let (set, value) = if pv >= nv.abs() { (pos, pv) } else { (neg, nv) };
        out.push(NormalizedStep { measure, u: ClopenCode::small_finite(set), value });
    }
    Ok(out)
}

/// Stage 1, stage 2 and normalization run back to back.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PipelineTranscript<S: Scalar> {
    pub stage1: Stage1Transcript<S>,
    pub stage2: Option<Stage2Transcript<S>>,
    pub normalized: Option<Vec<NormalizedStep<S>>>,
}

impl<S: Scalar> PipelineTranscript<S> {
    pub fn failure(&self) -> Option<&StageFailure> {
        self.stage1.failure.as_ref().or_else(|| self.stage2.as_ref().and_then(|s| s.failure.as_ref()))
    }
}

pub fn disjointify_pipeline<S: Scalar>(
    seq: &MeasureStream<S>,
    big_n: &Schedule<S>,
    big_m: &Schedule<S>,
    rule: &CaseRule<S>,
    depth: usize,
    budget: u64,
) -> Result<PipelineTranscript<S>> {
    let stage1 = disjointify_stage1(seq, big_n, big_m, depth, budget)?;
    if stage1.failure.is_some() {
        return Ok(PipelineTranscript { stage1, stage2: None, normalized: None });
    }
    let rho: Vec<_> = stage1.steps.iter().map(|s| (s.nu.clone(), s.b.clone())).collect();
    let stage2 = disjointify_stage2(&rho, big_n, rule)?;
    let outputs: Vec<_> = stage2.steps.iter().map(|s| s.nu.clone()).collect();
    let normalized = anti_grothendieck_normalize(&outputs)?;
    Ok(PipelineTranscript { stage1, stage2: Some(stage2), normalized: Some(normalized) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::MapFormula;
    use num_rational::BigRational;
    use num_traits::{Signed, Zero};

    type Q = BigRational;

    fn q(n: u64) -> Q {
        Q::from_u64(n)
    }

    fn delta_pairs() -> MeasureStream<Q> {
        MeasureStream::delta_pair(MapFormula::Identity)
    }

    #[test]
    fn stage1_trace_on_delta_pairs() {
        let t = disjointify_stage1(&delta_pairs(), &Schedule::default_n(), &Schedule::default_m(), 3, 1000).unwrap();
        assert!(t.failure.is_none());
        let ns: Vec<u64> = t.steps.iter().map(|s| s.n).collect();
        assert_eq!(ns, vec![5, 19, 49]);
        let s0 = &t.steps[0];
        assert_eq!(s0.threshold, q(4));
        assert_eq!(s0.b, ClopenCode::small_finite([5]));
        assert_eq!(
            s0.nu,
            FinMeasure::from_weights([(Point::Nat(5), Q::from_frac(5, 2)), (Point::P, Q::from_frac(-5, 2))])
        );
        for s in &t.steps {
            assert!(s.nu_norm_off_p > s.big_n);
        }
    }

    #[test]
    fn stage1_bounded_sequence_fails() {
        let seq =
            MeasureStream::Explicit { measures: (0..50).map(|n| FinMeasure::dirac(Point::Nat(n), q(3))).collect() };
        let t = disjointify_stage1(&seq, &Schedule::default_n(), &Schedule::default_m(), 2, 100).unwrap();
        let f = t.failure.unwrap();
        assert_eq!(f.k, 0);
        assert_eq!(f.reason, "stream ended");
        let t = disjointify_stage1(&delta_pairs(), &Schedule::default_n(), &Schedule::default_m(), 2, 10).unwrap();
        assert_eq!(t.failure.unwrap().k, 1);
    }

    #[test]
    fn stage1_rejects_small_m0() {
        let m = Schedule::<Q>::affine(1, 1);
        assert!(disjointify_stage1(&delta_pairs(), &Schedule::default_n(), &m, 1, 10).is_err());
    }

    fn rho(atom: impl Fn(u64) -> u64) -> Vec<(FinMeasure<Q>, ClopenCode)> {
        (0..8u64)
            .map(|n| {
                let m = FinMeasure::from_weights([(Point::Nat(n), q(10 * (n + 1))), (Point::P, q(atom(n)))]);
                (m, ClopenCode::small_finite([n]))
            })
            .collect()
    }

    #[test]
    fn stage2_zero_atoms_take_case1() {
        let t = disjointify_stage2(&rho(|_| 0), &Schedule::default_n(), &CaseRule::default()).unwrap();
        assert_eq!(t.case, Stage2Case::Case1);
        assert_eq!(t.steps.len(), 4);
        assert_eq!(t.steps[0].nu, FinMeasure::from_weights([(Point::Nat(0), q(10)), (Point::Nat(1), -q(20))]));
    }

    #[test]
    fn stage2_growing_atoms_take_case2() {
        let t = disjointify_stage2(&rho(|n| n + 1), &Schedule::default_n(), &CaseRule::default()).unwrap();
        assert_eq!(t.case, Stage2Case::Case2);
        assert_eq!(t.steps[0].alpha, Q::from_frac(1, 2));
        for s in &t.steps {
            assert!(s.nu.p_weight().is_zero());
            assert!(s.norm > s.bound);
        }
    }

    #[test]
    fn stage2_rejects_overlapping_blocks() {
        let mut r = rho(|_| 0);
        r[1].1 = ClopenCode::small_finite([0, 1]);
        assert!(disjointify_stage2(&r, &Schedule::default_n(), &CaseRule::default()).is_err());
    }

    #[test]
    fn normalize_examples() {
        let seq: Vec<_> = (0..5u64).map(|n| FinMeasure::dirac(Point::Nat(n), q(n + 1))).collect();
        for (n, s) in anti_grothendieck_normalize(&seq).unwrap().iter().enumerate() {
            assert_eq!(s.measure, FinMeasure::dirac(Point::Nat(n as u64), q(1)));
            assert_eq!(s.u, ClopenCode::small_finite([n as u64]));
            assert_eq!(s.value, q(1));
        }
        let nu = FinMeasure::from_weights([(Point::Nat(0), q(2)), (Point::Nat(1), -q(2))]);
        let out = anti_grothendieck_normalize(&[nu]).unwrap();
        assert_eq!(out[0].u, ClopenCode::small_finite([0]));
        assert_eq!(out[0].value, Q::from_frac(1, 2));
        assert_eq!(out[0].measure.norm(), q(1));
    }

    #[test]
    fn pipeline_on_delta_pairs() {
        let t = disjointify_pipeline(
            &delta_pairs(),
            &Schedule::default_n(),
            &Schedule::default_m(),
            &CaseRule::default(),
            8,
            100_000,
        )
        .unwrap();
        assert!(t.failure().is_none());
        let s2 = t.stage2.as_ref().unwrap();
        assert_eq!(s2.case, Stage2Case::Case2);
        assert_eq!(s2.steps.len(), 4);
        let mut seen = FinSet::new();
        for s in &s2.steps {
            let sup = s.nu.support_in_omega();
            assert!(seen.is_disjoint(&sup));
            seen.extend(sup);
        }
        for s in t.normalized.as_ref().unwrap() {
            assert_eq!(s.measure.norm(), q(1));
            assert!(s.value.abs() > Q::from_frac(1, 3));
        }
    }
}
