use serde::{Deserialize, Serialize};

use super::handle::IdealHandle;
use crate::error::{invalid, Result};
use crate::omega::{MapFormula, OmegaSet};
use crate::scalar::Scalar;
use crate::submeasure::{CertificateKind, MembershipCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evidence {
    Verified,
    Falsified,
    Unknown,
}

impl Evidence {
    fn combine(kinds: impl IntoIterator<Item = CertificateKind>) -> Self {
        let mut out = Evidence::Verified;
        for k in kinds {
            if k.is_no() {
                return Evidence::Falsified;
            }
            if !k.is_yes() {
                out = Evidence::Unknown;
            }
        }
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KatetovRow<S: Scalar> {
    pub generator: OmegaSet,
    pub preimage: OmegaSet,
    pub certificate: MembershipCertificate<S>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KatetovReport<S: Scalar> {
    pub from: String,
    pub to: String,
    pub map: MapFormula,
    pub rows: Vec<KatetovRow<S>>,
    pub verdict: Evidence,
}

/// Evidence for `f⁻¹[A] ∈ J` on every generator `A` of `I`. A single ExhNo certificate falsifies.
pub fn katetov_verify<S: Scalar>(
    i: &IdealHandle<S>,
    j: &IdealHandle<S>,
    f: &MapFormula,
    budget: Option<u64>,
) -> Result<KatetovReport<S>> {
    f.validate()?;
    let mut rows = Vec::with_capacity(i.generators.len());
    for g in &i.generators {
        let preimage = g.preimage(f);
        let certificate = j.membership(&preimage, budget)?;
        rows.push(KatetovRow { generator: g.clone(), preimage, certificate });
    }
    let verdict = Evidence::combine(rows.iter().map(|r| r.certificate.kind));
    Ok(KatetovReport { from: i.name.clone(), to: j.name.clone(), map: f.clone(), rows, verdict })
}

/// The dual filter of `ℱ₁ ⊕ ℱ₂` on `ω = Ω₁ ⊔ Ω₂`, with `b_i : ω → Ω_i` bijections.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DirectSum<S: Scalar> {
    pub left: IdealHandle<S>,
    pub right: IdealHandle<S>,
    pub omega1: OmegaSet,
    pub b1: MapFormula,
    pub b2: MapFormula,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct DirectSumVerdict<S: Scalar> {
    /// `{n : b_i(n) ∉ A}`, which must lie in the `i`-th ideal
    pub complements: [OmegaSet; 2],
    pub certificates: [MembershipCertificate<S>; 2],
    pub verdict: Evidence,
}

impl<S: Scalar> DirectSum<S> {
    /// The even/odd split with `b₁(n) = 2n` and `b₂(n) = 2n + 1`.
    pub fn evens_odds(left: IdealHandle<S>, right: IdealHandle<S>) -> Self {
        DirectSum {
            left,
            right,
            omega1: OmegaSet::program(crate::omega::Formula::Evens),
            b1: MapFormula::Affine { a: 2, b: 0 },
            b2: MapFormula::Affine { a: 2, b: 1 },
        }
    }

    /// Checks on `[0, horizon)` that `b₁` and `b₂` land in `Ω₁` and `Ω₂`, are injective and
    /// jointly cover every point below `horizon` they can reach.
    pub fn validate(&self, horizon: u64) -> Result<()> {
        let mut hit = std::collections::BTreeSet::new();
        for n in 0..horizon {
            let (x, y) = (self.b1.apply(n), self.b2.apply(n));
            if !self.omega1.contains(x) || self.omega1.contains(y) {
                return invalid(format!("b1({n}) or b2({n}) lands in the wrong part"));
            }
            if !hit.insert(x) || !hit.insert(y) {
                return invalid(format!("the bijections collide at {n}"));
            }
        }
        if let Some(x) = (0..horizon).find(|x| !hit.contains(x)) {
            return invalid(format!("{x} is not in the range of b1 or b2"));
        }
        Ok(())
    }

    /// `A ∈ ℱ₁ ⊕ ℱ₂` iff `b_i⁻¹[A] ∈ ℱ_i` for both `i`.
    pub fn filter_membership(&self, a: &OmegaSet, budget: Option<u64>) -> Result<DirectSumVerdict<S>> {
        let comp = a.complement();
        let c1 = comp.preimage(&self.b1);
        let c2 = comp.preimage(&self.b2);
        let k1 = self.left.membership(&c1, budget)?;
        let k2 = self.right.membership(&c2, budget)?;
        let verdict = Evidence::combine([k1.kind, k2.kind]);
        Ok(DirectSumVerdict { complements: [c1, c2], certificates: [k1, k2], verdict })
    }
}

pub fn direct_sum<S: Scalar>(
    left: IdealHandle<S>,
    right: IdealHandle<S>,
    omega1: OmegaSet,
    b1: MapFormula,
    b2: MapFormula,
) -> DirectSum<S> {
    DirectSum { left, right, omega1, b1, b2 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitVerdict {
    /// both parts carry non-membership evidence
    Split,
    /// every family member leaves one part certified small
    NotSplit,
    Unresolved,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplitRow {
    pub test: OmegaSet,
    pub splitter: Option<usize>,
    pub verdict: SplitVerdict,
    /// certificate kinds of `A ∩ B` and `A ∖ B` per family member examined
    pub kinds: Vec<(CertificateKind, CertificateKind)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplittingReport {
    pub ideal: String,
    pub rows: Vec<SplitRow>,
}

impl SplittingReport {
    pub fn all_split(&self) -> bool {
        self.rows.iter().all(|r| r.verdict == SplitVerdict::Split)
    }
}

/// Looks for `B` in the family with both `A ∩ B` and `A ∖ B` outside the ideal, for each test `A`.
pub fn splitting_check<S: Scalar>(
    family: &[OmegaSet],
    ideal: &IdealHandle<S>,
    tests: &[OmegaSet],
    budget: Option<u64>,
) -> Result<SplittingReport> {
    let mut rows = Vec::with_capacity(tests.len());
    for a in tests {
        let mut kinds = Vec::new();
        let mut splitter = None;
        let mut all_small = true;
        for (i, b) in family.iter().enumerate() {
            let inside = ideal.membership(&a.intersect(b), budget)?.kind;
            let outside = ideal.membership(&a.minus(b), budget)?.kind;
            kinds.push((inside, outside));
            if inside.is_no() && outside.is_no() {
                splitter = Some(i);
                break;
            }
            all_small &= inside.is_yes() || outside.is_yes();
        }
        let verdict = match splitter {
            Some(_) => SplitVerdict::Split,
            None if all_small => SplitVerdict::NotSplit,
            None => SplitVerdict::Unresolved,
        };
        rows.push(SplitRow { test: a.clone(), splitter, verdict, kinds });
    }
    Ok(SplittingReport { ideal: ideal.name.clone(), rows })
}
