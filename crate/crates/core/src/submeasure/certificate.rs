use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Submeasure;
use crate::error::{invalid, Result};
use crate::omega::{FinSet, OmegaSet};
use crate::scalar::{serde_scalar, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    ExhYes,
    ExhNo,
    FinYes,
    ZeroYes,
    Unknown,
}

impl CertificateKind {
    /// Positive membership evidence.
    pub fn is_yes(self) -> bool {
        matches!(self, CertificateKind::ExhYes | CertificateKind::FinYes | CertificateKind::ZeroYes)
    }

    pub fn is_no(self) -> bool {
        self == CertificateKind::ExhNo
    }
}

/// `core_estimate(φ, A, m, n) = value`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Observation<S: Scalar> {
    pub m: u64,
    pub n: u64,
    #[serde(with = "serde_scalar")]
    pub value: S,
}

/// `φ(set) = value` for `set = A ∩ block`, the block lying inside `[m, n)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BlockBound<S: Scalar> {
    pub m: u64,
    pub n: u64,
    pub block: u64,
    pub set: FinSet,
    #[serde(with = "serde_scalar")]
    pub value: S,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MembershipCertificate<S: Scalar> {
    pub kind: CertificateKind,
    #[serde(with = "serde_scalar")]
    pub eps: S,
    pub witness_m: Option<u64>,
    pub observations: Vec<Observation<S>>,
    pub block_bounds: Vec<BlockBound<S>>,
    pub note: String,
}

impl<S: Scalar> MembershipCertificate<S> {
    /// Re-evaluates every recorded set and checks that the verdict follows from the values.
    pub fn replay(&self, phi: &Submeasure<S>, a: &OmegaSet) -> bool {
        for o in &self.observations {
            match phi.core_estimate(a, o.m, o.n) {
                Ok(v) if v == o.value => {}
                _ => return false,
            }
        }
        for b in &self.block_bounds {
            if a.window(b.m, b.n).is_superset(&b.set) && phi.eval_finite(&b.set) == b.value {
                continue;
            }
            return false;
        }
        match self.kind {
            CertificateKind::ExhYes => self.witness_m.is_some_and(|m| {
                let rows: Vec<_> = self.observations.iter().filter(|o| o.m == m).collect();
                !rows.is_empty() && rows.iter().all(|o| o.value < self.eps && o.m < o.n)
            }),
            CertificateKind::ExhNo => {
                let ms: Vec<u64> = self.observations.iter().map(|o| o.m).collect();
                !ms.is_empty() && ms.iter().all(|m| self.block_bounds.iter().any(|b| b.m == *m && b.value >= self.eps))
            }
            CertificateKind::FinYes | CertificateKind::ZeroYes => match a.as_finite() {
                Some(f) => {
                    let v = phi.eval_finite(f);
                    (self.kind == CertificateKind::ZeroYes) == v.is_zero()
                }
                None => false,
            },
            CertificateKind::Unknown => true,
        }
    }
}

/// Schedule `m ∈ {b/16, b/8, b/4, b/2}` against `n ∈ {b/2, b}`, keeping `m < n`.
pub fn default_schedule(budget: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for m in [budget / 16, budget / 8, budget / 4, budget / 2] {
        for n in [budget / 2, budget] {
            if m < n && !out.contains(&(m, n)) {
                out.push((m, n));
            }
        }
    }
    out
}

/// Evidence for `A ∈ Exh(φ)` at precision `eps` along a schedule of `(m, n)` pairs.
pub fn exh_certificate<S: Scalar>(
    phi: &Submeasure<S>,
    a: &OmegaSet,
    eps: &S,
    schedule: &[(u64, u64)],
) -> Result<MembershipCertificate<S>> {
    if schedule.is_empty() {
        return invalid("schedule must be nonempty");
    }
    if let Some((m, n)) = schedule.iter().find(|(m, n)| m > n) {
        return invalid(format!("schedule pair ({m}, {n}) has m > n"));
    }
    if !eps.is_positive() {
        return invalid("eps must be positive");
    }
    let mut observations = Vec::with_capacity(schedule.len());
    let mut by_m: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for &(m, n) in schedule {
        let value = phi.core_estimate(a, m, n)?;
        by_m.entry(m).or_default().push(observations.len());
        observations.push(Observation { m, n, value });
    }
    let passes =
        |rows: &Vec<usize>| rows.iter().all(|&i| observations[i].m < observations[i].n && observations[i].value < *eps);
    if let Some((&m, _)) = by_m.iter().find(|(_, rows)| passes(rows)) {
        return Ok(MembershipCertificate {
            kind: CertificateKind::ExhYes,
            eps: eps.clone(),
            witness_m: Some(m),
            observations,
            block_bounds: Vec::new(),
            note: format!("every tested tail from {m} on is below eps"),
        });
    }
    let mut block_bounds = Vec::new();
    let mut all_large = phi.is_block_structured();
    if all_large {
        for (&m, rows) in &by_m {
            let n = rows.iter().map(|&i| observations[i].n).max().expect("nonempty group");
            match phi.tail_block_bound(a, m, n).flatten() {
                Some(b) => {
                    if b.value < *eps {
                        all_large = false;
                    }
                    block_bounds.push(b);
                }
                None => all_large = false,
            }
        }
    }
    let (kind, note) = if all_large {
        (CertificateKind::ExhNo, "a full tail block reaches eps past every tested m".to_string())
    } else if phi.is_block_structured() {
        (CertificateKind::Unknown, "no ExhYes tail and no full block reaching eps at some m".to_string())
    } else {
        (CertificateKind::Unknown, "no ExhYes tail; this family gives no exact tail lower bounds".to_string())
    };
    Ok(MembershipCertificate { kind, eps: eps.clone(), witness_m: None, observations, block_bounds, note })
}

/// Membership evidence at the default schedule; finite sets are decided outright.
pub fn membership<S: Scalar>(
    phi: &Submeasure<S>,
    a: &OmegaSet,
    eps: &S,
    budget: u64,
) -> Result<MembershipCertificate<S>> {
    if let Some(f) = a.as_finite() {
        let value = phi.eval_finite(f);
        let top = f.last().map_or(0, |&x| x + 1);
        let kind = if value.is_zero() { CertificateKind::ZeroYes } else { CertificateKind::FinYes };
        return Ok(MembershipCertificate {
            kind,
            eps: eps.clone(),
            witness_m: Some(top),
            observations: vec![Observation { m: 0, n: top, value }],
            block_bounds: Vec::new(),
            note: "finite set".to_string(),
        });
    }
    let schedule = default_schedule(budget.max(16));
    exh_certificate(phi, a, eps, &schedule)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case", bound = "")]
pub enum WitnessOutcome<S: Scalar> {
    Found {
        set: FinSet,
        #[serde(with = "serde_scalar")]
        value: S,
    },
    Failure {
        #[serde(with = "serde_scalar")]
        best: S,
        budget: u64,
    },
}

/// Shortest initial segment of `inside ∩ [0, budget)` whose value reaches `target`.
pub fn unbounded_witness<S: Scalar>(
    phi: &Submeasure<S>,
    inside: &OmegaSet,
    target: &S,
    budget: u64,
) -> WitnessOutcome<S> {
    let pool: Vec<u64> = inside.prefix(budget).into_iter().collect();
    let value_of = |k: usize| phi.eval_finite(&pool[..k].iter().copied().collect());
    if target.is_zero() || target.is_negative() {
        return WitnessOutcome::Found { set: FinSet::new(), value: S::zero() };
    }
    let mut lo = 0usize;
    let mut hi = None;
    let mut k = 1usize;
    while k <= pool.len() {
        if value_of(k) >= *target {
            hi = Some(k);
            break;
        }
        lo = k;
        k *= 2;
    }
    if hi.is_none() && !pool.is_empty() && value_of(pool.len()) >= *target {
        hi = Some(pool.len());
    }
    let Some(mut hi) = hi else {
        return WitnessOutcome::Failure { best: value_of(pool.len()), budget };
    };
    // value_of(lo) < target <= value_of(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if value_of(mid) >= *target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let set: FinSet = pool[..hi].iter().copied().collect();
    let value = phi.eval_finite(&set);
    WitnessOutcome::Found { set, value }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::Formula;
    use crate::submeasure::WeightFn;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(a: i64, b: i64) -> Q {
        Q::from_frac(a, b)
    }

    #[test]
    fn geometric_tail_certificate() {
        let phi = Submeasure::summable(WeightFn::geometric(q(1, 1), q(1, 2)));
        let schedule: Vec<(u64, u64)> = (0..=10).map(|m| (m, 40)).collect();
        let c = exh_certificate(&phi, &OmegaSet::all(), &q(1, 100), &schedule).unwrap();
        assert_eq!(c.kind, CertificateKind::ExhYes);
        assert_eq!(c.witness_m, Some(8));
        assert!(c.replay(&phi, &OmegaSet::all()));
    }

    #[test]
    fn evens_are_not_density_small() {
        let phi = Submeasure::<Q>::AsymptoticDensity;
        let evens = OmegaSet::program(Formula::Evens);
        let c = exh_certificate(&phi, &evens, &q(1, 4), &[(8, 64), (16, 64), (32, 128)]).unwrap();
        assert_eq!(c.kind, CertificateKind::ExhNo);
        assert!(c.block_bounds.iter().all(|b| b.value == q(1, 2)));
        assert!(c.replay(&phi, &evens));
    }

    #[test]
    fn empty_tails_give_no_evidence() {
        let phi = Submeasure::<Q>::TraceNull;
        let c = exh_certificate(&phi, &OmegaSet::all(), &q(1, 2), &[(5, 5), (9, 9)]).unwrap();
        assert_eq!(c.kind, CertificateKind::Unknown);
    }

    #[test]
    fn malformed_schedules() {
        let phi = Submeasure::<Q>::TraceNull;
        assert!(exh_certificate(&phi, &OmegaSet::all(), &q(1, 2), &[]).is_err());
        assert!(exh_certificate(&phi, &OmegaSet::all(), &q(1, 2), &[(5, 4)]).is_err());
    }

    #[test]
    fn squares_not_in_fin() {
        let c = membership(&Submeasure::<Q>::fin(), &OmegaSet::program(Formula::Squares), &q(1, 10), 4096).unwrap();
        assert_eq!(c.kind, CertificateKind::ExhNo);
    }

    #[test]
    fn finite_sets_decided() {
        let phi = Submeasure::<Q>::AsymptoticDensity;
        let c = membership(&phi, &OmegaSet::finite([3, 9]), &q(1, 10), 100).unwrap();
        assert_eq!(c.kind, CertificateKind::FinYes);
        let c = membership(&phi, &OmegaSet::finite([0]), &q(1, 10), 100).unwrap();
        assert_eq!(c.kind, CertificateKind::ZeroYes);
    }

    #[test]
    fn witnesses() {
        let counting = Submeasure::<Q>::summable(WeightFn::counting());
        match unbounded_witness(&counting, &OmegaSet::all(), &q(5, 1), 100) {
            WitnessOutcome::Found { set, .. } => assert_eq!(set, (0..5).collect()),
            other => panic!("{other:?}"),
        }
        match unbounded_witness(&Submeasure::<Q>::AsymptoticDensity, &OmegaSet::all(), &q(2, 1), 4096) {
            WitnessOutcome::Failure { best, .. } => assert_eq!(best, q(1, 1)),
            other => panic!("{other:?}"),
        }
        let harmonic = Submeasure::<Q>::summable(WeightFn::reciprocal());
        match unbounded_witness(&harmonic, &OmegaSet::program(Formula::Evens), &q(2, 1), 1_000_000) {
            WitnessOutcome::Found { set, value } => {
                assert!(set.iter().all(|x| x % 2 == 0));
                assert!(value >= q(2, 1));
                let shorter: FinSet = set.iter().copied().take(set.len() - 1).collect();
                assert!(harmonic.eval_finite(&shorter) < q(2, 1));
            }
            other => panic!("{other:?}"),
        }
    }
}
