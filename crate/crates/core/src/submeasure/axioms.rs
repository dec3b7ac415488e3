use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Submeasure;
use crate::omega::FinSet;
use crate::scalar::{serde_scalar, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomKind {
    EmptyNonzero,
    Monotonicity,
    Subadditivity,
}

/// A failing pair, shrunk until no single point can be dropped.
///
/// For monotonicity `left ⊆ right` and `φ(left) > φ(right)`; for subadditivity
/// `φ(left ∪ right) > φ(left) + φ(right)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AxiomViolation<S: Scalar> {
    pub kind: AxiomKind,
    pub left: FinSet,
    pub right: FinSet,
    #[serde(with = "serde_scalar::vec")]
    pub values: Vec<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct AxiomReport<S: Scalar> {
    pub samples: usize,
    pub checks: usize,
    pub violation: Option<AxiomViolation<S>>,
}

impl<S: Scalar> AxiomReport<S> {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

fn violates<S: Scalar>(phi: &Submeasure<S>, kind: AxiomKind, l: &FinSet, r: &FinSet) -> Option<Vec<S>> {
    match kind {
        AxiomKind::EmptyNonzero => {
            let v = phi.eval_finite(&FinSet::new());
            (!v.is_zero()).then(|| vec![v])
        }
        AxiomKind::Monotonicity => {
            let (a, b) = (phi.eval_finite(l), phi.eval_finite(r));
            (l.is_subset(r) && a > b).then(|| vec![a, b])
        }
        AxiomKind::Subadditivity => {
            let u: FinSet = l.union(r).copied().collect();
            let (a, b, c) = (phi.eval_finite(l), phi.eval_finite(r), phi.eval_finite(&u));
            (c > a.clone() + b.clone()).then(|| vec![c, a, b])
        }
    }
}

fn shrink<S: Scalar>(phi: &Submeasure<S>, kind: AxiomKind, mut l: FinSet, mut r: FinSet) -> AxiomViolation<S> {
    loop {
        let mut progressed = false;
        for x in l.clone() {
            let mut l2 = l.clone();
            l2.remove(&x);
            let mut r2 = r.clone();
            if kind == AxiomKind::Monotonicity {
                r2.remove(&x);
            }
            if violates(phi, kind, &l2, &r2).is_some() {
                l = l2;
                r = r2;
                progressed = true;
            }
        }
        for x in r.clone() {
            if kind == AxiomKind::Monotonicity && l.contains(&x) {
                continue;
            }
            let mut r2 = r.clone();
            r2.remove(&x);
            if violates(phi, kind, &l, &r2).is_some() {
                r = r2;
                progressed = true;
            }
        }
        if !progressed {
            let values = violates(phi, kind, &l, &r).expect("shrinking keeps the violation");
            return AxiomViolation { kind, left: l, right: r, values };
        }
    }
}

fn random_set<R: Rng>(rng: &mut R, range: u64, max_size: usize) -> FinSet {
    let size = rng.gen_range(0..=max_size);
    (0..size).map(|_| rng.gen_range(0..range.max(1))).collect()
}

/// Samples pairs `F ⊆ G` and `(F, G)` from `[0, range)` and checks `φ(∅) = 0`, monotonicity and
/// subadditivity exactly, stopping at the first failure.
pub fn check_axioms<S: Scalar, R: Rng>(
    phi: &Submeasure<S>,
    rng: &mut R,
    samples: usize,
    range: u64,
    max_size: usize,
) -> AxiomReport<S> {
    let mut checks = 1;
    if let Some(values) = violates(phi, AxiomKind::EmptyNonzero, &FinSet::new(), &FinSet::new()) {
        return AxiomReport {
            samples: 0,
            checks,
            violation: Some(AxiomViolation {
                kind: AxiomKind::EmptyNonzero,
                left: FinSet::new(),
                right: FinSet::new(),
                values,
            }),
        };
    }
    for i in 0..samples {
        let f = random_set(rng, range, max_size);
        let extra = random_set(rng, range, max_size);
        let g: FinSet = f.union(&extra).copied().collect();
        checks += 2;
        if violates(phi, AxiomKind::Monotonicity, &f, &g).is_some() {
            let v = shrink(phi, AxiomKind::Monotonicity, f, g);
            return AxiomReport { samples: i + 1, checks, violation: Some(v) };
        }
        if violates(phi, AxiomKind::Subadditivity, &f, &extra).is_some() {
            let v = shrink(phi, AxiomKind::Subadditivity, f, extra);
            return AxiomReport { samples: i + 1, checks, violation: Some(v) };
        }
    }
    AxiomReport { samples, checks, violation: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submeasure::WeightFn;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Q = BigRational;

    #[test]
    fn standard_families_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for phi in [
            Submeasure::<Q>::AsymptoticDensity,
            Submeasure::summable(WeightFn::reciprocal()),
            Submeasure::erdos_ulam(WeightFn::reciprocal()),
            Submeasure::TraceNull,
        ] {
            assert!(check_axioms(&phi, &mut rng, 300, 64, 8).passed(), "{phi:?}");
        }
    }

    #[test]
    fn corrupted_table_is_caught_and_shrunk() {
        // φ({0,1}) = 3 > φ({0}) + φ({1}) = 2
        let phi =
            Submeasure::<Q>::table(vec![0, 1], vec![Q::from_u64(0), Q::from_u64(1), Q::from_u64(1), Q::from_u64(3)])
                .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = check_axioms(&phi, &mut rng, 2000, 4, 3);
        let v = r.violation.expect("violation found");
        assert_eq!(v.kind, AxiomKind::Subadditivity);
        let union: FinSet = v.left.union(&v.right).copied().collect();
        assert_eq!(union, [0, 1].into_iter().collect());
    }

    #[test]
    fn non_monotone_table() {
        let phi = Submeasure::<Q>::Table {
            domain: vec![0, 1],
            values: vec![Q::from_u64(0), Q::from_u64(2), Q::from_u64(0), Q::from_u64(1)],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = check_axioms(&phi, &mut rng, 2000, 3, 3).violation.unwrap();
        assert_eq!(v.kind, AxiomKind::Monotonicity);
        assert_eq!(v.left, [0].into_iter().collect());
        assert_eq!(v.right, [0, 1].into_iter().collect());
    }
}
