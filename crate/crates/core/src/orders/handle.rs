use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::hypergraph::{adl_ideal, adl_select, HyperBlocks};
use crate::omega::{BlockGen, BlockStream, Formula, OmegaSet};
use crate::scalar::{serde_scalar, Scalar};
use crate::submeasure::{membership, MembershipCertificate, Submeasure, WeightFn};

/// A named ideal `Exh(φ)` with sample members and the precision used for membership evidence.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct IdealHandle<S: Scalar> {
    pub name: String,
    pub submeasure: Submeasure<S>,
    pub generators: Vec<OmegaSet>,
    pub budget: u64,
    #[serde(with = "serde_scalar")]
    pub eps: S,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
}

impl<S: Scalar> IdealHandle<S> {
    pub fn new(name: impl Into<String>, submeasure: Submeasure<S>, generators: Vec<OmegaSet>, budget: u64) -> Self {
        IdealHandle {
            name: name.into(),
            submeasure,
            generators,
            budget,
            eps: S::from_frac(1, 10),
            description: String::new(),
        }
    }

    fn described(mut self, text: &str) -> Self {
        self.description = text.to_string();
        self
    }

    /// Membership evidence for `A` at `budget`, or at the handle's own budget.
    pub fn membership(&self, a: &OmegaSet, budget: Option<u64>) -> Result<MembershipCertificate<S>> {
        membership(&self.submeasure, a, &self.eps, budget.unwrap_or(self.budget))
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return invalid(format!("ideal name {:?} must be a nonempty [A-Za-z0-9_-] word", self.name));
        }
        if !self.eps.is_positive() {
            return invalid("eps must be positive");
        }
        self.submeasure.validate()?;
        self.generators.iter().try_for_each(|g| g.validate())
    }

    /// Checks that every generator certifies as a member.
    pub fn check_generators(&self) -> Result<Vec<MembershipCertificate<S>>> {
        self.generators.iter().map(|g| self.membership(g, None)).collect()
    }
}

fn program(f: Formula) -> OmegaSet {
    OmegaSet::program(f)
}

fn sparse_blocks(base: u64) -> OmegaSet {
    OmegaSet::Blocks(BlockStream::Generated { generator: BlockGen { base, len_mul: 1, len_add: 1 } })
}

fn thin_sets() -> Vec<OmegaSet> {
    vec![
        OmegaSet::finite(0..10),
        program(Formula::Squares),
        program(Formula::Cubes),
        program(Formula::PowersOfTwo),
        sparse_blocks(2),
    ]
}

/// The ideals shipped with the library.
pub fn builtin_catalog<S: Scalar>() -> Vec<IdealHandle<S>> {
    let fin_generators = vec![
        OmegaSet::empty(),
        OmegaSet::finite([0]),
        OmegaSet::finite(0..10),
        OmegaSet::finite([1, 2, 4, 8, 16]),
        OmegaSet::finite(100..200),
    ];
    let trace_generators = vec![
        OmegaSet::finite(0..10),
        program(Formula::PowersOfTwo),
        program(Formula::Cubes),
        OmegaSet::Blocks(BlockStream::Generated { generator: BlockGen { base: 4, len_mul: 0, len_add: 1 } }),
        program(Formula::Interval { start: 0, end: 100 }),
    ];
    let adl = adl_select(&HyperBlocks::adl_kneser(), 5, 64).expect("the Kneser blocks satisfy (*)");
    let adl_generators = vec![
        OmegaSet::finite(0..10),
        program(Formula::Evens),
        program(Formula::Squares),
        OmegaSet::interval(100, 10_000),
        program(Formula::PowersOfTwo),
    ];
    vec![
        IdealHandle::new("fin", Submeasure::fin(), fin_generators, 4096)
            .described("finite sets, as Exh of the singleton density"),
        IdealHandle::new("z", Submeasure::erdos_ulam(WeightFn::counting()), thin_sets(), 65536)
            .described("density zero sets, Erdős–Ulam presentation with constant weights"),
        IdealHandle::new("z_log", Submeasure::erdos_ulam(WeightFn::reciprocal()), thin_sets(), 1024)
            .described("logarithmic density zero sets, weights 1/(n+1)"),
        IdealHandle::new("summable_reciprocal", Submeasure::summable(WeightFn::reciprocal()), thin_sets(), 4096)
            .described("sets with Σ 1/(n+1) finite"),
        IdealHandle::new("phi_d", Submeasure::AsymptoticDensity, thin_sets(), 4096)
            .described("density zero sets, dyadic block presentation"),
        IdealHandle::new("trace_null", Submeasure::TraceNull, trace_generators, 1024)
            .described("trace of the null ideal through length-lex string coding"),
        IdealHandle::new("adl", adl_ideal(&adl, &OmegaSet::all()), adl_generators, 4096)
            .described("Kneser hypergraph ideal over the blocks selected at depth 5"),
    ]
}

pub fn builtin<S: Scalar>(name: &str) -> Option<IdealHandle<S>> {
    builtin_catalog().into_iter().find(|h| h.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn generators_are_members() {
        for h in builtin_catalog::<Q>() {
            h.validate().unwrap();
            assert!(h.generators.len() >= 5, "{}", h.name);
            for (g, c) in h.generators.iter().zip(h.check_generators().unwrap()) {
                assert!(c.kind.is_yes(), "{} {:?} {:?}", h.name, g, c.kind);
                assert!(c.replay(&h.submeasure, g));
            }
        }
    }

    #[test]
    fn handles_round_trip_json() {
        for h in builtin_catalog::<Q>() {
            let v = serde_json::to_value(&h).unwrap();
            let back: IdealHandle<Q> = serde_json::from_value(v.clone()).unwrap();
            assert_eq!(serde_json::to_value(&back).unwrap(), v);
        }
    }
}
