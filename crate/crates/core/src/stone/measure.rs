use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::omega::{FinSet, OmegaSet};
use crate::scalar::{serde_scalar, Scalar};

/// A point of `ω ∪ {p}`. Written as a decimal numeral or the letter `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Point {
    Nat(u64),
    P,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Nat(n) => write!(f, "{n}"),
            Point::P => f.write_str("p"),
        }
    }
}

impl FromStr for Point {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "p" => Ok(Point::P),
            t => t.parse().map(Point::Nat).map_err(|_| crate::Error::InvalidInput(format!("bad point {s:?}"))),
        }
    }
}

impl Serialize for Point {
    fn serialize<Z: serde::Serializer>(&self, z: Z) -> std::result::Result<Z::Ok, Z::Error> {
        z.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// the base itself, a member of the ideal
    Small,
    /// the complement of the base together with `p`
    Cosmall,
}

/// An element of the algebra `ℱ ∪ ℱ*`, coded by a set in the ideal and a polarity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClopenCode {
    pub polarity: Polarity,
    pub base: OmegaSet,
    /// name of the ideal certifying `base`; absent means the base is finite
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<String>,
}

impl ClopenCode {
    pub fn small(base: OmegaSet) -> Self {
        ClopenCode { polarity: Polarity::Small, base, ideal: None }
    }

    pub fn cosmall(base: OmegaSet) -> Self {
        ClopenCode { polarity: Polarity::Cosmall, base, ideal: None }
    }

    pub fn small_finite<I: IntoIterator<Item = u64>>(it: I) -> Self {
        Self::small(OmegaSet::finite(it))
    }

    pub fn cosmall_finite<I: IntoIterator<Item = u64>>(it: I) -> Self {
        Self::cosmall(OmegaSet::finite(it))
    }

    pub fn whole() -> Self {
        Self::cosmall(OmegaSet::empty())
    }

    pub fn nothing() -> Self {
        Self::small(OmegaSet::empty())
    }

    pub fn with_ideal(mut self, name: impl Into<String>) -> Self {
        self.ideal = Some(name.into());
        self
    }

    pub fn contains(&self, x: Point) -> bool {
        match (self.polarity, x) {
            (Polarity::Small, Point::P) => false,
            (Polarity::Cosmall, Point::P) => true,
            (Polarity::Small, Point::Nat(n)) => self.base.contains(n),
            (Polarity::Cosmall, Point::Nat(n)) => !self.base.contains(n),
        }
    }

    pub fn complement(&self) -> Self {
        let polarity = match self.polarity {
            Polarity::Small => Polarity::Cosmall,
            Polarity::Cosmall => Polarity::Small,
        };
        ClopenCode { polarity, base: self.base.clone(), ideal: self.ideal.clone() }
    }

    pub fn meet(&self, other: &ClopenCode) -> Self {
        use Polarity::*;
        let ideal = self.ideal.clone().or_else(|| other.ideal.clone());
        let (polarity, base) = match (self.polarity, other.polarity) {
            (Small, Small) => (Small, self.base.intersect(&other.base)),
            (Small, Cosmall) => (Small, self.base.minus(&other.base)),
            (Cosmall, Small) => (Small, other.base.minus(&self.base)),
            (Cosmall, Cosmall) => (Cosmall, self.base.union(&other.base)),
        };
        ClopenCode { polarity, base, ideal }
    }

    pub fn join(&self, other: &ClopenCode) -> Self {
        self.complement().meet(&other.complement()).complement()
    }

    /// `self ∖ other`
    pub fn minus(&self, other: &ClopenCode) -> Self {
        self.meet(&other.complement())
    }

    pub fn is_small(&self) -> bool {
        self.polarity == Polarity::Small
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()
    }
}

/// A finitely supported signed measure on `ω ∪ {p}`; zero weights are never stored.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct FinMeasure<S: Scalar> {
    #[serde(with = "serde_scalar::map")]
    pub weights: BTreeMap<Point, S>,
}

impl<S: Scalar> Default for FinMeasure<S> {
    fn default() -> Self {
        FinMeasure { weights: BTreeMap::new() }
    }
}

impl<S: Scalar> FinMeasure<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_weights<I: IntoIterator<Item = (Point, S)>>(it: I) -> Self {
        let mut m = Self::zero();
        for (x, w) in it {
            m.add_at(x, w);
        }
        m
    }

    pub fn dirac(x: Point, w: S) -> Self {
        Self::from_weights([(x, w)])
    }

    pub fn add_at(&mut self, x: Point, w: S) {
        let v = self.weights.remove(&x).unwrap_or_else(S::zero) + w;
        if !v.is_zero() {
            self.weights.insert(x, v);
        }
    }

    pub fn weight(&self, x: Point) -> S {
        self.weights.get(&x).cloned().unwrap_or_else(S::zero)
    }

    pub fn p_weight(&self) -> S {
        self.weight(Point::P)
    }

    pub fn support(&self) -> impl Iterator<Item = Point> + '_ {
        self.weights.keys().copied()
    }

    /// Support points in ω.
    pub fn support_in_omega(&self) -> FinSet {
        self.weights
            .keys()
            .filter_map(|x| match x {
                Point::Nat(n) => Some(*n),
                Point::P => None,
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.values().all(|w| !w.is_negative())
    }

    /// `Σ |weights|`
    pub fn norm(&self) -> S {
        self.weights.values().fold(S::zero(), |a, w| a + w.abs())
    }

    pub fn total(&self) -> S {
        self.weights.values().fold(S::zero(), |a, w| a + w.clone())
    }

    pub fn eval(&self, a: &ClopenCode) -> S {
        self.weights.iter().filter(|(x, _)| a.contains(**x)).fold(S::zero(), |acc, (_, w)| acc + w.clone())
    }

    pub fn eval_points(&self, f: &FinSet) -> S {
        f.iter().fold(S::zero(), |a, &n| a + self.weight(Point::Nat(n)))
    }

    pub fn restrict(&self, a: &ClopenCode) -> Self {
        FinMeasure {
            weights: self.weights.iter().filter(|(x, _)| a.contains(**x)).map(|(x, w)| (*x, w.clone())).collect(),
        }
    }

    /// The measure with the atom at `p` removed.
    pub fn off_p(&self) -> Self {
        let mut m = self.clone();
        m.weights.remove(&Point::P);
        m
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_weights(self.weights.iter().map(|(x, w)| (*x, w.clone() * c.clone())))
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (x, w) in &other.weights {
            m.add_at(*x, w.clone());
        }
        m
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scale(&-S::one()))
    }

    /// The positive support in ω with its mass, and the negative support with its signed mass.
    pub fn hahn_parts(&self) -> ((FinSet, S), (FinSet, S)) {
        let mut pos = (FinSet::new(), S::zero());
        let mut neg = (FinSet::new(), S::zero());
        for (x, w) in &self.weights {
            if let Point::Nat(n) = x {
                let side = if w.is_positive() { &mut pos } else { &mut neg };
                side.0.insert(*n);
                side.1 = side.1.clone() + w.clone();
            }
        }
        (pos, neg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.values().any(|w| w.is_zero()) {
            return invalid("measure weights must be nonzero");
        }
        Ok(())
    }
}

/// `μ(A)`, exact.
pub fn measure_eval<S: Scalar>(mu: &FinMeasure<S>, a: &ClopenCode) -> S {
    mu.eval(a)
}

pub fn restrict_measure<S: Scalar>(mu: &FinMeasure<S>, a: &ClopenCode) -> FinMeasure<S> {
    mu.restrict(a)
}

pub fn norm<S: Scalar>(mu: &FinMeasure<S>) -> S {
    mu.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(s: &str) -> Q {
        crate::scalar::parse_rational(s).unwrap()
    }

    fn sample() -> FinMeasure<Q> {
        FinMeasure::from_weights([(Point::Nat(3), q("2")), (Point::P, q("-1"))])
    }

    #[test]
    fn eval_examples() {
        let mu = sample();
        assert_eq!(measure_eval(&mu, &ClopenCode::cosmall_finite([3])), q("-1"));
        assert_eq!(measure_eval(&mu, &ClopenCode::whole()), q("1"));
        assert_eq!(measure_eval(&mu, &ClopenCode::small_finite([3])), q("2"));
    }

    #[test]
    fn restrict_examples() {
        let mu = sample();
        let r = restrict_measure(&mu, &ClopenCode::small_finite([3]));
        assert_eq!(r, FinMeasure::dirac(Point::Nat(3), q("2")));
        assert_eq!(norm(&r), q("2"));
        assert_eq!(restrict_measure(&mu, &ClopenCode::whole()), mu);
        let nu = FinMeasure::from_weights([(Point::Nat(1), q("3")), (Point::Nat(2), q("1")), (Point::P, q("-1"))]);
        let r = restrict_measure(&nu, &ClopenCode::cosmall_finite([1]));
        assert_eq!(r, FinMeasure::from_weights([(Point::Nat(2), q("1")), (Point::P, q("-1"))]));
        assert_eq!(r.norm(), q("2"));
    }

    #[test]
    fn json_shape() {
        let mu = sample();
        let v = serde_json::to_value(&mu).unwrap();
        assert_eq!(v, serde_json::json!({"weights": {"3": "2/1", "p": "-1/1"}}));
        let back: FinMeasure<Q> =
            serde_json::from_value(serde_json::json!({"weights": {"3": "2/1", "p": "-1/1"}})).unwrap();
        assert_eq!(back, mu);
    }

    #[test]
    fn polarity_invariants() {
        let s = ClopenCode::small(OmegaSet::program(crate::omega::Formula::Evens));
        assert!(!s.contains(Point::P));
        assert!(s.complement().contains(Point::P));
        assert_eq!(s.complement().complement(), s);
        let c = ClopenCode::cosmall_finite([1, 2]);
        let m = s.meet(&c);
        assert!(m.is_small());
        assert!(m.contains(Point::Nat(4)) && !m.contains(Point::Nat(2)));
        let j = s.join(&c);
        assert!(!j.is_small());
        assert!(j.contains(Point::Nat(2)) && !j.contains(Point::Nat(1)));
    }

    #[test]
    fn zero_weights_are_dropped() {
        let mut m = sample();
        m.add_at(Point::P, q("1"));
        assert_eq!(m.p_weight(), q("0"));
        assert_eq!(m.support().count(), 1);
    }
}
