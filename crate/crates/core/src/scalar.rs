use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Ordered field used for every measure and submeasure value.
///
/// The exact instance is [`BigRational`]; `f64` is accepted for quick
/// exploratory runs but strict comparisons on it are only approximate.
pub trait Scalar: Clone + Debug + Display + PartialOrd + Signed + Send + Sync + 'static {
    const EXACT: bool;

    fn from_rational(q: &BigRational) -> Self;
    fn to_rational(&self) -> Option<BigRational>;
    fn to_f64(&self) -> f64;

    /// Canonical text form, `"p/q"` for exact scalars.
    fn to_exact_string(&self) -> String;

    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()))
    }

    fn from_u64(n: u64) -> Self {
        Self::from_rational(&BigRational::from_integer(n.into()))
    }

    fn from_usize(n: usize) -> Self {
        Self::from_u64(n as u64)
    }

    /// `2^e` for any integer exponent.
    fn pow2(e: i64) -> Self {
        let p = BigInt::one() << e.unsigned_abs();
        let q = if e >= 0 { BigRational::from_integer(p) } else { BigRational::new(BigInt::one(), p) };
        Self::from_rational(&q)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_exact_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_exact_string(&self) -> String {
        format!("{self}")
    }
}

/// Parses `"p/q"`, `"p"` or a terminating decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let mut num: BigInt = digits.parse().ok()?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac.len());
        return Some(BigRational::new(num, den));
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

pub fn parse_scalar<S: Scalar>(s: &str) -> Option<S> {
    parse_rational(s).map(|q| S::from_rational(&q))
}

/// Serde adapters writing scalars as `"p/q"` strings.
pub mod serde_scalar {
    use super::{parse_scalar, Scalar};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Scalar, Z: Serializer>(v: &S, z: Z) -> Result<Z::Ok, Z::Error> {
        z.serialize_str(&v.to_exact_string())
    }

    pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> Result<S, D::Error> {
        let s = String::deserialize(d)?;
        parse_scalar(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }

    pub mod vec {
        use super::super::{parse_scalar, Scalar};
        use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Scalar, Z: Serializer>(v: &[S], z: Z) -> Result<Z::Ok, Z::Error> {
            let mut seq = z.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&x.to_exact_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> Result<Vec<S>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter().map(|s| parse_scalar(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))).collect()
        }
    }

    /// Maps with keys written through `Display`/`FromStr`, as JSON objects require.
    pub mod map {
        use std::collections::BTreeMap;
        use std::fmt::Display;
        use std::str::FromStr;

        use super::super::{parse_scalar, Scalar};
        use serde::{de::Error, ser::SerializeMap, Deserialize, Deserializer, Serializer};

        pub fn serialize<K, S, Z>(v: &BTreeMap<K, S>, z: Z) -> Result<Z::Ok, Z::Error>
        where
            K: Display,
            S: Scalar,
            Z: Serializer,
        {
            let mut m = z.serialize_map(Some(v.len()))?;
            for (k, x) in v {
                m.serialize_entry(&k.to_string(), &x.to_exact_string())?;
            }
            m.end()
        }

        pub fn deserialize<'de, K, S, D>(d: D) -> Result<BTreeMap<K, S>, D::Error>
        where
            K: FromStr + Ord,
            S: Scalar,
            D: Deserializer<'de>,
        {
            let raw = BTreeMap::<String, String>::deserialize(d)?;
            let mut out = BTreeMap::new();
            for (k, v) in raw {
                let key = k.parse().map_err(|_| D::Error::custom(format!("bad key {k:?}")))?;
                let val = parse_scalar(&v).ok_or_else(|| D::Error::custom(format!("bad rational {v:?}")))?;
                out.insert(key, val);
            }
            Ok(out)
        }
    }

    pub mod opt {
        use super::super::{parse_scalar, Scalar};
        use serde::{de::Error, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Scalar, Z: Serializer>(v: &Option<S>, z: Z) -> Result<Z::Ok, Z::Error> {
            match v {
                Some(x) => z.serialize_some(&x.to_exact_string()),
                None => z.serialize_none(),
            }
        }

        pub fn deserialize<'de, S: Scalar, D: Deserializer<'de>>(d: D) -> Result<Option<S>, D::Error> {
            match Option::<String>::deserialize(d)? {
                None => Ok(None),
                Some(s) => parse_scalar(&s).map(Some).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))),
            }
        }
    }
}

pub fn sum<S: Scalar, I: IntoIterator<Item = S>>(it: I) -> S {
    it.into_iter().fold(S::zero(), |a, b| a + b)
}

pub fn sup<S: Scalar, I: IntoIterator<Item = S>>(it: I) -> S {
    it.into_iter().fold(S::zero(), S::max_of)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(parse_rational("3/6"), Some(q(1, 2)));
        assert_eq!(parse_rational("-7"), Some(q(-7, 1)));
        assert_eq!(parse_rational("0.25"), Some(q(1, 4)));
        assert_eq!(parse_rational("-1.5"), Some(q(-3, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn pow2_both_signs() {
        assert_eq!(BigRational::pow2(3), BigRational::from_integer(8.into()));
        assert_eq!(BigRational::pow2(-2), BigRational::new(1.into(), 4.into()));
        assert_eq!(<f64 as Scalar>::pow2(-1), 0.5);
    }

    #[test]
    fn exact_string_always_has_denominator() {
        assert_eq!(BigRational::from_u64(2).to_exact_string(), "2/1");
        assert_eq!(BigRational::from_frac(-2, 4).to_exact_string(), "-1/2");
    }
}
