//! Lebesgue measure of unions of basic cylinders in Cantor space.

use std::collections::HashSet;

use crate::error::{invalid, Result};
use crate::omega::FinSet;
use crate::scalar::Scalar;

/// Length-lexicographic enumeration of binary strings: `n+1` in binary without its leading 1.
pub fn length_lex_string(n: u64) -> String {
    let m = n as u128 + 1;
    let len = 127 - m.leading_zeros();
    (0..len).rev().map(|i| if (m >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn length_lex_index(s: &str) -> Result<u64> {
    if s.len() > 63 || s.chars().any(|c| c != '0' && c != '1') {
        return invalid(format!("not a short binary string: {s:?}"));
    }
    let mut m: u64 = 1;
    for c in s.chars() {
        m = (m << 1) | (c == '1') as u64;
    }
    Ok(m - 1)
}

/// Drops every string that extends another string of the family.
pub fn minimal_strings<'a>(strings: impl IntoIterator<Item = &'a str>) -> Vec<&'a str> {
    let mut sorted: Vec<&str> = strings.into_iter().collect();
    sorted.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    sorted.dedup();
    let mut kept: HashSet<&str> = HashSet::new();
    let mut out = Vec::new();
    for s in sorted {
        if !(0..=s.len()).any(|l| kept.contains(&s[..l])) {
            kept.insert(s);
            out.push(s);
        }
    }
    out
}

/// `λ(⋃_{s∈S} [s])`, exact.
pub fn cylinder_measure<'a, S: Scalar>(strings: impl IntoIterator<Item = &'a str>) -> Result<S> {
    let strings: Vec<&str> = strings.into_iter().collect();
    if let Some(bad) = strings.iter().find(|s| s.chars().any(|c| c != '0' && c != '1')) {
        return invalid(format!("not a binary string: {bad:?}"));
    }
    Ok(minimal_strings(strings).into_iter().fold(S::zero(), |a, s| a + S::pow2(-(s.len() as i64))))
}

/// Same measure with strings coded as naturals through the length-lexicographic bijection.
pub fn trace_eval<S: Scalar>(f: &FinSet) -> S {
    // (length, bits) pairs; a prefix of (l, b) at length k is (k, b >> (l - k))
    let mut codes: Vec<(u32, u64)> = f
        .iter()
        .map(|&n| {
            let m = n as u128 + 1;
            let len = 127 - m.leading_zeros();
            (len, (m - (1u128 << len)) as u64)
        })
        .collect();
    codes.sort();
    let mut kept: HashSet<(u32, u64)> = HashSet::new();
    let mut total = S::zero();
    for (len, bits) in codes {
        let covered = (0..=len).any(|k| kept.contains(&(k, if len == k { bits } else { bits >> (len - k) })));
        if !covered {
            kept.insert((len, bits));
            total = total + S::pow2(-(len as i64));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn bijection() {
        let first: Vec<String> = (0..7).map(length_lex_string).collect();
        assert_eq!(first, ["", "0", "1", "00", "01", "10", "11"]);
        for n in 0..200 {
            assert_eq!(length_lex_index(&length_lex_string(n)).unwrap(), n);
        }
    }

    #[test]
    fn cylinder_examples() {
        assert_eq!(cylinder_measure::<Q>(["0", "01"]).unwrap(), Q::from_frac(1, 2));
        assert_eq!(cylinder_measure::<Q>(["00", "11"]).unwrap(), Q::from_frac(1, 2));
        assert_eq!(cylinder_measure::<Q>([""]).unwrap(), Q::from_u64(1));
        assert!(cylinder_measure::<Q>(["012"]).is_err());
    }

    #[test]
    fn coded_matches_native() {
        let f: FinSet = [1, 4, 5, 6, 20].into_iter().collect();
        let strings: Vec<String> = f.iter().map(|&n| length_lex_string(n)).collect();
        let native: Q = cylinder_measure(strings.iter().map(|s| s.as_str())).unwrap();
        assert_eq!(trace_eval::<Q>(&f), native);
    }
}
