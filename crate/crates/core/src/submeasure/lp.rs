use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Submeasure;
use crate::error::{Error, Result};
use crate::omega::FinSet;
use crate::scalar::{serde_scalar, Scalar};

pub const MAX_NONPATH_SIZE: usize = 15;

/// Degenerate pivots in a row before switching from Dantzig pricing to Bland's rule.
const DEGENERATE_STREAK: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct NonpathReport<S: Scalar> {
    pub set: FinSet,
    #[serde(with = "serde_scalar")]
    pub value: S,
    /// `max μ(F)` over non-negative measures `μ ≤ φ` on the subsets of `F`
    #[serde(with = "serde_scalar")]
    pub best_measure: S,
    #[serde(with = "serde_scalar")]
    pub gap: S,
    /// an optimal measure, by point
    #[serde(with = "serde_scalar::map")]
    pub witness: BTreeMap<u64, S>,
    pub pivots: usize,
}

/// Column of the covering program: a surplus variable `s_i` or a subset `E` (bitmask).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Col {
    Surplus(usize),
    Subset(u32),
}

impl Col {
    fn key(self, k: usize) -> u64 {
        match self {
            Col::Surplus(i) => i as u64,
            Col::Subset(e) => k as u64 + e as u64,
        }
    }

    fn vector<S: Scalar>(self, k: usize) -> Vec<S> {
        (0..k)
            .map(|i| match self {
                Col::Surplus(j) if j == i => -S::one(),
                Col::Surplus(_) => S::zero(),
                Col::Subset(e) if e >> i & 1 == 1 => S::one(),
                Col::Subset(_) => S::zero(),
            })
            .collect()
    }
}

/// `φ(F) − max{μ(F) : μ ≥ 0 a measure with μ(E) ≤ φ(E) for all E ⊆ F}`.
///
/// Solved through the covering dual `min Σ_E φ(E)·y_E` subject to `Σ_{E∋i} y_E ≥ 1`, `y ≥ 0`, by a
/// revised simplex started from the singleton basis; the optimal simplex multipliers are the measure.
pub fn nonpath_gap<S: Scalar>(phi: &Submeasure<S>, f: &FinSet) -> Result<NonpathReport<S>> {
    let k = f.len();
    if k > MAX_NONPATH_SIZE {
        return Err(Error::TooLarge(format!("|F| = {k} exceeds {MAX_NONPATH_SIZE}")));
    }
    let points: Vec<u64> = f.iter().copied().collect();
    let full = (1u32 << k) - 1;
    let table: Vec<S> = (0..=full)
        .map(|mask| {
            let sub: FinSet = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| points[i]).collect();
            phi.eval_finite(&sub)
        })
        .collect();
    let value = table[full as usize].clone();
    if k == 0 {
        return Ok(NonpathReport {
            set: f.clone(),
            value: value.clone(),
            best_measure: S::zero(),
            gap: value,
            witness: BTreeMap::new(),
            pivots: 0,
        });
    }

    let mut basis: Vec<Col> = (0..k).map(|i| Col::Subset(1 << i)).collect();
    let mut binv: Vec<Vec<S>> =
        (0..k).map(|r| (0..k).map(|c| if r == c { S::one() } else { S::zero() }).collect()).collect();
    let mut xb: Vec<S> = vec![S::one(); k];
    let cost = |c: Col| match c {
        Col::Surplus(_) => S::zero(),
        Col::Subset(e) => table[e as usize].clone(),
    };
    let mut pivots = 0usize;
    let mut streak = 0usize;
    let pi = loop {
        // π = c_B · B⁻¹
        let cb: Vec<S> = basis.iter().map(|&c| cost(c)).collect();
        let pi: Vec<S> =
            (0..k).map(|j| (0..k).fold(S::zero(), |a, r| a + cb[r].clone() * binv[r][j].clone())).collect();
        // π(E) for every subset, by adding one point at a time
        let mut pi_sum: Vec<S> = Vec::with_capacity(full as usize + 1);
        pi_sum.push(S::zero());
        for mask in 1..=full {
            let low = mask.trailing_zeros() as usize;
            let prev = pi_sum[(mask & (mask - 1)) as usize].clone();
            pi_sum.push(prev + pi[low].clone());
        }
        let bland = streak >= DEGENERATE_STREAK;
        let mut entering: Option<(Col, S)> = None;
        let mut consider = |c: Col, rc: S| {
            if !rc.is_negative() {
                return false;
            }
            let better = match &entering {
                None => true,
                Some((_, best)) => !bland && rc < *best,
            };
            if better {
                entering = Some((c, rc));
            }
            bland
        };
        'price: {
            for i in 0..k {
                if consider(Col::Surplus(i), pi[i].clone()) {
                    break 'price;
                }
            }
            for mask in 1..=full {
                let rc = table[mask as usize].clone() - pi_sum[mask as usize].clone();
                if consider(Col::Subset(mask), rc) {
                    break 'price;
                }
            }
        }
        let Some((enter, _)) = entering else { break pi };

        let a: Vec<S> = enter.vector(k);
        let d: Vec<S> =
            (0..k).map(|r| (0..k).fold(S::zero(), |acc, j| acc + binv[r][j].clone() * a[j].clone())).collect();
        let mut leave: Option<(usize, S)> = None;
        for r in 0..k {
            if d[r].is_positive() {
                let ratio = xb[r].clone() / d[r].clone();
                let take = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r].key(k) < basis[*lr].key(k)),
                };
                if take {
                    leave = Some((r, ratio));
                }
            }
        }
        let (r, theta) = leave.expect("the covering program is bounded below by zero");
        streak = if theta.is_zero() { streak + 1 } else { 0 };
        for i in 0..k {
            if i != r {
                xb[i] = xb[i].clone() - theta.clone() * d[i].clone();
            }
        }
        xb[r] = theta;
        let pivot = d[r].clone();
        let row_r: Vec<S> = binv[r].iter().map(|v| v.clone() / pivot.clone()).collect();
        for i in 0..k {
            if i != r && !d[i].is_zero() {
                for j in 0..k {
                    binv[i][j] = binv[i][j].clone() - d[i].clone() * row_r[j].clone();
                }
            }
        }
        binv[r] = row_r;
        basis[r] = enter;
        pivots += 1;
    };
    let best_measure = pi.iter().fold(S::zero(), |a, v| a + v.clone());
    let gap = value.clone() - best_measure.clone();
    let witness = points.iter().copied().zip(pi).collect();
    Ok(NonpathReport { set: f.clone(), value, best_measure, gap, witness, pivots })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::submeasure::{DensityBlocks, Layout, MassFormula, WeightFn};
    use num_rational::BigRational;
    use num_traits::{Signed, Zero};

    type Q = BigRational;

    fn q(a: i64, b: i64) -> Q {
        Q::from_frac(a, b)
    }

    /// Solves the square system `M x = b` exactly; `None` when singular.
    fn solve(mut m: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
        let n = b.len();
        for c in 0..n {
            let p = (c..n).find(|&r| !m[r][c].is_zero())?;
            m.swap(c, p);
            b.swap(c, p);
            for r in 0..n {
                if r != c && !m[r][c].is_zero() {
                    let f = m[r][c].clone() / m[c][c].clone();
                    for j in c..n {
                        let v = m[c][j].clone() * f.clone();
                        m[r][j] = m[r][j].clone() - v;
                    }
                    b[r] = b[r].clone() - b[c].clone() * f;
                }
            }
        }
        Some((0..n).map(|i| b[i].clone() / m[i][i].clone()).collect())
    }

    /// Maximum of `Σ x` over the primal polytope by enumerating its vertices.
    fn vertex_oracle(phi: &Submeasure<Q>, f: &FinSet) -> Q {
        let pts: Vec<u64> = f.iter().copied().collect();
        let k = pts.len();
        // rows: x_i ≥ 0 written as -x_i ≤ 0, then Σ_{i∈E} x_i ≤ φ(E)
        let mut rows: Vec<(Vec<Q>, Q)> =
            (0..k).map(|i| ((0..k).map(|j| if i == j { q(-1, 1) } else { q(0, 1) }).collect(), q(0, 1))).collect();
        for mask in 1u32..1 << k {
            let sub: FinSet = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| pts[i]).collect();
            rows.push((
                (0..k).map(|i| if mask >> i & 1 == 1 { q(1, 1) } else { q(0, 1) }).collect(),
                phi.eval_finite(&sub),
            ));
        }
        let mut best: Option<Q> = None;
        let n = rows.len();
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            let m: Vec<Vec<Q>> = pick.iter().map(|&i| rows[i].0.clone()).collect();
            let b: Vec<Q> = pick.iter().map(|&i| rows[i].1.clone()).collect();
            if let Some(x) = solve(m, b) {
                let feasible = rows
                    .iter()
                    .all(|(a, c)| a.iter().zip(&x).fold(q(0, 1), |s, (u, v)| s + u.clone() * v.clone()) <= *c);
                if feasible {
                    let total = x.iter().fold(q(0, 1), |s, v| s + v.clone());
                    if best.as_ref().is_none_or(|b| total > *b) {
                        best = Some(total);
                    }
                }
            }
            // next k-combination of 0..n
            let mut i = k;
            loop {
                if i == 0 {
                    return best.expect("the origin is a vertex");
                }
                i -= 1;
                if pick[i] < n - k + i {
                    pick[i] += 1;
                    for j in i + 1..k {
                        pick[j] = pick[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    fn pathological() -> Submeasure<Q> {
        Submeasure::table(vec![0, 1, 2], vec![q(0, 1), q(1, 1), q(1, 1), q(1, 1), q(1, 1), q(1, 1), q(1, 1), q(2, 1)])
            .unwrap()
    }

    #[test]
    fn pathological_fixture() {
        let f: FinSet = [0, 1, 2].into_iter().collect();
        let r = nonpath_gap(&pathological(), &f).unwrap();
        assert_eq!(r.gap, q(1, 2));
        assert_eq!(vertex_oracle(&pathological(), &f), q(3, 2));
    }

    #[test]
    fn counting_measure_has_no_gap() {
        let phi = Submeasure::<Q>::summable(WeightFn::counting());
        let r = nonpath_gap(&phi, &[0, 1, 2].into_iter().collect()).unwrap();
        assert_eq!(r.gap, q(0, 1));
    }

    #[test]
    fn agrees_with_vertex_enumeration() {
        let families = [
            Submeasure::<Q>::TraceNull,
            Submeasure::erdos_ulam(WeightFn::reciprocal()),
            Submeasure::AsymptoticDensity,
            Submeasure::density(DensityBlocks::generated(
                Layout::Intervals { length: 3, start: 0 },
                MassFormula::new(q(1, 1), 1, 2, q(1, 1)),
            )),
            pathological(),
        ];
        let sets: [&[u64]; 5] = [&[0, 1, 2], &[1, 2, 3, 4], &[0, 4, 5, 6], &[2, 3, 7], &[0, 1, 2, 3]];
        for phi in &families {
            for s in sets {
                let f: FinSet = s.iter().copied().collect();
                let r = nonpath_gap(phi, &f).unwrap();
                assert_eq!(r.best_measure, vertex_oracle(phi, &f), "{phi:?} on {s:?}");
                assert!(!r.gap.is_negative());
            }
        }
    }

    #[test]
    fn witness_is_dominated() {
        let phi = Submeasure::<Q>::erdos_ulam(WeightFn::counting());
        let f: FinSet = [1, 3, 4, 8, 9, 10].into_iter().collect();
        let r = nonpath_gap(&phi, &f).unwrap();
        let pts: Vec<u64> = f.iter().copied().collect();
        for mask in 1u32..1 << pts.len() {
            let sub: FinSet = (0..pts.len()).filter(|i| mask >> i & 1 == 1).map(|i| pts[i]).collect();
            let mu = sub.iter().fold(q(0, 1), |a, x| a + r.witness[x].clone());
            assert!(mu <= phi.eval_finite(&sub));
        }
        assert!(r.witness.values().all(|v| !v.is_negative()));
    }

    #[test]
    fn size_cap() {
        let f: FinSet = (0..16).collect();
        assert!(matches!(nonpath_gap(&Submeasure::<Q>::TraceNull, &f), Err(Error::TooLarge(_))));
    }
}
