use serde::{Deserialize, Serialize};

use super::transcript::{SelectionStep, SelectionTranscript};
use crate::error::Result;
use crate::omega::{Chain, FinSet, OmegaSet, PartitionScheme};
use crate::scalar::Scalar;
use crate::submeasure::{unbounded_witness, Submeasure, WitnessOutcome};

/// Shortest initial segment of `pool` (increasing) whose value reaches `target`.
fn shortest_reaching<S: Scalar>(phi: &Submeasure<S>, pool: &[u64], target: &S) -> Option<(FinSet, S)> {
    let top = pool.last().map_or(0, |&x| x + 1);
    match unbounded_witness(phi, &OmegaSet::finite(pool.iter().copied()), target, top) {
        WitnessOutcome::Found { set, value } => Some((set, value)),
        WitnessOutcome::Failure { .. } => None,
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct PartitionSelection<S: Scalar> {
    pub chain: Chain,
    pub sets: Vec<FinSet>,
    /// step `ℓ` records the cell of level `ℓ` and `φ(F_ℓ)` against `ℓ + 1`
    pub transcript: SelectionTranscript<S>,
}

/// Walks down the scheme, at each level entering the child cell with the largest value on
/// `[0, budget)` (ties to the smaller index) and taking the shortest fresh initial segment
/// `F_ℓ` of the cell with `φ(F_ℓ) ≥ ℓ + 1`.
pub fn partition_unbounded_selection<S: Scalar>(
    phi: &Submeasure<S>,
    scheme: &PartitionScheme,
    depth: usize,
    budget: u64,
) -> Result<PartitionSelection<S>> {
    let mut cells = Vec::new();
    let mut sets = Vec::new();
    let mut used = FinSet::new();
    let mut transcript = SelectionTranscript::default();
    for level in 0..depth {
        let candidates = match cells.last() {
            None => (0..scheme.cells(0)?).collect(),
            Some(&c) => scheme.children(level - 1, c)?,
        };
        let part = scheme.level(level)?;
        let mut members: Vec<Vec<u64>> = vec![Vec::new(); candidates.len()];
        for n in 0..budget {
            let label = part.label(n);
            if let Some(i) = candidates.iter().position(|&c| c == label) {
                members[i].push(n);
            }
        }
        let mut best: Option<(usize, S)> = None;
        for (i, m) in members.iter().enumerate() {
            let v = phi.eval_finite(&m.iter().copied().collect());
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((i, v));
            }
        }
        let Some((i, _)) = best else {
            transcript = transcript.fail(level, budget, "the current cell has no children");
            break;
        };
        let cell = candidates[i];
        let pool: Vec<u64> = members[i].iter().copied().filter(|n| !used.contains(n)).collect();
        let threshold = S::from_usize(level + 1);
        let Some((set, value)) = shortest_reaching(phi, &pool, &threshold) else {
            transcript = transcript.fail(level, budget, "no fresh part of the cell reaches ℓ + 1");
            break;
        };
        used.extend(set.iter().copied());
        cells.push(cell);
        transcript.steps.push(SelectionStep {
            level,
            index: Some(cell as u64),
            sign: None,
            set: set.clone(),
            value,
            threshold,
        });
        sets.push(set);
    }
    Ok(PartitionSelection { chain: Chain { cells }, sets, transcript })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SignSelection<S: Scalar> {
    pub signs: Vec<i8>,
    pub sets: Vec<FinSet>,
    pub transcript: SelectionTranscript<S>,
}

/// Chooses `ε_n` by the larger value of the two sides on `[0, budget)` (ties to `+1`) and a fresh
/// `F_n ⊆ ⋂_{k≤n} A_k^{ε_k}` with `φ(F_n) ≥ n`.
pub fn sign_scheme_selection<S: Scalar>(
    phi: &Submeasure<S>,
    sets: &[OmegaSet],
    depth: usize,
    budget: u64,
) -> SignSelection<S> {
    let mut running: Vec<u64> = (0..budget).collect();
    let mut used = FinSet::new();
    let mut signs = Vec::new();
    let mut out = Vec::new();
    let mut transcript = SelectionTranscript::default();
    for level in 0..depth.min(sets.len()) {
        let a = &sets[level];
        let (plus, minus): (Vec<u64>, Vec<u64>) = running.iter().partition(|&&n| a.contains(n));
        let vp = phi.eval_finite(&plus.iter().copied().collect());
        let vm = phi.eval_finite(&minus.iter().copied().collect());
        let (sign, side) = if vp >= vm { (1i8, plus) } else { (-1i8, minus) };
        running = side;
        let pool: Vec<u64> = running.iter().copied().filter(|n| !used.contains(n)).collect();
        let threshold = S::from_usize(level);
        let Some((set, value)) = shortest_reaching(phi, &pool, &threshold) else {
            transcript = transcript.fail(level, budget, "no fresh part of the running intersection reaches n");
            break;
        };
        used.extend(set.iter().copied());
        signs.push(sign);
        transcript.steps.push(SelectionStep {
            level,
            index: None,
            sign: Some(sign),
            set: set.clone(),
            value,
            threshold,
        });
        out.push(set);
    }
    if transcript.failure.is_none() && sets.len() < depth {
        transcript = transcript.fail(sets.len(), budget, "fewer sets than the requested depth");
    }
    SignSelection { signs, sets: out, transcript }
}
