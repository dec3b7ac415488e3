use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::Result;
use clap::ValueEnum;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use idealab::constructions::{
    fin_to_exh, partition_unbounded_selection, sign_scheme_selection, snpp_decomposition, summable_extension,
};
use idealab::hypergraph::{npp_failure_witness, HyperBlocks, NppOutcome};
use idealab::omega::{FinSet, OmegaSet, PartitionScheme};
use idealab::stone::{
    anti_grothendieck_normalize, disjointify_pipeline, CaseRule, FinMeasure, MeasureStream, Schedule,
};
use idealab::submeasure::DensityBlocks;
use idealab::{ExactSubmeasure, Rational};

use crate::report::{Outcome, Status};
use crate::{field, field_or, lift, Globals};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Pipeline {
    Disjointify,
    AntiGrothendieck,
    Npp,
    SummableExt,
    PartitionSelect,
    SignSelect,
    FinExh,
    Snpp,
}

impl Pipeline {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(clap::Args, Debug)]
pub struct Args {
    pub pipeline: Pipeline,
    /// JSON input file
    #[arg(long)]
    pub input: PathBuf,
}

fn failure_or(complete: bool, ok: bool) -> Status {
    if !complete {
        Status::Failure
    } else if ok {
        Status::Verified
    } else {
        Status::Falsified
    }
}

pub fn run(p: Pipeline, input: &Value, g: &Globals) -> Result<Outcome> {
    match p {
        Pipeline::Disjointify => disjointify(input, g),
        Pipeline::AntiGrothendieck => {
            let measures: Vec<FinMeasure<Rational>> = field(input, "measures")?;
            let out = anti_grothendieck_normalize(&measures)?;
            let third = Rational::new(1.into(), 3.into());
            let ok = out.iter().all(|s| s.measure.norm().is_one() && s.value.abs() > third);
            Outcome::verified_if(ok, json!({ "normalized": out }))
        }
        Pipeline::Npp => {
            let blocks: HyperBlocks = field(input, "blocks")?;
            let scheme: PartitionScheme = field(input, "scheme")?;
            let depth: usize = field(input, "depth")?;
            let m: FinSet = field_or(input, "m", (0..depth as u64).collect())?;
            let outcome = match lift(npp_failure_witness(&blocks, &scheme, depth, &m, g.budget.unwrap_or(64)))? {
                Ok(o) => o,
                Err(outcome) => return Ok(outcome),
            };
            match &outcome {
                NppOutcome::Witness(w) => {
                    let ok = w.verify(&blocks, &scheme)? && w.ratios.iter().all(|(_, r)| r.is_full());
                    Outcome::verified_if(ok, &outcome)
                }
                NppOutcome::Failure { .. } => Outcome::new(Status::Failure, &outcome),
            }
        }
        Pipeline::SummableExt => {
            let blocks: DensityBlocks<Rational> = field(input, "blocks")?;
            blocks.validate()?;
            let depth: usize = field(input, "depth")?;
            let ext = summable_extension(&blocks, depth, g.budget.unwrap_or(62));
            let ok = ext.transcript.steps.iter().all(|s| {
                let k = Rational::from_integer((s.level as i64).into());
                ext.weight_sum(&s.set) > k
            });
            Outcome::new(failure_or(ext.transcript.is_complete(), ok), &ext)
        }
        Pipeline::PartitionSelect => {
            let phi = ExactSubmeasure::from_json(field(input, "submeasure")?)?;
            let scheme: PartitionScheme = field(input, "scheme")?;
            let depth: usize = field(input, "depth")?;
            let r = partition_unbounded_selection(&phi, &scheme, depth, g.budget.unwrap_or(4096))?;
            let ok = r.chain.is_valid(&scheme)
                && pairwise_disjoint(&r.sets)
                && r.transcript.steps.iter().all(|s| s.value >= s.threshold)
                && r.transcript.replay(|s| phi.eval_finite(&s.set));
            Outcome::new(failure_or(r.transcript.is_complete(), ok), &r)
        }
        Pipeline::SignSelect => {
            let phi = ExactSubmeasure::from_json(field(input, "submeasure")?)?;
            let sets: Vec<OmegaSet> = field(input, "sets")?;
            let depth: usize = field_or(input, "depth", sets.len())?;
            let r = sign_scheme_selection(&phi, &sets, depth, g.budget.unwrap_or(4096));
            let ok = pairwise_disjoint(&r.sets) && r.transcript.replay(|s| phi.eval_finite(&s.set));
            Outcome::new(failure_or(r.transcript.is_complete(), ok), &r)
        }
        Pipeline::FinExh => {
            let phi = ExactSubmeasure::from_json(field(input, "submeasure")?)?;
            let depth: usize = field(input, "depth")?;
            let built = fin_to_exh(&phi, depth, g.budget.unwrap_or(1 << 20));
            let ok = (0..built.boundaries.len() - 1)
                .all(|n| built.psi_n_on_block(&phi, n) >= Rational::from_integer((n as i64).into()));
            Outcome::new(failure_or(built.transcript.is_complete(), ok), &built)
        }
        Pipeline::Snpp => {
            let set: OmegaSet = field(input, "set")?;
            let chain: Vec<OmegaSet> = field(input, "chain")?;
            let d = snpp_decomposition(&set, &chain, g.horizon.unwrap_or(1000))?;
            Outcome::verified_if(d.disjoint && d.covers, &d)
        }
    }
}

fn pairwise_disjoint(sets: &[FinSet]) -> bool {
    let mut seen = BTreeSet::new();
    sets.iter().all(|s| s.iter().all(|x| seen.insert(*x)))
}

fn disjointify(input: &Value, g: &Globals) -> Result<Outcome> {
    let stream: MeasureStream<Rational> = field(input, "stream")?;
    stream.validate()?;
    let big_n: Schedule<Rational> = field_or(input, "n", Schedule::default_n())?;
    let big_m: Schedule<Rational> = field_or(input, "m", Schedule::default_m())?;
    let rule: CaseRule<Rational> = field_or(input, "case_rule", CaseRule::default())?;
    let depth: usize = field_or(input, "depth", 8)?;
    let t = disjointify_pipeline(&stream, &big_n, &big_m, &rule, depth, g.budget.unwrap_or(1 << 20))?;
    if t.failure().is_some() {
        return Outcome::new(Status::Failure, &t);
    }
    let blocks_disjoint = pairwise_disjoint(
        &t.stage1.steps.iter().map(|s| s.b.base.as_finite().cloned().unwrap_or_default()).collect::<Vec<_>>(),
    );
    let stage2 = t.stage2.as_ref().map(|s| s.steps.as_slice()).unwrap_or_default();
    let supports_disjoint = pairwise_disjoint(&stage2.iter().map(|s| s.nu.support_in_omega()).collect::<Vec<_>>());
    let p_free = stage2.iter().all(|s| s.nu.p_weight().is_zero());
    let norms = stage2.iter().all(|s| s.norm > s.bound);
    let ok = blocks_disjoint && supports_disjoint && p_free && norms;
    let checks = json!({
        "blocks_disjoint": blocks_disjoint,
        "supports_disjoint": supports_disjoint,
        "p_weight_zero": p_free,
        "norms_exceed_schedule": norms,
    });
    Outcome::verified_if(ok, json!({ "checks": checks, "transcript": t }))
}
