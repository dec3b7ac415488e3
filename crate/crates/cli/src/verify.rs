use std::path::PathBuf;

use anyhow::Result;
use clap::ValueEnum;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use idealab::hypergraph::{chromatic_with_coloring, is_proper, kneser_generate, kneser_lower_bound, HyperBlocks};
use idealab::omega::{FinSet, MapFormula, OmegaSet};
use idealab::stone::{
    disjointify_pipeline, disjointify_stage1, extension_bounds_check, ClopenCode, FinMeasure, MeasureStream, Point,
    Schedule,
};
use idealab::submeasure::{check_axioms, nonpath_gap, DensityBlocks, Layout, MassFormula, WeightFn};
use idealab::{ExactSubmeasure, Rational, Scalar};

use crate::report::{Outcome, Status};
use crate::{field_or, Globals};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    SubmeasureAxioms,
    KneserChromatic,
    Nonpath,
    StoneAdditivity,
    ExtensionBounds,
    Disjointify,
}

impl Suite {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

#[derive(clap::Args, Debug)]
pub struct Args {
    pub suite: Suite,
    /// Optional JSON input (a submeasure descriptor for `submeasure-axioms` and `nonpath`)
    #[arg(long)]
    pub input: Option<PathBuf>,
}

pub fn run(suite: Suite, input: &Value, g: &Globals) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    match suite {
        Suite::SubmeasureAxioms => axioms(input, g, &mut rng),
        Suite::KneserChromatic => kneser(input),
        Suite::Nonpath => nonpath(input, g, &mut rng),
        Suite::StoneAdditivity => stone_additivity(g, &mut rng),
        Suite::ExtensionBounds => extension_bounds(g, &mut rng),
        Suite::Disjointify => disjointify(input, g, &mut rng),
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_frac(n, d)
}

/// The families checked when no descriptor is given.
pub fn default_battery() -> Vec<(String, ExactSubmeasure)> {
    let dyadic = DensityBlocks::generated(Layout::Dyadic, MassFormula::new(q(1, 1), 0, 1, Rational::zero()));
    let intervals =
        DensityBlocks::generated(Layout::Intervals { length: 3, start: 0 }, MassFormula::new(q(1, 2), 1, 1, q(1, 1)));
    vec![
        ("asymptotic_density".into(), ExactSubmeasure::AsymptoticDensity),
        ("erdos_ulam_reciprocal".into(), ExactSubmeasure::erdos_ulam(WeightFn::reciprocal())),
        ("summable_reciprocal".into(), ExactSubmeasure::summable(WeightFn::reciprocal())),
        ("trace_null".into(), ExactSubmeasure::TraceNull),
        ("hypergraph_adl_kneser".into(), ExactSubmeasure::hypergraph(HyperBlocks::adl_kneser())),
        ("hypergraph_dyadic_edge".into(), ExactSubmeasure::hypergraph(HyperBlocks::dyadic_single_edge())),
        ("density_dyadic".into(), ExactSubmeasure::density(dyadic)),
        ("density_intervals".into(), ExactSubmeasure::density(intervals)),
    ]
}

fn descriptor_or_battery(input: &Value) -> Result<Vec<(String, ExactSubmeasure)>> {
    if input.is_null() {
        return Ok(default_battery());
    }
    let phi = ExactSubmeasure::from_json(input.clone())?;
    phi.validate()?;
    Ok(vec![("input".into(), phi)])
}

fn axioms(input: &Value, g: &Globals, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let samples = g.budget.unwrap_or(1000) as usize;
    let range = g.horizon.unwrap_or(64);
    let mut rows = Vec::new();
    let mut ok = true;
    for (name, phi) in descriptor_or_battery(input)? {
        let report = check_axioms(&phi, rng, samples, range, 10);
        ok &= report.passed();
        rows.push(json!({ "family": name, "report": report }));
    }
    Outcome::verified_if(ok, json!({ "samples": samples, "range": range, "families": rows }))
}

fn kneser(input: &Value) -> Result<Outcome> {
    let cases: Vec<(u64, u64, u64)> = field_or(input, "cases", vec![(5, 2, 2), (6, 2, 2)])?;
    let mut rows = Vec::new();
    let mut ok = true;
    for (m, k, r) in cases {
        let h = kneser_generate(m, k, r)?;
        let (chi, coloring) = chromatic_with_coloring(&h)?;
        let bound = kneser_lower_bound(m, k, r);
        let proper = is_proper(&h, &coloring);
        ok &= proper && chi == bound;
        rows.push(json!({
            "m": m, "k": k, "r": r,
            "chromatic": chi,
            "lower_bound": bound,
            "coloring_proper": proper,
            "coloring": coloring,
        }));
    }
    Outcome::verified_if(ok, json!({ "cases": rows }))
}

fn random_set(rng: &mut ChaCha8Rng, range: u64, max_size: usize) -> FinSet {
    let size = rng.gen_range(1..=max_size);
    (0..size).map(|_| rng.gen_range(0..range)).collect()
}

fn nonpath(input: &Value, g: &Globals, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let (phi, explicit): (ExactSubmeasure, Option<Vec<FinSet>>) = if input.is_null() {
        let blocks = DensityBlocks::generated(Layout::Dyadic, MassFormula::new(q(1, 1), 0, 1, Rational::zero()));
        (ExactSubmeasure::density(blocks), None)
    } else {
        let desc = input.get("submeasure").cloned().unwrap_or_else(|| input.clone());
        let sets: Option<Vec<FinSet>> = field_or(input, "sets", None)?;
        (ExactSubmeasure::from_json(desc)?, sets)
    };
    phi.validate()?;
    let sets = match explicit {
        Some(s) => s,
        None => {
            let count = g.budget.unwrap_or(100) as usize;
            let range = g.horizon.unwrap_or(64).max(1);
            (0..count).map(|_| random_set(rng, range, 12)).collect()
        }
    };
    let mut rows = Vec::with_capacity(sets.len());
    let mut worst: Option<FinSet> = None;
    for f in &sets {
        let r = nonpath_gap(&phi, f)?;
        if !r.gap.is_zero() && worst.is_none() {
            worst = Some(f.clone());
        }
        rows.push(r);
    }
    Outcome::verified_if(worst.is_none(), json!({ "first_positive_gap": worst, "rows": rows }))
}

fn random_measure(rng: &mut ChaCha8Rng, range: u64) -> FinMeasure<Rational> {
    let mut m = FinMeasure::zero();
    for _ in 0..rng.gen_range(1..6) {
        let x = rng.gen_range(0..range);
        m.add_at(Point::Nat(x), q(rng.gen_range(-9..10), rng.gen_range(1..5)));
    }
    if rng.gen_bool(0.5) {
        m.add_at(Point::P, q(rng.gen_range(-9..10), rng.gen_range(1..5)));
    }
    m
}

fn random_clopen(rng: &mut ChaCha8Rng, range: u64) -> ClopenCode {
    let base = random_set(rng, range, 6);
    if rng.gen_bool(0.5) {
        ClopenCode::small(OmegaSet::Finite { elements: base })
    } else {
        ClopenCode::cosmall(OmegaSet::Finite { elements: base })
    }
}

fn stone_additivity(g: &Globals, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let samples = g.budget.unwrap_or(1000);
    let range = g.horizon.unwrap_or(32).max(1);
    let mut failure = None;
    for i in 0..samples {
        let mu = random_measure(rng, range);
        let a = random_clopen(rng, range);
        let b = random_clopen(rng, range).minus(&a);
        let joined = mu.eval(&a.join(&b));
        let split = mu.eval(&a) + mu.eval(&b);
        let whole = mu.eval(&a) + mu.eval(&a.complement());
        if joined != split || whole != mu.total() {
            failure = Some(json!({ "sample": i, "measure": mu, "a": a, "b": b }));
            break;
        }
    }
    Outcome::verified_if(failure.is_none(), json!({ "samples": samples, "range": range, "counterexample": failure }))
}

fn extension_bounds(g: &Globals, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let pairs = g.budget.unwrap_or(100);
    let horizon = g.horizon.unwrap_or(64);
    let mut failure = None;
    for i in 0..pairs {
        let scale = q(rng.gen_range(-8..9), rng.gen_range(1..5));
        let ratio = q(rng.gen_range(-3..4), rng.gen_range(4..8));
        let w = WeightFn::geometric(scale, ratio);
        let alpha = q(rng.gen_range(-8..9), rng.gen_range(1..5));
        let samples: Vec<OmegaSet> =
            (0..4).map(|_| OmegaSet::Finite { elements: random_set(rng, horizon.max(1), 8) }).collect();
        let report = extension_bounds_check(&w, &alpha, &samples, horizon);
        if !report.holds {
            failure = Some(json!({ "pair": i, "weights": w, "alpha": alpha.to_exact_string(), "report": report }));
            break;
        }
    }
    Outcome::verified_if(failure.is_none(), json!({ "pairs": pairs, "horizon": horizon, "counterexample": failure }))
}

fn disjointify(input: &Value, g: &Globals, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let stream: MeasureStream<Rational> = field_or(input, "stream", MeasureStream::delta_pair(MapFormula::Identity))?;
    stream.validate()?;
    let depth: usize = field_or(input, "depth", 8)?;
    let clopens: usize = field_or(input, "clopens", 50)?;
    let budget = g.budget.unwrap_or(1 << 20);
    let big_n = Schedule::default_n();
    let big_m = Schedule::default_m();
    let stage1 = disjointify_stage1(&stream, &big_n, &big_m, depth, budget)?;
    if stage1.failure.is_some() {
        return Outcome::new(Status::Failure, json!({ "stage1": stage1 }));
    }
    let range = stage1.steps.iter().map(|s| s.n).max().unwrap_or(0) + 2;
    let mut bad = None;
    'steps: for s in &stage1.steps {
        for _ in 0..clopens {
            let a = random_clopen(rng, range);
            if !s.pointwise_holds(&a) {
                bad = Some(json!({ "k": s.k, "clopen": a }));
                break 'steps;
            }
        }
    }
    let pipeline = disjointify_pipeline(&stream, &big_n, &big_m, &Default::default(), depth, budget)?;
    let steps = pipeline.stage2.as_ref().map(|s| s.steps.as_slice()).unwrap_or_default();
    let mut seen = FinSet::new();
    let disjoint = steps.iter().all(|s| s.nu.support_in_omega().into_iter().all(|x| seen.insert(x)));
    let p_free = steps.iter().all(|s| s.nu.p_weight().is_zero());
    let norms = steps.iter().all(|s| s.norm > s.bound);
    let ok = bad.is_none() && disjoint && p_free && norms && pipeline.failure().is_none();
    Outcome::verified_if(
        ok,
        json!({
            "pointwise_counterexample": bad,
            "supports_disjoint": disjoint,
            "p_weight_zero": p_free,
            "norms_exceed_schedule": norms,
            "transcript": pipeline,
        }),
    )
}
