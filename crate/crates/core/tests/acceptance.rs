//! The twelve acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are always printed.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use idealab::constructions::{fin_to_exh, fin_to_exh_certificate, summable_extension};
use idealab::hypergraph::{
    adl_ideal, adl_select, chromatic_exact, kneser_generate, kneser_lower_bound, npp_failure_witness, HyperBlocks,
    NppOutcome,
};
use idealab::omega::{FinSet, Formula, MapFormula, OmegaSet, PartitionScheme};
use idealab::orders::{
    builtin, builtin_catalog, dominance, katetov_verify, splitting_check, tukey_demo, DominanceReport, Evidence,
};
use idealab::stone::{
    anti_grothendieck_normalize, disjointify_pipeline, disjointify_stage1, extension_bounds_check, CaseRule,
    ClopenCode, FinMeasure, MeasureStream, Point, Schedule,
};
use idealab::submeasure::{
    check_axioms, nonpath_gap, CertificateKind, DensityBlocks, Layout, MassFormula, Submeasure, WeightFn,
};
use idealab::{Rational as Q, Scalar};

fn q(n: i64, d: i64) -> Q {
    Q::from_frac(n, d)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_set(r: &mut ChaCha8Rng, range: u64, max_size: usize) -> FinSet {
    let size = r.gen_range(1..=max_size);
    (0..size).map(|_| r.gen_range(0..range)).collect()
}

/// Block `n` is `[2^n, 2^{n+1})` with mass `n·2^n + 1`.
fn growing_blocks() -> DensityBlocks<Q> {
    DensityBlocks::generated(Layout::Dyadic, MassFormula::new(q(1, 1), 1, 2, q(1, 1)))
}

fn interval_blocks() -> DensityBlocks<Q> {
    DensityBlocks::generated(Layout::Intervals { length: 3, start: 1 }, MassFormula::new(q(1, 2), 1, 1, q(1, 1)))
}

fn c1_axiom_suite() -> Result<String, String> {
    let adl = adl_select(&HyperBlocks::adl_kneser(), 4, 64).map_err(|e| e.to_string())?;
    let families: Vec<(&str, Submeasure<Q>)> = vec![
        ("phi_d", Submeasure::AsymptoticDensity),
        ("erdos_ulam", Submeasure::erdos_ulam(WeightFn::reciprocal())),
        ("summable", Submeasure::summable(WeightFn::reciprocal())),
        ("trace_null", Submeasure::TraceNull),
        ("hypergraph_kneser", Submeasure::hypergraph(HyperBlocks::adl_kneser())),
        ("hypergraph_single_edge", Submeasure::hypergraph(HyperBlocks::dyadic_single_edge())),
        ("hypergraph_adl", adl_ideal(&adl, &OmegaSet::all())),
        ("density_growing", Submeasure::density(growing_blocks())),
        ("density_intervals", Submeasure::density(interval_blocks())),
    ];
    let mut r = rng(1);
    let mut total = 0;
    for (name, phi) in &families {
        let report = check_axioms(phi, &mut r, 5000, 64, 10);
        if let Some(v) = report.violation {
            return Err(format!("{name}: {v:?}"));
        }
        if report.checks < 10_000 {
            return Err(format!("{name}: only {} checks", report.checks));
        }
        total += report.checks;
    }
    Ok(format!("{} families, {total} checks, no violations", families.len()))
}

/// `sup_n |F ∩ [2^n, 2^{n+1})| / 2^n` computed by counting.
fn dyadic_density_oracle(f: &FinSet) -> Q {
    let mut best = Q::zero();
    for n in 0..64u32 {
        let lo = 1u64 << n;
        let count = f.range(lo..lo.saturating_mul(2)).count() as i64;
        best = best.max(Q::from_frac(count, lo as i64));
        if lo > *f.iter().next_back().unwrap_or(&0) {
            break;
        }
    }
    best
}

fn c2_phi_d_spot_values() -> Result<String, String> {
    let phi = Submeasure::<Q>::AsymptoticDensity;
    let evens = OmegaSet::program(Formula::Evens);
    for k in 2..=20u32 {
        let n = 1u64 << k;
        let v = phi.eval_prefix(&evens, n);
        let oracle = dyadic_density_oracle(&evens.prefix(n));
        if v != q(1, 2) || oracle != q(1, 2) {
            return Err(format!("k={k}: got {v}, oracle {oracle}"));
        }
    }
    let all = phi.eval_prefix(&OmegaSet::all(), 8);
    if all != Q::one() {
        return Err(format!("eval_prefix(ω, 8) = {all}"));
    }
    Ok("evens at 2^k = 1/2 for k = 2..20, ω at 8 = 1".into())
}

fn c3_nonpathology() -> Result<String, String> {
    let mut r = rng(3);
    let configs = [Submeasure::density(growing_blocks()), Submeasure::density(interval_blocks())];
    for phi in &configs {
        for _ in 0..50 {
            let f = random_set(&mut r, 64, 12);
            let rep = nonpath_gap(phi, &f).map_err(|e| e.to_string())?;
            if !rep.gap.is_zero() {
                return Err(format!("gap {} on {f:?}", rep.gap));
            }
        }
    }
    // three points, every nonempty proper subset has value 1, the whole set 2
    let fixture =
        Submeasure::<Q>::table(vec![0, 1, 2], [0, 1, 1, 1, 1, 1, 1, 2].into_iter().map(Q::from_u64).collect())
            .map_err(|e| e.to_string())?;
    let all: FinSet = [0, 1, 2].into_iter().collect();
    let rep = nonpath_gap(&fixture, &all).map_err(|e| e.to_string())?;
    // a measure below the table has each pair mass at most 1, so total at most 3/2
    if rep.gap != q(1, 2) || rep.best_measure != q(3, 2) {
        return Err(format!("fixture gap {} best {}", rep.gap, rep.best_measure));
    }
    Ok("100 random sets with gap 0, fixture gap 1/2".into())
}

fn c4_kneser() -> Result<String, String> {
    let mut out = Vec::new();
    for (m, k, want) in [(5u64, 2u64, 3u64), (6, 2, 4)] {
        let h = kneser_generate(m, k, 2).map_err(|e| e.to_string())?;
        let chi = chromatic_exact(&h).map_err(|e| e.to_string())?;
        // for graphs the bound is m − 2k + 2
        let closed_form = m - 2 * k + 2;
        let bound = kneser_lower_bound(m, k, 2);
        if chi != want || bound != closed_form || chi != bound {
            return Err(format!("KG({m},{k},2): χ = {chi}, bound {bound}, closed form {closed_form}"));
        }
        out.push(format!("χ(KG({m},{k},2)) = {chi}"));
    }
    Ok(out.join(", "))
}

fn c5_adl_star() -> Result<String, String> {
    let config = adl_select(&HyperBlocks::adl_kneser(), 5, 64).map_err(|e| e.to_string())?;
    let mut sum: u128 = 0;
    for (k, &n) in config.selected.iter().enumerate() {
        let b = config.blocks.block(n).ok_or("missing block")?;
        let size = 1u64 << n;
        if !b.graph.uniform_of_size(size) || b.graph.min_edge_size() != Some(size) {
            return Err(format!("block {n} is not {size}-uniform"));
        }
        if size as u128 <= k as u128 * sum {
            return Err(format!("k={k}: |e| = {size} ≤ {}", k as u128 * sum));
        }
        sum += b.ground.size() as u128;
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(format!("selected {:?}", config.selected))
}

fn c6_npp_witness() -> Result<String, String> {
    let blocks = HyperBlocks::adl_kneser();
    let scheme = PartitionScheme::Residue { base: 2 };
    let m: FinSet = (0..6).collect();
    let out = npp_failure_witness(&blocks, &scheme, 6, &m, 64).map_err(|e| e.to_string())?;
    let NppOutcome::Witness(w) = out else {
        return Err(format!("no witness: {out:?}"));
    };
    if !w.verify(&blocks, &scheme).map_err(|e| e.to_string())? {
        return Err("witness does not verify".into());
    }
    let b_m = w.b_m.as_finite().cloned().unwrap_or_default();
    for s in &w.steps {
        let block = blocks.block(s.index).ok_or("missing block")?;
        // the ratio is 1 when some edge of the block lies inside B_M
        let vertices: BTreeSet<u64> = b_m.iter().filter_map(|&x| block.ground.vertex(x)).collect();
        if !s.edge.iter().all(|v| vertices.contains(v)) || !block.ratio(&b_m).is_full() {
            return Err(format!("level {}: ratio below 1", s.level));
        }
    }
    if w.ratios.len() != 6 {
        return Err(format!("{} ratios", w.ratios.len()));
    }
    let indices: Vec<u64> = w.steps.iter().map(|s| s.index).collect();
    Ok(format!("indices {indices:?}, ratio 1 at every level"))
}

fn c7_disjointify() -> Result<String, String> {
    let stream = MeasureStream::<Q>::delta_pair(MapFormula::Identity);
    let (big_n, big_m) = (Schedule::default_n(), Schedule::default_m());
    let budget = 1 << 24;
    let stage1 = disjointify_stage1(&stream, &big_n, &big_m, 42, budget).map_err(|e| e.to_string())?;
    if let Some(f) = stage1.failure {
        return Err(format!("stage 1: {f:?}"));
    }
    let mut r = rng(7);
    let range = stage1.steps.iter().map(|s| s.n).max().unwrap_or(0) + 2;
    for s in &stage1.steps {
        if s.big_n != Q::from_usize(s.k + 1) || s.big_m != Q::from_usize(s.k + 2) {
            return Err(format!("schedule at k={}", s.k));
        }
        for _ in 0..50 {
            let base = OmegaSet::Finite { elements: random_set(&mut r, range, 8) };
            let a = if r.gen_bool(0.5) { ClopenCode::small(base) } else { ClopenCode::cosmall(base) };
            let lhs = s.nu.eval(&a).abs();
            let rhs = s.theta.eval(&a).abs() + q(1, 1) / s.big_m.clone() + q(1, s.k as i64 + 1);
            if lhs >= rhs {
                return Err(format!("pointwise bound fails at k={} on {a:?}", s.k));
            }
        }
    }
    let t =
        disjointify_pipeline(&stream, &big_n, &big_m, &CaseRule::default(), 42, budget).map_err(|e| e.to_string())?;
    let stage2 = t.stage2.ok_or("no stage 2")?;
    if stage2.steps.len() < 21 {
        return Err(format!("only {} stage-2 outputs", stage2.steps.len()));
    }
    let mut seen = FinSet::new();
    for (k, s) in stage2.steps.iter().take(21).enumerate() {
        for x in s.nu.support() {
            match x {
                Point::P => return Err(format!("ν_{k} charges p")),
                Point::Nat(n) if !seen.insert(n) => return Err(format!("ν_{k} reuses {n}")),
                Point::Nat(_) => {}
            }
        }
        if !s.nu.p_weight().is_zero() {
            return Err(format!("ν_{k}(p) ≠ 0"));
        }
        let norm: Q = s.nu.support().map(|x| s.nu.weight(x).abs()).fold(Q::zero(), |a, b| a + b);
        if norm != s.norm || norm <= Q::from_usize(k + 1) {
            return Err(format!("‖ν_{k}‖ = {norm}"));
        }
    }
    Ok(format!("{:?}, 21 outputs disjoint, p-free, ‖ν_k‖ > k+1", stage2.case))
}

fn c8_normalization() -> Result<String, String> {
    // disjoint supports with mixed signs and growing mass
    let seq: Vec<FinMeasure<Q>> = (0..=20i64)
        .map(|n| {
            let a = 3 * n as u64;
            FinMeasure::from_weights([
                (Point::Nat(a), q(n + 1, 1)),
                (Point::Nat(a + 1), q(-(n + 2), 3)),
                (Point::Nat(a + 2), q(1, n + 2)),
            ])
        })
        .collect();
    let out = anti_grothendieck_normalize(&seq).map_err(|e| e.to_string())?;
    for (n, s) in out.iter().enumerate() {
        let norm: Q = s.measure.support().map(|x| s.measure.weight(x).abs()).fold(Q::zero(), |a, b| a + b);
        let value = s.measure.eval(&s.u);
        if norm != Q::one() || value != s.value || value.abs() <= q(1, 3) {
            return Err(format!("n={n}: norm {norm}, value {value}"));
        }
    }
    Ok(format!("{} outputs with norm 1 and |ν̂(U)| > 1/3", out.len()))
}

fn c9_extension() -> Result<String, String> {
    let mut r = rng(9);
    for i in 0..100 {
        let w = if r.gen_bool(0.5) {
            WeightFn::geometric(q(r.gen_range(-8..9), r.gen_range(1..5)), q(r.gen_range(-3..4), r.gen_range(4..8)))
        } else {
            WeightFn::Sparse {
                entries: (0..r.gen_range(1..6))
                    .map(|_| (r.gen_range(0..40), q(r.gen_range(-9..10), r.gen_range(1..4))))
                    .collect(),
            }
        };
        let alpha = q(r.gen_range(-8..9), r.gen_range(1..5));
        let samples: Vec<OmegaSet> = (0..4).map(|_| OmegaSet::Finite { elements: random_set(&mut r, 48, 8) }).collect();
        let rep = extension_bounds_check(&w, &alpha, &samples, 48);
        if !rep.holds || !rep.monotone {
            return Err(format!("pair {i}: {w:?}, α = {alpha}"));
        }
    }
    let fixture = WeightFn::geometric(q(1, 2), q(1, 2));
    let rep = extension_bounds_check(&fixture, &Q::zero(), &[], 12);
    let top = rep.rows.last().ok_or("no rows")?;
    if top.t_norm <= Q::from_u64(2) - Q::pow2(-10) {
        return Err(format!("fixture norm {}", top.t_norm));
    }
    Ok(format!("100 pairs hold, fixture norm {} at horizon 12", top.t_norm))
}

fn c10_summable_extension() -> Result<String, String> {
    let blocks = growing_blocks();
    let ext = summable_extension(&blocks, 10, 64);
    if !ext.transcript.is_complete() {
        return Err(format!("{:?}", ext.transcript.failure));
    }
    let mut r = rng(10);
    let top = blocks.span(10).map(|(_, hi)| hi).ok_or("no span")?;
    for _ in 0..100 {
        let f = random_set(&mut r, top + 16, 40);
        // both sides by direct summation over points
        let lhs: Q = f.iter().map(|&n| ext.f.weight(n)).fold(Q::zero(), |a, b| a + b);
        let rhs: Q = ext
            .selected()
            .into_iter()
            .map(|(k, n)| Q::pow2(-(k as i64)) * f.iter().map(|&x| blocks.weight(n, x)).fold(Q::zero(), |a, b| a + b))
            .fold(Q::zero(), |a, b| a + b);
        if lhs != rhs {
            return Err(format!("identity fails on {f:?}"));
        }
    }
    for (k, n) in ext.selected() {
        let support = blocks.support(n).unwrap_or_default();
        if ext.weight_sum(&support) <= Q::from_usize(k) {
            return Err(format!("block sum at k={k} is {}", ext.weight_sum(&support)));
        }
    }
    Ok(format!("selected {:?}", ext.selected().into_iter().map(|(_, n)| n).collect::<Vec<_>>()))
}

fn c11_fin_to_exh() -> Result<String, String> {
    let phi = Submeasure::summable(WeightFn::<Q>::counting());
    let built = fin_to_exh(&phi, 102, 1 << 26);
    if !built.transcript.is_complete() {
        return Err(format!("{:?}", built.transcript.failure));
    }
    for n in 0..=10 {
        let (lo, hi) = (built.boundaries[n], built.boundaries[n + 1]);
        // counting measure of the block is its length
        if built.psi_n_on_block(&phi, n) < Q::from_usize(n) || Q::from_u64(hi - lo) < Q::from_usize(n) {
            return Err(format!("ψ_{n}(X_{n}) below {n}"));
        }
    }
    let eps = q(1, 100);
    let mut ms = Vec::new();
    for (a, bound) in [(OmegaSet::finite([0]), 1i64), (OmegaSet::finite([3]), 1), (OmegaSet::empty(), 0)] {
        let cert = fin_to_exh_certificate(&built, &a, &Q::from_frac(bound, 1), &eps).map_err(|e| e.to_string())?;
        if cert.kind != CertificateKind::ExhYes {
            return Err(format!("{a:?}: {:?}", cert.kind));
        }
        let n = (100 * bound + 1) as usize;
        if cert.witness_m != Some(built.boundaries[n]) {
            return Err(format!("{a:?}: m = {:?}, expected {}", cert.witness_m, built.boundaries[n]));
        }
        ms.push(cert.witness_m.unwrap_or_default());
    }
    Ok(format!("ψ_n(X_n) ≥ n for n ≤ 10, ExhYes with m = {ms:?}"))
}

fn c12_orders() -> Result<String, String> {
    let catalog = builtin_catalog::<Q>();
    for h in &catalog {
        let rep = katetov_verify(h, h, &MapFormula::Identity, None).map_err(|e| e.to_string())?;
        if rep.verdict != Evidence::Verified {
            return Err(format!("identity on {}: {:?}", h.name, rep.verdict));
        }
    }
    let fin = builtin::<Q>("fin").ok_or("no fin")?;
    let family: Vec<OmegaSet> = (0..8).map(|bit| OmegaSet::program(Formula::BitSlice { bit })).collect();
    let mut r = rng(12);
    let tests: Vec<OmegaSet> = (0..20)
        .map(|_| match r.gen_range(0..3) {
            0 => {
                let modulus = r.gen_range(1..16);
                OmegaSet::program(Formula::Residue { modulus, residue: r.gen_range(0..modulus) })
            }
            1 => OmegaSet::program(Formula::Hashed { seed: r.gen(), num: r.gen_range(1..4), den: 4 }),
            _ => OmegaSet::program(Formula::Union {
                sets: vec![OmegaSet::program(Formula::Squares), OmegaSet::finite([r.gen_range(0..100)])],
            }),
        })
        .collect();
    let split = splitting_check(&family, &fin, &tests, None).map_err(|e| e.to_string())?;
    if !split.all_split() {
        let bad = split.rows.iter().find(|r| r.verdict != idealab::orders::SplitVerdict::Split);
        return Err(format!("not split: {bad:?}"));
    }
    let horizon = 200;
    let mut transitive = 0;
    for _ in 0..50 {
        let fs: Vec<WeightFn<Q>> = (0..3)
            .map(|_| WeightFn::Explicit { values: (0..horizon).map(|_| q(r.gen_range(0..4), 1)).collect() })
            .collect();
        let reports: Vec<Vec<DominanceReport>> =
            fs.iter().map(|f| fs.iter().map(|g| dominance(f, g, horizon as u64)).collect()).collect();
        for (i, row) in reports.iter().enumerate() {
            for (j, rep) in row.iter().enumerate() {
                // the least N with f_i ≤ f_j on [N, horizon)
                let oracle = (0..horizon)
                    .rev()
                    .find(|&n| fs[i].weight(n as u64) > fs[j].weight(n as u64))
                    .map_or(0, |n| n as u64 + 1);
                let expected = (oracle < horizon as u64).then_some(oracle);
                if rep.from() != expected {
                    return Err(format!("dominance({i},{j}) = {rep:?}, oracle {oracle}"));
                }
            }
        }
        for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (1, 0, 2), (2, 1, 0)] {
            if let (Some(x), Some(y)) = (reports[a][b].from(), reports[b][c].from()) {
                match reports[a][c].from() {
                    Some(z) if z <= x.max(y) => transitive += 1,
                    other => return Err(format!("transitivity fails: {x}, {y}, {other:?}")),
                }
            }
        }
    }
    let witnesses = [growing_blocks(), interval_blocks()];
    let demo = tukey_demo(&witnesses, 4, 1 << 12).map_err(|e| e.to_string())?;
    if demo.matrix.len() != 2 || demo.matrix.iter().any(|row| row.len() != 2) {
        return Err("dominance matrix is not 2×2".into());
    }
    if demo.inclusion.iter().any(|rows| rows.is_empty()) || !demo.inclusion_holds() {
        return Err("inclusion evidence missing or wrong".into());
    }
    Ok(format!(
        "{} identity reductions, 20 tests split, {transitive} transitive chains, tukey demo complete",
        catalog.len()
    ))
}

type Criterion = fn() -> Result<String, String>;

fn main() -> ExitCode {
    let criteria: [(&str, Criterion, u64); 12] = [
        ("submeasure axiom suite", c1_axiom_suite, 30),
        ("phi_d spot values", c2_phi_d_spot_values, 30),
        ("non-pathology", c3_nonpathology, 60),
        ("Kneser chromatic numbers", c4_kneser, 60),
        ("ADL inequality (*)", c5_adl_star, 5),
        ("NPP-failure witness", c6_npp_witness, 30),
        ("disjointification pipeline", c7_disjointify, 60),
        ("anti-Grothendieck normalization", c8_normalization, 5),
        ("extension operator", c9_extension, 10),
        ("summable extension", c10_summable_extension, 10),
        ("fin to exh", c11_fin_to_exh, 10),
        ("orders", c12_orders, 30),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > Duration::from_secs(limit) => Err(format!("took {elapsed:.2?}, limit {limit}s")),
            other => other,
        };
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({elapsed:.2?}): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
