use serde_json::json;

use idealab::hypergraph::HyperBlocks;
use idealab::omega::{FinSet, Formula, MapFormula, OmegaSet};
use idealab::stone::{extension_bounds_check, ClopenCode, FinMeasure, MeasureStream, Point};
use idealab::submeasure::{check_axioms, DensityBlocks, Layout, MassFormula, Submeasure, WeightFn};
use idealab::{ExactSubmeasure, Float, FloatSubmeasure, Rational, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn families<S: Scalar>() -> Vec<Submeasure<S>> {
    vec![
        Submeasure::AsymptoticDensity,
        Submeasure::summable(WeightFn::reciprocal()),
        Submeasure::erdos_ulam(WeightFn::reciprocal()),
        Submeasure::TraceNull,
        Submeasure::hypergraph(HyperBlocks::adl_kneser()),
        Submeasure::density(DensityBlocks::generated(Layout::Dyadic, MassFormula::new(S::one(), 1, 2, S::one()))),
    ]
}

#[test]
fn float_values_track_exact_values() {
    let sets: Vec<FinSet> = vec![
        (0..10).collect(),
        [1, 2, 3, 5, 8, 13, 21, 34].into_iter().collect(),
        (0..200).filter(|n| n % 3 == 0).collect(),
    ];
    for (exact, float) in families::<Rational>().iter().zip(families::<Float>()) {
        for f in &sets {
            let e = exact.eval_finite(f).to_f64();
            let x = float.eval_finite(f);
            assert!((e - x).abs() <= 1e-9 * e.abs().max(1.0), "{exact:?} on {f:?}: {e} vs {x}");
        }
    }
}

#[test]
fn float_axiom_run_is_available_for_exploration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let phi: FloatSubmeasure = Submeasure::AsymptoticDensity;
    assert!(check_axioms(&phi, &mut rng, 500, 64, 8).passed());
    let w = WeightFn::<Float>::geometric(0.5, 0.5);
    let r = extension_bounds_check(&w, &0.0, &[], 12);
    assert!(r.rows.last().unwrap().t_norm > 2.0 - 2f64.powi(-10));
}

#[test]
fn descriptors_round_trip_through_json() {
    let descriptors = [
        json!({ "family": "asymptotic_density" }),
        json!({ "family": "summable", "f": { "kind": "formula", "name": "reciprocal" } }),
        json!({ "family": "erdos_ulam", "f": { "kind": "formula", "name": "constant", "value": "3" } }),
        json!({ "family": "summable", "f": { "kind": "explicit", "values": ["1", "1/2", "0"] } }),
        json!({ "family": "density", "blocks": [{ "0": "1" }, { "1": "1/2", "2": "1/2" }] }),
        json!({ "family": "density", "blocks": { "kind": "generated", "layout": { "kind": "dyadic" },
                                               "mass": { "coeff": "1", "power": 1, "base": 2, "offset": "1" } } }),
        json!({ "family": "table", "domain": [4, 9], "values": ["0", "1", "1", "1"] }),
        json!({ "family": "trace_null" }),
    ];
    for d in descriptors {
        let phi = ExactSubmeasure::from_json(d.clone()).unwrap_or_else(|e| panic!("{d}: {e}"));
        let again = ExactSubmeasure::from_json(serde_json::to_value(&phi).unwrap()).unwrap();
        let f: FinSet = (0..16).collect();
        assert_eq!(phi.eval_finite(&f), again.eval_finite(&f), "{d}");
    }
    assert!(ExactSubmeasure::from_json(json!({ "family": "table", "domain": [0], "values": ["1", "0"] })).is_err());
    assert!(ExactSubmeasure::from_json(json!({ "family": "nope" })).is_err());
}

#[test]
fn measures_and_sets_round_trip_through_json() {
    let mu: FinMeasure<Rational> = serde_json::from_value(json!({ "weights": { "3": "2", "p": "-1/2" } })).unwrap();
    assert_eq!(mu.weight(Point::Nat(3)), Rational::from_u64(2));
    assert_eq!(mu.p_weight(), Rational::from_frac(-1, 2));
    let back: FinMeasure<Rational> = serde_json::from_value(serde_json::to_value(&mu).unwrap()).unwrap();
    assert_eq!(back, mu);

    let code = ClopenCode::cosmall(OmegaSet::program(Formula::Squares));
    let back: ClopenCode = serde_json::from_value(serde_json::to_value(&code).unwrap()).unwrap();
    assert_eq!(back, code);
    assert!(back.contains(Point::P) && !back.contains(Point::Nat(49)) && back.contains(Point::Nat(50)));

    let stream = MeasureStream::<Rational>::delta_pair(MapFormula::Affine { a: 2, b: 1 });
    let back: MeasureStream<Rational> = serde_json::from_value(serde_json::to_value(&stream).unwrap()).unwrap();
    assert_eq!(back.get(4), stream.get(4));
    assert_eq!(stream.get(4).unwrap().weight(Point::Nat(9)), Rational::from_u64(4));
}
