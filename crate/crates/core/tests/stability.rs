mod common;

use deadneuron::arrangement::{ArrangementConfig, Hyperplane};
use deadneuron::intercept::{classify, InterceptTuple, Membership, PartitionTag};
use deadneuron::linear::AffineMap;
use deadneuron::network::{configuration_index, image_intercepts, NetworkParams};
use deadneuron::rng::stream_rng;
use deadneuron::stability::{
    all_negative_test, decide_by_vertices, is_stably_unactivated_exact, neuron_input, random_input,
    Decision, NeuronRef, StabilityConfig, StabilityError,
};
use proptest::prelude::*;
use rayon::prelude::*;

const N: NeuronRef = NeuronRef { layer: 2, index: 0 };

fn exact(params: &NetworkParams) -> Option<(bool, f64)> {
    match is_stably_unactivated_exact(params, N, &StabilityConfig::default()) {
        Ok(v) => Some((v.stable, v.margin)),
        Err(StabilityError::Marginal(_)) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn region_lps_and_vertices_agree(n0 in 1usize..=3, n1 in 1usize..=6, seed in any::<u64>()) {
        let params = common::network(n0, n1, seed);
        let (decision, margin) = decide_by_vertices(&params, N, 1e-9).unwrap();
        match exact(&params) {
            None => prop_assert_eq!(decision, Decision::Marginal),
            Some((stable, lp_margin)) => {
                prop_assert_eq!(stable, decision == Decision::Stable);
                if lp_margin.is_finite() || margin.is_finite() {
                    prop_assert!((lp_margin - margin).abs() <= 1e-7 * (1.0 + margin.abs()), "{} vs {}", lp_margin, margin);
                }
            }
        }
    }

    #[test]
    fn verdict_ignores_rescaling_through_a_hidden_neuron(n0 in 1usize..=3, n1 in 1usize..=5, seed in any::<u64>(), row in 0usize..5, c in 0.05..20.0f64) {
        // scaling hidden neuron `row` by c and its outgoing weight by 1/c keeps the function
        let params = common::network(n0, n1, seed);
        let row = row % n1;
        let first = params.layer(1).unwrap();
        let mut matrix = first.matrix.clone();
        let mut offset = first.offset.clone();
        matrix[row].iter_mut().for_each(|v| *v *= c);
        offset[row] *= c;
        let second = params.layer(2).unwrap();
        let mut w = second.matrix.clone();
        w[0][row] /= c;
        let scaled = params
            .with_layer(1, AffineMap::new(matrix, offset).unwrap())
            .unwrap()
            .with_layer(2, AffineMap::new(w, second.offset.clone()).unwrap())
            .unwrap();
        if let (Some(a), Some(b)) = (exact(&params), exact(&scaled)) {
            prop_assert_eq!(a.0, b.0);
        }
    }

    #[test]
    fn stable_neurons_are_negative_everywhere(n0 in 1usize..=3, n1 in 1usize..=6, seed in any::<u64>()) {
        let params = common::network(n0, n1, seed);
        if let Some((true, _)) = exact(&params) {
            let mut rng = stream_rng(seed, 3);
            for k in 0..1000 {
                let radius = [1.0, 10.0, 100.0, 1e4][k % 4];
                prop_assert!(neuron_input(&params, N, &random_input(&mut rng, n0, radius)).unwrap() < 0.0);
            }
        }
    }
}

fn tagged(m: &Membership, j: usize) -> Option<bool> {
    match m.class().map(|c| c.tag) {
        Some(PartitionTag::P) => None,
        Some(PartitionTag::S(k)) => Some(k == j),
        None => Some(false),
    }
}

/// Checks the per-configuration characterization of "stable but not all-negative" on one sample.
/// Returns `None` for measure-zero ties that the characterization does not cover.
fn characterization_holds(params: &NetworkParams) -> Option<bool> {
    let n0 = params.arch().input_dim();
    let eps = 1e-9;
    let (decision, _) = decide_by_vertices(params, N, eps).unwrap();
    if decision == Decision::Marginal {
        return None;
    }
    let e_plus = decision == Decision::Stable && !all_negative_test(params, N).unwrap();
    let second = params.layer(2).unwrap();
    let (w, b) = (&second.matrix[0], second.offset[0]);
    let h = Hyperplane::new(w.clone(), b).unwrap();
    let p = image_intercepts(params, eps).unwrap();
    let neg_p = InterceptTuple::new(p.values().iter().map(|v| -v).collect(), 0.0).unwrap();
    let index = configuration_index(params, &ArrangementConfig::default())
        .unwrap()
        .0;
    let in_h1 = |m: &Membership| {
        m.class()
            .is_some_and(|c| c.lambdas.iter().all(|l| *l <= 1.0 + eps))
    };
    let facet = |i: usize| -> Option<bool> {
        Some(tagged(&classify(&neg_p, &h, eps).unwrap(), i)? && b < 0.0)
    };
    let vertex = |i: usize| -> Option<bool> {
        let m = classify(&p, &h, eps).unwrap();
        Some(tagged(&m, i)? && !in_h1(&m) && b < 0.0)
    };
    let predicted = if index == 0 {
        let m = classify(&p, &h, eps).unwrap();
        in_h1(&m) && b > 0.0
    } else if n0 == 1 && index <= 2 {
        // "-+" and "+-" are single-minus and single-plus words at once
        facet(index - 1)? || vertex(2 - index)?
    } else if index <= n0 + 1 {
        facet(index - 1)?
    } else if n0 >= 2 && index <= 2 * n0 + 2 {
        vertex(index - n0 - 2)?
    } else {
        false
    };
    Some(predicted == e_plus)
}

#[test]
fn configuration_characterizations() {
    for n0 in 1..=3usize {
        let results: Vec<Option<bool>> = (0..20_000u64)
            .into_par_iter()
            .map(|i| characterization_holds(&common::network(n0, n0 + 1, (n0 as u64) << 32 | i)))
            .collect();
        let failures = results.iter().filter(|r| **r == Some(false)).count();
        let skipped = results.iter().filter(|r| r.is_none()).count();
        assert_eq!(failures, 0, "n0={n0}: {failures} mismatches");
        assert!(skipped <= 2, "n0={n0}: {skipped} ties");
    }
}
