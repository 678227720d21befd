mod common;

use deadneuron::arrangement::{
    bounded_region, enumerate_regions, shared_face_dimension, ArrangementConfig, Codeword,
    Hyperplane, Sign,
};
use deadneuron::intercept::{
    classify, p_plus_intercepts, InterceptTuple, Membership, PartitionTag,
};
use deadneuron::linear::{solve_linear, AffineMap};
use deadneuron::network::first_layer_arrangement;
use deadneuron::rng::stream_rng;
use proptest::prelude::*;
use rand::Rng;

/// Hyperplane with bias `b` whose intercepts are `q`.
fn with_intercepts(q: &[f64], b: f64) -> Hyperplane {
    Hyperplane::new(q.iter().map(|qj| -b / qj).collect(), b).unwrap()
}

fn signed(rng: &mut impl Rng) -> f64 {
    let v = rng.random_range(0.01..10.0);
    if rng.random_bool(0.5) {
        v
    } else {
        -v
    }
}

#[test]
fn partition_is_total_and_ties_are_rare() {
    let mut rng = stream_rng(5, 0);
    let mut ties = 0u32;
    let total = 1_000_000;
    for _ in 0..total {
        let n = rng.random_range(2..=4);
        let p: Vec<f64> = (0..n).map(|_| signed(&mut rng)).collect();
        let q: Vec<f64> = p
            .iter()
            .map(|pj| pj.signum() * rng.random_range(0.01..10.0))
            .collect();
        let h = with_intercepts(&q, signed(&mut rng));
        let p = InterceptTuple::new(p, 0.0).unwrap();
        match classify(&p, &h, 1e-9).unwrap() {
            Membership::In(c) => {
                assert_eq!(c.lambdas.len(), n);
                match c.tag {
                    PartitionTag::P => ties += 1,
                    PartitionTag::S(j) => {
                        assert!(c
                            .lambdas
                            .iter()
                            .enumerate()
                            .all(|(k, l)| k == j || *l < c.lambdas[j]));
                    }
                }
            }
            Membership::NotInHp => panic!("hyperplane built inside H_p"),
        }
    }
    assert!(f64::from(ties) / f64::from(total) <= 1e-4, "{ties} ties");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn tags_survive_sign_flips(
        p in prop::collection::vec(prop_oneof![0.01..10.0f64, -10.0..-0.01f64], 2..=5),
        mags in prop::collection::vec(0.01..10.0f64, 5),
        b in prop_oneof![0.01..5.0f64, -5.0..-0.01f64],
        flips in any::<u8>(),
    ) {
        let n = p.len();
        let q: Vec<f64> = p.iter().zip(&mags).map(|(pj, m)| pj.signum() * m).collect();
        let eps: Vec<f64> = (0..n).map(|j| if flips >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
        let flip = |v: &[f64]| -> Vec<f64> { v.iter().zip(&eps).map(|(a, e)| a * e).collect() };
        let before = classify(&InterceptTuple::new(p.clone(), 0.0).unwrap(), &with_intercepts(&q, b), 1e-9).unwrap();
        let after = classify(&InterceptTuple::new(flip(&p), 0.0).unwrap(), &with_intercepts(&flip(&q), b), 1e-9).unwrap();
        prop_assert_eq!(before.class().map(|c| c.tag), after.class().map(|c| c.tag));
        prop_assert!(before.class().is_some());
    }

    #[test]
    fn image_intercept_signs_follow_the_shared_face(n0 in 1usize..=3, seed in any::<u64>()) {
        let params = common::network(n0, n0 + 1, seed);
        let cfg = ArrangementConfig::default();
        let arr = first_layer_arrangement(&params).unwrap();
        let p = p_plus_intercepts(params.layer(1).unwrap(), 1e-9).unwrap();
        let b = bounded_region(&arr, &cfg).unwrap().codeword;
        let signs = Codeword::new(p.values().iter().map(|v| if *v > 0.0 { Sign::Plus } else { Sign::Minus }).collect());
        prop_assert_eq!(&signs, &b);
        let plus = Codeword::all(Sign::Plus, n0 + 1);
        if enumerate_regions(&arr, &cfg).unwrap().iter().any(|r| r.codeword == plus) {
            let k = shared_face_dimension(&arr, &plus, &b, &cfg).unwrap().unwrap();
            prop_assert_eq!(p.negatives(), n0 - k);
        }
    }
}

#[test]
fn worked_image_intercepts_by_independent_solve() {
    let w = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, -1.0]];
    let b = vec![-1.0, -1.0, 3.0];
    let layer = AffineMap::new(w.clone(), b.clone()).unwrap();
    let p = p_plus_intercepts(&layer, 1e-9).unwrap();
    for i in 0..3 {
        let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
        let rows: Vec<Vec<f64>> = others.iter().map(|&j| w[j].clone()).collect();
        let rhs: Vec<f64> = others.iter().map(|&j| -b[j]).collect();
        let v = solve_linear(&rows, &rhs, 1e-12).unwrap();
        let expected = w[i][0] * v[0] + w[i][1] * v[1] + b[i];
        assert!((p.values()[i] - expected).abs() < 1e-12);
        assert!((p.values()[i] - 1.0).abs() < 1e-12);
    }
}
