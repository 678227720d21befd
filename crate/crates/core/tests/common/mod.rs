#![allow(dead_code)]

use deadneuron::arrangement::CoorientedArrangement;
use deadneuron::network::{
    first_layer_arrangement, sample_nondegenerate, Architecture, DegeneracyCheck, Distribution,
    NetworkParams,
};

/// A generic non-degenerate network `(n0, n1, 1)` with standard normal parameters.
pub fn network(n0: usize, n1: usize, seed: u64) -> NetworkParams {
    let arch = Architecture::new(vec![n0, n1, 1]).unwrap();
    sample_nondegenerate(
        &arch,
        &Distribution::Normal { std_dev: 1.0 },
        seed,
        &DegeneracyCheck::default(),
    )
    .unwrap()
    .params
}

/// A generic arrangement of `m` hyperplanes in `R^n`.
pub fn arrangement(m: usize, n: usize, seed: u64) -> CoorientedArrangement {
    first_layer_arrangement(&network(n, m, seed)).unwrap()
}
