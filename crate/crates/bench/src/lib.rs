//! Fixtures shared by the benchmarks.

use qxor_core::rng::seeded;
use qxor_core::{BitVector, BooleanFunction, RealFunction};
use rand::Rng;

pub fn random_function(n: usize, seed: u64) -> BooleanFunction {
    let mut rng = seeded(seed);
    BooleanFunction::from_fn(n, |_| if rng.gen::<bool>() { 1 } else { -1 }).unwrap()
}

/// `f` with every value pulled towards zero by at most `eps`.
pub fn perturbed(f: &BooleanFunction, eps: f64, seed: u64) -> RealFunction {
    let mut rng = seeded(seed);
    RealFunction::new(
        f.arity(),
        f.values().iter().map(|&v| f64::from(v) * (1.0 - eps * rng.gen::<f64>())).collect(),
    )
    .unwrap()
}

pub fn point(n: usize, index: usize) -> BitVector {
    BitVector::from_index(n, index % (1 << n))
}
