#![allow(dead_code)]

use std::sync::Arc;

use infalg::cochain::{Cochain, Flavor, StructureMap};
use infalg::graded::{GradedVectorSpace, Parity, Vector};
use infalg::scalar::Scalar;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn space(parities: &[u8]) -> Arc<GradedVectorSpace> {
    let names: Vec<(String, Parity)> = parities
        .iter()
        .enumerate()
        .map(|(i, p)| (format!("v{i}"), Parity::of(*p as i64)))
        .collect();
    Arc::new(GradedVectorSpace::new(names).unwrap())
}

pub fn random_space(rng: &mut impl Rng, max_dim: usize) -> Arc<GradedVectorSpace> {
    let dim = rng.gen_range(1..=max_dim);
    let parities: Vec<u8> = (0..dim).map(|_| rng.gen_range(0..2)).collect();
    space(&parities)
}

/// Random homogeneous vector of the given parity, possibly zero.
pub fn random_vector(rng: &mut impl Rng, space: &GradedVectorSpace, parity: Parity, density: f64) -> Vector {
    let mut v = Vector::zero();
    for i in 0..space.dim() {
        if space.parity(i) == parity && rng.gen_bool(density) {
            let c = rng.gen_range(-3i64..=3);
            v.add_term(i, &Scalar::from_i64(c));
        }
    }
    v
}

pub fn random_cochain(
    rng: &mut impl Rng,
    space: &Arc<GradedVectorSpace>,
    flavor: Flavor,
    arity: usize,
    parity: Parity,
    density: f64,
) -> Cochain {
    let mut c = Cochain::zero(space, flavor, arity, parity).unwrap();
    for args in Cochain::domain_tuples(space, flavor, arity) {
        if rng.gen_bool(density) {
            let target = parity + space.tuple_parity(&args);
            let v = random_vector(rng, space, target, 0.7);
            c.add_entry(&args, &v).unwrap();
        }
    }
    c
}

/// A random odd element `Σ d_k` with arities `1..=max_arity`; rarely a genuine structure.
pub fn random_odd_map(rng: &mut impl Rng, space: &Arc<GradedVectorSpace>, flavor: Flavor, max_arity: usize, density: f64) -> StructureMap {
    let mut comps = Vec::new();
    for k in 1..=max_arity {
        if rng.gen_bool(0.7) {
            comps.push(random_cochain(rng, space, flavor, k, Parity::of(k as i64), density));
        }
    }
    StructureMap::from_components(space, flavor, comps).unwrap()
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_i64(n)
}
pub mod catalogue;
pub mod instances;
