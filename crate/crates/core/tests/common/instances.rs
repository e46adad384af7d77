//! Random instances for the base-deformation checks.

use std::sync::Arc;

use infalg::base::BaseAlgebra;
use infalg::cochain::{Family, Flavor, StructureMap};
use infalg::graded::{GradedVectorSpace, Parity};
use infalg::massey::AlphaMap;
use infalg::relations::check_structure_direct;
use infalg::scalar::Scalar;
use rand::Rng;

use super::{random_cochain, random_odd_map, space};

pub fn base(gens: &[(&str, Parity, u32)]) -> Arc<BaseAlgebra> {
    Arc::new(BaseAlgebra::truncated_polynomial(gens).unwrap())
}

/// k[t]/t², k[t]/t³, k[t,θ]/(t³,θ²), k[θ]/θ² and k[t,θ]/(t²,θ²).
pub fn bases() -> Vec<Arc<BaseAlgebra>> {
    vec![
        base(&[("t", Parity::EVEN, 1)]),
        base(&[("t", Parity::EVEN, 2)]),
        base(&[("t", Parity::EVEN, 2), ("h", Parity::ODD, 1)]),
        base(&[("h", Parity::ODD, 1)]),
        base(&[("t", Parity::EVEN, 1), ("h", Parity::ODD, 1)]),
    ]
}

pub fn random_small_space(rng: &mut impl Rng) -> Arc<GradedVectorSpace> {
    match rng.gen_range(0..4) {
        0 => space(&[rng.gen_range(0..2)]),
        1 => space(&[0, 0]),
        2 => space(&[1, 1]),
        _ => space(&[0, 1]),
    }
}

/// A random map that satisfies its own structure equation up to arity 3, or zero.
pub fn random_structure(rng: &mut impl Rng, v: &Arc<GradedVectorSpace>, flavor: Flavor) -> StructureMap {
    for _ in 0..400 {
        let d = random_odd_map(rng, v, flavor, 3, 0.5);
        if !d.family().is_zero() && check_structure_direct(&d, 3).unwrap().holds() {
            return d;
        }
    }
    StructureMap::zero(v, flavor)
}

pub fn random_alpha(rng: &mut impl Rng, v: &Arc<GradedVectorSpace>, flavor: Flavor, s: &BaseAlgebra, density: f64) -> AlphaMap {
    let mut alpha = AlphaMap::new();
    for i in 0..s.dim() {
        let good = s.parity(i) + Parity::ODD;
        let mut fam = Family::zero(v, flavor, good);
        for k in 1..=3 {
            let c = random_cochain(rng, v, flavor, k, good + Parity::of(k as i64 - 1), density);
            fam.add_cochain(&c, &Scalar::one()).unwrap();
        }
        alpha.set(s.dual(), i, fam).unwrap();
    }
    alpha
}
