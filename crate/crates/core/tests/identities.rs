mod common;

use common::{random_cochain, random_odd_map, rng, space};
use infalg::base::reduced_composition;
use infalg::bracket::{bracket_with, family_bracket, BracketKind};
use infalg::cochain::{Cochain, Flavor};
use infalg::graded::Parity;
use infalg::scalar::Scalar;
use proptest::prelude::*;
use rand::Rng;

/// kl + (k+1)(l+1) + (k-1)l reduces to kl + k + 1, one more than (l-1)k, so the two signs are always opposite.
#[test]
fn sign_exponents_differ_by_one_for_small_arities() {
    for k in 1..=8usize {
        for l in 1..=8usize {
            let lhs = k * l + (k + 1) * (l + 1) + (k - 1) * l;
            let rhs = (l - 1) * k;
            assert_ne!(lhs % 2, rhs % 2, "k = {k}, l = {l}");
            assert_eq!(lhs % 2, (rhs + 1) % 2);
        }
    }
}

fn flavor_of(tensor: bool) -> Flavor {
    if tensor {
        Flavor::Tensor
    } else {
        Flavor::Exterior
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// `{τ_k, τ_l} = P(k/l) + P(l/k)` for good-odd cochains, hence the symmetric form of the reduction.
    #[test]
    fn pair_bracket_is_the_symmetrized_composition(seed in any::<u64>(), tensor in any::<bool>(), k in 1usize..=3, l in 1usize..=3) {
        let mut rng = rng(seed);
        let flavor = flavor_of(tensor);
        let v = space(&[0, 1]);
        let f = random_cochain(&mut rng, &v, flavor, k, Parity::of(k as i64), 0.7);
        let g = random_cochain(&mut rng, &v, flavor, l, Parity::of(l as i64), 0.7);
        let mut p = reduced_composition(&f, &g).unwrap();
        p.add_scaled(&reduced_composition(&g, &f).unwrap(), &Scalar::one()).unwrap();
        let fg = bracket_with(&f, &g, BracketKind::Modified).unwrap();
        let gf = bracket_with(&g, &f, BracketKind::Modified).unwrap();
        prop_assert_eq!(&fg, &p);
        let mut sum = fg.clone();
        sum.add_scaled(&gf, &Scalar::one()).unwrap();
        prop_assert_eq!(sum, p.scaled(&Scalar::from_i64(2)));
    }

    /// `Σ_{k+l=n+1} {τ_k, τ_l} = 2 Σ_{k+l=n+1} P(k/l)` for a random odd `τ`.
    #[test]
    fn reduction_identity_for_whole_maps(seed in any::<u64>(), tensor in any::<bool>()) {
        let mut rng = rng(seed);
        let flavor = flavor_of(tensor);
        let v = space(&[0, 1]);
        let tau = random_odd_map(&mut rng, &v, flavor, 3, 0.6);
        let square = family_bracket(tau.family(), tau.family(), 3, BracketKind::Modified).unwrap();
        for n in 1..=3 {
            let mut reduced = Cochain::zero(&v, flavor, n, Parity::of(n as i64 + 1)).unwrap();
            for k in 1..=n {
                let l = n + 1 - k;
                if let (Some(a), Some(b)) = (tau.component(k), tau.component(l)) {
                    reduced.add_scaled(&reduced_composition(a, b).unwrap(), &Scalar::one()).unwrap();
                }
            }
            prop_assert_eq!(square.component_or_zero(n), reduced.scaled(&Scalar::from_i64(2)));
        }
    }
}

/// The per-pair form `{τ_k,τ_l} + {τ_l,τ_k} = 2 P(k/l)` drops `P(l/k)`; it fails in general.
#[test]
fn per_pair_reduction_needs_both_compositions() {
    let mut rng = rng(3);
    let v = space(&[0, 1]);
    let mut failures = 0;
    for _ in 0..50 {
        let k = rng.gen_range(1..=3);
        let l = rng.gen_range(1..=3);
        if k == l {
            continue;
        }
        let f = random_cochain(&mut rng, &v, Flavor::Exterior, k, Parity::of(k as i64), 0.7);
        let g = random_cochain(&mut rng, &v, Flavor::Exterior, l, Parity::of(l as i64), 0.7);
        let mut sum = bracket_with(&f, &g, BracketKind::Modified).unwrap();
        sum.add_scaled(&bracket_with(&g, &f, BracketKind::Modified).unwrap(), &Scalar::one()).unwrap();
        if sum != reduced_composition(&f, &g).unwrap().scaled(&Scalar::from_i64(2)) {
            failures += 1;
        }
    }
    assert!(failures > 10);
}
