mod common;

use common::catalogue::catalogue;
use common::{random_cochain, random_odd_map, rng};
use infalg::bracket::{check_structure, differential_with, BracketKind};
use infalg::cochain::{Family, Flavor, StructureMap};
use infalg::graded::Parity;
use infalg::relations::check_structure_direct;
use infalg::scalar::Scalar;
use rand::Rng;

#[test]
fn catalogue_structures_hold_under_both_checkers() {
    let all = catalogue();
    assert!(all.len() >= 20);
    for (name, d) in &all {
        assert!(check_structure_direct(d, 4).unwrap().holds(), "{name}: {:?}", check_structure_direct(d, 4).unwrap().first_failure());
        assert!(check_structure(d, 4).unwrap().holds(), "{name}");
    }
    let cubic = &all.iter().find(|(n, _)| *n == "cubic l-infinity").unwrap().1;
    assert!(cubic.component(3).is_some_and(|c| !c.is_zero()));
}

#[test]
fn differential_squares_to_zero() {
    let mut rng = rng(41);
    let cap = 4;
    for (name, d) in catalogue() {
        let v = d.space().clone();
        let flavor = d.flavor();
        for good in [Parity::EVEN, Parity::ODD] {
            for _ in 0..3 {
                let mut phi = Family::zero(&v, flavor, good);
                for k in 1..=3 {
                    let c = random_cochain(&mut rng, &v, flavor, k, good + Parity::of(k as i64 - 1), 0.6);
                    phi.add_cochain(&c, &Scalar::one()).unwrap();
                }
                let once = differential_with(&d, &phi, cap, BracketKind::Modified).unwrap();
                let twice = differential_with(&d, &once, cap, BracketKind::Modified).unwrap();
                assert!(twice.is_zero(), "{name}: δ² ≠ 0 at {:?}", twice.first_nonzero());
            }
        }
    }
}

#[test]
fn differential_of_a_broken_structure_does_not_square_to_zero() {
    // [x,y] = x, [y,z] = y, [x,z] = z violates Jacobi
    let v = common::catalogue::named_space(&[("x", 0), ("y", 0), ("z", 0)]);
    let l2 = common::catalogue::table(&v, Flavor::Exterior, 2, Parity::EVEN, &[(&[0, 1], &[(0, 1)]), (&[1, 2], &[(1, 1)]), (&[0, 2], &[(2, 1)])]);
    let d = StructureMap::from_components(&v, Flavor::Exterior, [l2]).unwrap();
    let mut found = false;
    for i in 0..3 {
        let phi = common::catalogue::table(&v, Flavor::Exterior, 1, Parity::EVEN, &[(&[i], &[(i, 1)])]);
        let once = differential_with(&d, &Family::from_cochain(phi), 4, BracketKind::Modified).unwrap();
        found |= !differential_with(&d, &once, 4, BracketKind::Modified).unwrap().is_zero();
    }
    assert!(found);
}

/// Catalogue entries, perturbations of them and random odd maps.
fn agreement_pool() -> Vec<StructureMap> {
    let mut rng = rng(42);
    let mut pool: Vec<StructureMap> = catalogue().into_iter().map(|(_, d)| d).collect();
    for d in pool.clone() {
        let k = rng.gen_range(1..=3);
        let noise = random_cochain(&mut rng, d.space(), d.flavor(), k, Parity::of(k as i64), 0.6);
        let mut fam = d.family().clone();
        fam.add_cochain(&noise, &Scalar::one()).unwrap();
        pool.push(StructureMap::new(fam).unwrap());
    }
    for n in 0..40 {
        let flavor = if n % 2 == 0 { Flavor::Exterior } else { Flavor::Tensor };
        let v = common::random_space(&mut rng, 3);
        pool.push(random_odd_map(&mut rng, &v, flavor, 3, 0.4));
    }
    pool
}

#[test]
fn bracket_and_direct_checkers_agree_with_matching_witnesses() {
    let pool = agreement_pool();
    assert!(pool.len() >= 50);
    let mut broken = 0;
    for d in &pool {
        let a = check_structure(d, 4).unwrap();
        let b = check_structure_direct(d, 4).unwrap();
        assert!(a.agrees_with(&b), "{a:?}\n{b:?}");
        for (x, y) in a.verdicts.iter().zip(&b.verdicts) {
            // {d,d} is twice the relation; the exterior relation carries an extra (-1)^{n-1}
            if let (Some(u), Some(w)) = (&x.value, &y.value) {
                let flip = d.flavor() == Flavor::Exterior && x.arity % 2 == 0;
                assert_eq!(*u, w.scaled(&Scalar::from_i64(if flip { -2 } else { 2 })));
            }
        }
        broken += !a.holds() as usize;
    }
    assert!(broken >= 15, "{broken}");
}
