//! Hand-built structures that satisfy their structure equations.

use std::sync::Arc;

use infalg::cochain::{Cochain, Flavor, StructureMap};
use infalg::deformation::prolong_restricted;
use infalg::graded::{GradedVectorSpace, Parity, Vector};
use infalg::scalar::Scalar;

pub fn named_space(names: &[(&str, u8)]) -> Arc<GradedVectorSpace> {
    Arc::new(GradedVectorSpace::new(names.iter().map(|(n, p)| (*n, Parity::of(*p as i64)))).unwrap())
}

/// A cochain from `(args, [(output index, coefficient)])` rows.
pub fn table(v: &Arc<GradedVectorSpace>, flavor: Flavor, arity: usize, parity: Parity, rows: &[(&[usize], &[(usize, i64)])]) -> Cochain {
    let mut c = Cochain::zero(v, flavor, arity, parity).unwrap();
    for (args, out) in rows {
        let value: Vector = out.iter().map(|(i, x)| (*i, Scalar::from_i64(*x))).collect();
        c.add_entry(args, &value).unwrap();
    }
    c
}

fn strict(v: &Arc<GradedVectorSpace>, flavor: Flavor, rows: &[(&[usize], &[(usize, i64)])]) -> StructureMap {
    StructureMap::from_components(v, flavor, [table(v, flavor, 2, Parity::EVEN, rows)]).unwrap()
}

/// `V = {a even, b odd}` with `l3(b,b,b) = a`, run through the restricted solver and summed at `t = 1`.
pub fn cubic_linf() -> StructureMap {
    let v = named_space(&[("a", 0), ("b", 1)]);
    let d2 = StructureMap::zero(&v, Flavor::Exterior);
    let l3 = table(&v, Flavor::Exterior, 3, Parity::ODD, &[(&[1, 1, 1], &[(0, 1)])]);
    let series = prolong_restricted(&d2, &[l3], &[], 3, 4).unwrap();
    let series = series.series().expect("the cubic bracket prolongs");
    let mut total = d2.family().clone();
    for g in &series.gamma[1..] {
        total.add_scaled(g, &Scalar::one()).unwrap();
    }
    StructureMap::new(total).unwrap()
}

/// Lie, associative, differential and genuinely infinity examples.
pub fn catalogue() -> Vec<(&'static str, StructureMap)> {
    let ex = Flavor::Exterior;
    let te = Flavor::Tensor;
    let mut out = Vec::new();
    for (name, names, flavor) in [
        ("abelian 1", &[("x", 0u8)][..], ex),
        ("abelian 2", &[("x", 0), ("y", 0)][..], ex),
        ("abelian super", &[("x", 0), ("y", 1)][..], ex),
        ("zero product", &[("x", 0), ("y", 1)][..], te),
    ] {
        out.push((name, StructureMap::zero(&named_space(names), flavor)));
    }

    let v = named_space(&[("x", 0), ("y", 0)]);
    out.push(("[x,y]=y", strict(&v, ex, &[(&[0, 1], &[(1, 1)])])));
    let v = named_space(&[("x", 0), ("y", 0), ("z", 0)]);
    out.push(("heisenberg", strict(&v, ex, &[(&[0, 1], &[(2, 1)])])));
    let v = named_space(&[("e", 0), ("f", 0), ("h", 0)]);
    out.push(("sl2", strict(&v, ex, &[(&[0, 1], &[(2, 1)]), (&[0, 2], &[(0, -2)]), (&[1, 2], &[(1, 2)])])));
    let v = named_space(&[("x", 0), ("t", 1)]);
    out.push(("[x,t]=t", strict(&v, ex, &[(&[0, 1], &[(1, 1)])])));
    // odd generators q with [q,q] = z
    let v = named_space(&[("z", 0), ("q", 1)]);
    out.push(("[q,q]=z", strict(&v, ex, &[(&[1, 1], &[(0, 1)])])));

    let v = named_space(&[("1", 0), ("x", 0)]);
    out.push(("k[x]/x^2", strict(&v, te, &[(&[0, 0], &[(0, 1)]), (&[0, 1], &[(1, 1)]), (&[1, 0], &[(1, 1)])])));
    let v = named_space(&[("1", 0), ("x", 0), ("x^2", 0)]);
    out.push((
        "k[x]/x^3",
        strict(&v, te, &[(&[0, 0], &[(0, 1)]), (&[0, 1], &[(1, 1)]), (&[1, 0], &[(1, 1)]), (&[0, 2], &[(2, 1)]), (&[2, 0], &[(2, 1)]), (&[1, 1], &[(2, 1)])]),
    ));
    let v = named_space(&[("e11", 0), ("e12", 0), ("e22", 0)]);
    out.push((
        "upper triangular",
        strict(&v, te, &[(&[0, 0], &[(0, 1)]), (&[0, 1], &[(1, 1)]), (&[1, 2], &[(1, 1)]), (&[2, 2], &[(2, 1)])]),
    ));
    let v = named_space(&[("1", 0), ("θ", 1)]);
    out.push(("k[θ]", strict(&v, te, &[(&[0, 0], &[(0, 1)]), (&[0, 1], &[(1, 1)]), (&[1, 0], &[(1, 1)])])));
    let v = named_space(&[("x", 0), ("y", 0)]);
    out.push(("left zero", strict(&v, te, &[(&[0, 0], &[(0, 1)]), (&[0, 1], &[(1, 1)])])));

    // complexes a → b
    for (name, flavor) in [("complex (exterior)", ex), ("complex (tensor)", te)] {
        let v = named_space(&[("a", 0), ("b", 1)]);
        let d1 = table(&v, flavor, 1, Parity::ODD, &[(&[0], &[(1, 1)])]);
        out.push((name, StructureMap::from_components(&v, flavor, [d1]).unwrap()));
    }
    // dg Lie: d a = b with [x,a] = a, [x,b] = b
    let v = named_space(&[("x", 0), ("a", 0), ("b", 1)]);
    let d1 = table(&v, ex, 1, Parity::ODD, &[(&[1], &[(2, 1)])]);
    let l2 = table(&v, ex, 2, Parity::EVEN, &[(&[0, 1], &[(1, 1)]), (&[0, 2], &[(2, 1)])]);
    out.push(("dg lie", StructureMap::from_components(&v, ex, [d1, l2]).unwrap()));
    // dg algebra: d x = θ on k[x]/x² ⊕ θ-line, unit 1 with only unit products
    let v = named_space(&[("1", 0), ("x", 0), ("θ", 1)]);
    let d1 = table(&v, te, 1, Parity::ODD, &[(&[1], &[(2, 1)])]);
    let m2 = table(&v, te, 2, Parity::EVEN, &[(&[0, 0], &[(0, 1)]), (&[0, 1], &[(1, 1)]), (&[1, 0], &[(1, 1)]), (&[0, 2], &[(2, 1)]), (&[2, 0], &[(2, 1)])]);
    out.push(("dg algebra", StructureMap::from_components(&v, te, [d1, m2]).unwrap()));

    out.push(("cubic l-infinity", cubic_linf()));
    // a ternary A∞ product m3(b,b,b) = a on the same superspace
    let v = named_space(&[("a", 0), ("b", 1)]);
    let m3 = table(&v, te, 3, Parity::ODD, &[(&[1, 1, 1], &[(0, 1)])]);
    out.push(("ternary a-infinity", StructureMap::from_components(&v, te, [m3]).unwrap()));
    out
}
