//! Direct evaluation of the A∞ and generalized Jacobi relations.
//!
//! Deliberately independent of [`crate::bracket`]: shuffles and signs are
//! enumerated here from scratch and cochains are only touched through
//! [`Cochain::eval`], so agreement of the two checkers is meaningful.

use crate::bracket::{ArityVerdict, StructureReport};
use crate::cochain::{Cochain, Flavor, StructureMap};
use crate::error::Result;
use crate::graded::{GradedVectorSpace, Vector};
use crate::scalar::Scalar;

fn basis_vectors(args: &[usize]) -> Vec<Vector> {
    args.iter().map(|&a| Vector::basis(a)).collect()
}

/// Left-hand side of the A∞ relation of arity `n` at a basis tuple.
pub fn ainf_relation(d: &StructureMap, args: &[usize]) -> Result<Vector> {
    let space = d.space();
    let n = args.len();
    let mut total = Vector::zero();
    for k in 1..=n {
        let l = n + 1 - k;
        let (Some(mk), Some(ml)) = (d.component(k), d.component(l)) else {
            continue;
        };
        for j in 0..k {
            let before: usize = args[..j].iter().filter(|&&a| space.parity(a).is_odd()).count();
            let r = l * before + j * (l - 1) + (k - 1) * l;
            let inner = ml.eval(&basis_vectors(&args[j..j + l]))?;
            if inner.is_zero() {
                continue;
            }
            let mut outer_args = basis_vectors(&args[..j]);
            outer_args.push(inner);
            outer_args.extend(basis_vectors(&args[j + l..]));
            let value = mk.eval(&outer_args)?;
            total.add_scaled(&value, &Scalar::sign(r % 2 == 1));
        }
    }
    Ok(total)
}

/// All `k`-element subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// `(-1)^σ ε(σ)` for moving the chosen positions to the front, as a parity.
fn front_shuffle_odd(space: &GradedVectorSpace, args: &[usize], chosen: &[usize]) -> bool {
    let mut odd = false;
    // Each chosen element jumps over the unchosen elements that precede it;
    // swapping u past w contributes (-1)·(-1)^{|u||w|}.
    for &c in chosen {
        for p in 0..c {
            if !chosen.contains(&p) {
                let both_odd = space.parity(args[p]).is_odd() && space.parity(args[c]).is_odd();
                if !both_odd {
                    odd = !odd;
                }
            }
        }
    }
    odd
}

/// Left-hand side of the generalized Jacobi identity of arity `n` at a basis tuple.
pub fn linf_relation(d: &StructureMap, args: &[usize]) -> Result<Vector> {
    let space = d.space();
    let n = args.len();
    let mut total = Vector::zero();
    for k in 1..=n {
        let l = n + 1 - k;
        let (Some(lk), Some(ll)) = (d.component(k), d.component(l)) else {
            continue;
        };
        for chosen in subsets(n, k) {
            let odd = front_shuffle_odd(space, args, &chosen) ^ ((k - 1) * l % 2 == 1);
            let inner_args: Vec<usize> = chosen.iter().map(|&c| args[c]).collect();
            let inner = lk.eval(&basis_vectors(&inner_args))?;
            if inner.is_zero() {
                continue;
            }
            let mut outer_args = vec![inner];
            outer_args.extend((0..n).filter(|p| !chosen.contains(p)).map(|p| Vector::basis(args[p])));
            let value = ll.eval(&outer_args)?;
            total.add_scaled(&value, &Scalar::sign(odd));
        }
    }
    Ok(total)
}

pub fn relation(d: &StructureMap, args: &[usize]) -> Result<Vector> {
    match d.flavor() {
        Flavor::Tensor => ainf_relation(d, args),
        Flavor::Exterior => linf_relation(d, args),
    }
}

/// Evaluates the structure relations on every basis tuple of arity `≤ cap`.
pub fn check_structure_direct(d: &StructureMap, cap: usize) -> Result<StructureReport> {
    let space = d.space();
    let mut verdicts = Vec::with_capacity(cap);
    for n in 1..=cap {
        let mut verdict = ArityVerdict { arity: n, witness: None, value: None };
        for args in Cochain::domain_tuples(space, d.flavor(), n) {
            let v = relation(d, &args)?;
            if !v.is_zero() {
                verdict.witness = Some(args);
                verdict.value = Some(v);
                break;
            }
        }
        verdicts.push(verdict);
    }
    Ok(StructureReport { flavor: d.flavor(), arity_cap: cap, verdicts })
}
