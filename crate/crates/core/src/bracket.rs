//! Gerstenhaber and exterior brackets, the modified bracket, the induced
//! differential, and structure checks through `{d,d}`.

use serde::Serialize;

use crate::cochain::{Cochain, Family, Flavor, StructureMap};
use crate::error::{Error, Result};
use crate::graded::{exterior_sign, unshuffles, Parity, Vector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketKind {
    /// The coderivation bracket, a Lie bracket for the usual grading.
    Plain,
    /// `{φ,ψ} = (-1)^{(k-1)e(ψ)} [φ,ψ]`, a Lie bracket for the good grading.
    Modified,
}

fn check_pair(phi: &Cochain, psi: &Cochain, flavor: Flavor) -> Result<()> {
    if phi.flavor() != flavor || psi.flavor() != flavor {
        return Err(Error::Flavor(format!("{flavor} bracket of {} and {} cochains", phi.flavor(), psi.flavor())));
    }
    if phi.space() != psi.space() {
        return Err(Error::Dimension("cochains live on different spaces".into()));
    }
    Ok(())
}

/// Adds `coef * outer(args[..j], inner(args[j..j+l]), args[j+l..])` to `out`.
fn compose_at(outer: &Cochain, inner: &Cochain, args: &[usize], j: usize, coef: &Scalar, out: &mut Vector) {
    let l = inner.arity();
    if let Some((w, neg)) = inner.lookup(&args[j..j + l]) {
        let c = if neg { -coef } else { coef.clone() };
        outer.eval_slot(&args[..j], w, &args[j + l..], out, &c);
    }
}

/// Gerstenhaber bracket of tensor cochains.
pub fn bracket_tensor(phi: &Cochain, psi: &Cochain) -> Result<Cochain> {
    check_pair(phi, psi, Flavor::Tensor)?;
    let space = phi.space();
    let (k, l) = (phi.arity(), psi.arity());
    let n = k + l - 1;
    let (ep, eq) = (phi.parity(), psi.parity());
    let mut out = Cochain::zero(space, Flavor::Tensor, n, ep + eq)?;
    if phi.is_zero() || psi.is_zero() {
        return Ok(out);
    }
    let second = -Scalar::sign((ep * eq + Parity::of(((k - 1) * (l - 1)) as i64)).is_odd());
    for args in space.tensor_tuples(n) {
        let mut value = Vector::zero();
        let mut prefix = Parity::EVEN;
        for j in 0..k {
            if j > 0 {
                prefix = prefix + space.parity(args[j - 1]);
            }
            let r = eq * prefix + Parity::of((j * (l - 1)) as i64);
            compose_at(phi, psi, &args, j, &Scalar::sign(r.is_odd()), &mut value);
        }
        let mut prefix = Parity::EVEN;
        for j in 0..l {
            if j > 0 {
                prefix = prefix + space.parity(args[j - 1]);
            }
            let s = ep * prefix + Parity::of((j * (k - 1)) as i64);
            let coef = if s.is_odd() { -&second } else { second.clone() };
            compose_at(psi, phi, &args, j, &coef, &mut value);
        }
        out.insert_canonical(args, value);
    }
    Ok(out)
}

/// `Σ_{σ ∈ sh(l,k-1)} (-1)^σ ε(σ) outer(inner(v_σ(1..l)), v_σ(l+1..n))` at one tuple.
fn exterior_shuffle_sum(outer: &Cochain, inner: &Cochain, args: &[usize], shuffles: &[Vec<usize>], coef: &Scalar, out: &mut Vector) {
    let space = outer.space();
    let parities = space.parities_of(args);
    let l = inner.arity();
    let mut permuted = vec![0usize; args.len()];
    for sigma in shuffles {
        for (i, &s) in sigma.iter().enumerate() {
            permuted[i] = args[s];
        }
        let Some((w, neg)) = inner.lookup(&permuted[..l]) else {
            continue;
        };
        let sign = exterior_sign(sigma, &parities).expect("shuffle length matches tuple");
        let mut c = &sign * coef;
        if neg {
            c = -c;
        }
        outer.eval_slot(&[], w, &permuted[l..], out, &c);
    }
}

/// Bracket of exterior cochains as coderivations of `ΛV`.
pub fn bracket_exterior(phi: &Cochain, psi: &Cochain) -> Result<Cochain> {
    check_pair(phi, psi, Flavor::Exterior)?;
    let space = phi.space();
    let (k, l) = (phi.arity(), psi.arity());
    let n = k + l - 1;
    let (ep, eq) = (phi.parity(), psi.parity());
    let mut out = Cochain::zero(space, Flavor::Exterior, n, ep + eq)?;
    if phi.is_zero() || psi.is_zero() {
        return Ok(out);
    }
    let first_shuffles = unshuffles(l, k - 1);
    let second_shuffles = unshuffles(k, l - 1);
    let second = -Scalar::sign((ep * eq + Parity::of(((k - 1) * (l - 1)) as i64)).is_odd());
    for args in space.exterior_tuples(n) {
        let mut value = Vector::zero();
        exterior_shuffle_sum(phi, psi, &args, &first_shuffles, &Scalar::one(), &mut value);
        exterior_shuffle_sum(psi, phi, &args, &second_shuffles, &second, &mut value);
        out.insert_canonical(args, value);
    }
    Ok(out)
}

/// The plain bracket of the cochains' common flavor.
pub fn bracket(phi: &Cochain, psi: &Cochain) -> Result<Cochain> {
    match phi.flavor() {
        Flavor::Tensor => bracket_tensor(phi, psi),
        Flavor::Exterior => bracket_exterior(phi, psi),
    }
}

/// Sign relating the modified bracket to the plain one.
pub fn modification_sign(phi: &Cochain, psi: &Cochain) -> Scalar {
    Scalar::sign(phi.arity() % 2 == 0 && psi.parity().is_odd())
}

pub fn modified_bracket(phi: &Cochain, psi: &Cochain) -> Result<Cochain> {
    let b = bracket(phi, psi)?;
    let sign = modification_sign(phi, psi);
    Ok(if sign.is_one() { b } else { b.scaled(&sign) })
}

pub fn bracket_with(phi: &Cochain, psi: &Cochain, kind: BracketKind) -> Result<Cochain> {
    match kind {
        BracketKind::Plain => bracket(phi, psi),
        BracketKind::Modified => modified_bracket(phi, psi),
    }
}

/// Bracket of two families, keeping output arities `≤ cap`.
pub fn family_bracket(a: &Family, b: &Family, cap: usize, kind: BracketKind) -> Result<Family> {
    if a.flavor() != b.flavor() {
        return Err(Error::Flavor(format!("{} vs {}", a.flavor(), b.flavor())));
    }
    let mut out = Family::zero(a.space(), a.flavor(), a.good_parity() + b.good_parity());
    for phi in a.components() {
        for psi in b.components() {
            if phi.arity() + psi.arity() - 1 > cap {
                continue;
            }
            out.add_cochain(&bracket_with(phi, psi, kind)?, &Scalar::one())?;
        }
    }
    Ok(out)
}

/// `δφ = Σ_k {d_k, φ}`, one component per output arity `≤ cap`.
pub fn differential(d: &StructureMap, phi: &Cochain, cap: usize) -> Result<Family> {
    differential_with(d, &Family::from_cochain(phi.clone()), cap, BracketKind::Modified)
}

/// `Σ_k {d_k, f}` (or the plain bracket) for a whole family.
pub fn differential_with(d: &StructureMap, f: &Family, cap: usize, kind: BracketKind) -> Result<Family> {
    if d.flavor() != f.flavor() {
        return Err(Error::Flavor(format!("{} structure acting on {} cochain", d.flavor(), f.flavor())));
    }
    family_bracket(d.family(), f, cap, kind)
}

/// Outcome of a structure-equation check at one arity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArityVerdict {
    pub arity: usize,
    /// First basis tuple (lexicographic order) where the relation fails.
    pub witness: Option<Vec<usize>>,
    /// The nonzero value at the witness.
    #[serde(skip)]
    pub value: Option<Vector>,
}

impl ArityVerdict {
    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub flavor: Flavor,
    pub arity_cap: usize,
    pub verdicts: Vec<ArityVerdict>,
}

impl StructureReport {
    pub fn holds(&self) -> bool {
        self.verdicts.iter().all(ArityVerdict::holds)
    }

    pub fn first_failure(&self) -> Option<&ArityVerdict> {
        self.verdicts.iter().find(|v| !v.holds())
    }

    /// Verdicts and witnesses agree arity by arity (values may differ by a unit).
    pub fn agrees_with(&self, other: &StructureReport) -> bool {
        self.arity_cap == other.arity_cap
            && self.verdicts.len() == other.verdicts.len()
            && self.verdicts.iter().zip(&other.verdicts).all(|(a, b)| a.arity == b.arity && a.witness == b.witness)
    }
}

/// The arity-`n` component of `{d,d}`.
pub fn self_bracket_component(d: &StructureMap, n: usize) -> Result<Cochain> {
    let mut total = Cochain::zero(d.space(), d.flavor(), n, Parity::of(n as i64 + 1))?;
    for k in 1..=n {
        let l = n + 1 - k;
        if let (Some(a), Some(b)) = (d.component(k), d.component(l)) {
            total.add_scaled(&modified_bracket(a, b)?, &Scalar::one())?;
        }
    }
    Ok(total)
}

/// Checks `{d,d} = 0` arity by arity up to `cap`.
///
/// In characteristic 2 the self-bracket is twice the structure relation and
/// vanishes identically, so this check says nothing there; use
/// [`crate::relations::check_structure_direct`] instead.
pub fn check_structure(d: &StructureMap, cap: usize) -> Result<StructureReport> {
    let mut verdicts = Vec::with_capacity(cap);
    for n in 1..=cap {
        let c = self_bracket_component(d, n)?;
        let first = c.entries().next().map(|(k, v)| (k.clone(), v.clone()));
        verdicts.push(ArityVerdict { arity: n, witness: first.as_ref().map(|f| f.0.clone()), value: first.map(|f| f.1) });
    }
    Ok(StructureReport { flavor: d.flavor(), arity_cap: cap, verdicts })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::graded::GradedVectorSpace;

    fn even_space(names: &[&str]) -> Arc<GradedVectorSpace> {
        Arc::new(GradedVectorSpace::new(names.iter().map(|n| (*n, Parity::EVEN))).unwrap())
    }

    fn dual_numbers_product() -> (Arc<GradedVectorSpace>, Cochain) {
        let v = even_space(&["1", "x"]);
        let m = Cochain::zero(&v, Flavor::Tensor, 2, Parity::EVEN)
            .unwrap()
            .with_entry(&[0, 0], Vector::basis(0))
            .unwrap()
            .with_entry(&[0, 1], Vector::basis(1))
            .unwrap()
            .with_entry(&[1, 0], Vector::basis(1))
            .unwrap();
        (v, m)
    }

    #[test]
    fn associative_product_self_bracket_vanishes() {
        let (_, m) = dual_numbers_product();
        let b = bracket_tensor(&m, &m).unwrap();
        assert_eq!(b.arity(), 3);
        assert!(b.is_zero());
    }

    #[test]
    fn arities_and_zero_arguments() {
        let (v, m) = dual_numbers_product();
        let three = Cochain::zero(&v, Flavor::Tensor, 3, Parity::EVEN).unwrap().with_entry(&[1, 1, 1], Vector::basis(0)).unwrap();
        assert_eq!(bracket_tensor(&m, &three).unwrap().arity(), 4);
        let zero = Cochain::zero(&v, Flavor::Tensor, 3, Parity::EVEN).unwrap();
        assert!(bracket_tensor(&m, &zero).unwrap().is_zero());
        let ext = Cochain::zero(&v, Flavor::Exterior, 2, Parity::EVEN).unwrap();
        assert!(bracket(&m, &ext).is_err());
    }

    #[test]
    fn lie_algebras_satisfy_jacobi() {
        let v = even_space(&["x", "y"]);
        let l2 = Cochain::zero(&v, Flavor::Exterior, 2, Parity::EVEN).unwrap().with_entry(&[0, 1], Vector::basis(1)).unwrap();
        assert!(bracket_exterior(&l2, &l2).unwrap().is_zero());

        let w = even_space(&["x", "y", "z"]);
        let so3 = Cochain::zero(&w, Flavor::Exterior, 2, Parity::EVEN)
            .unwrap()
            .with_entry(&[0, 1], Vector::basis(2))
            .unwrap()
            .with_entry(&[1, 2], Vector::basis(0))
            .unwrap()
            .with_entry(&[2, 0], Vector::basis(1))
            .unwrap();
        assert!(bracket_exterior(&so3, &so3).unwrap().is_zero());
        let d = StructureMap::from_components(&w, Flavor::Exterior, [so3]).unwrap();
        assert!(check_structure(&d, 4).unwrap().holds());
    }

    #[test]
    fn modification_sign_cases() {
        let v = Arc::new(GradedVectorSpace::new([("x", Parity::EVEN), ("y", Parity::ODD)]).unwrap());
        let odd1 = Cochain::zero(&v, Flavor::Tensor, 1, Parity::ODD).unwrap().with_entry(&[0], Vector::basis(1)).unwrap();
        let even2 = Cochain::zero(&v, Flavor::Tensor, 2, Parity::EVEN).unwrap().with_entry(&[0, 0], Vector::basis(0)).unwrap();
        // k = 1: no sign
        assert_eq!(modified_bracket(&odd1, &even2).unwrap(), bracket(&odd1, &even2).unwrap());
        // k = 2 and ψ odd: sign flips
        let b = bracket(&even2, &odd1).unwrap();
        assert!(!b.is_zero());
        assert_eq!(modified_bracket(&even2, &odd1).unwrap(), b.scaled(&Scalar::from_i64(-1)));
    }

    #[test]
    fn chevalley_eilenberg_differential() {
        let v = even_space(&["x", "y"]);
        let l2 = Cochain::zero(&v, Flavor::Exterior, 2, Parity::EVEN).unwrap().with_entry(&[0, 1], Vector::basis(1)).unwrap();
        let d = StructureMap::from_components(&v, Flavor::Exterior, [l2]).unwrap();
        let phi = Cochain::zero(&v, Flavor::Exterior, 1, Parity::EVEN).unwrap().with_entry(&[0], Vector::basis(0)).unwrap();
        let dphi = differential(&d, &phi, 4).unwrap();
        // l2(φx, y) + l2(x, φy) - φ(l2(x, y)) = y
        assert_eq!(dphi.component(2).unwrap().value_at(&[0, 1]), Vector::basis(1));
        assert!(differential(&d, &phi.scaled(&Scalar::zero()), 4).unwrap().is_zero());
    }

    #[test]
    fn non_associative_product_fails_at_three() {
        let v = even_space(&["1", "x"]);
        let m = Cochain::zero(&v, Flavor::Tensor, 2, Parity::EVEN)
            .unwrap()
            .with_entry(&[0, 0], Vector::basis(0))
            .unwrap()
            .with_entry(&[0, 1], Vector::basis(1))
            .unwrap()
            .with_entry(&[1, 1], Vector::basis(0))
            .unwrap();
        let d = StructureMap::from_components(&v, Flavor::Tensor, [m]).unwrap();
        let report = check_structure(&d, 4).unwrap();
        let fail = report.first_failure().unwrap();
        assert_eq!(fail.arity, 3);
    }

    #[test]
    fn a_square_zero_differential_is_a_structure() {
        let v = Arc::new(GradedVectorSpace::new([("a", Parity::EVEN), ("b", Parity::ODD)]).unwrap());
        let d1 = Cochain::zero(&v, Flavor::Tensor, 1, Parity::ODD).unwrap().with_entry(&[0], Vector::basis(1)).unwrap();
        let d = StructureMap::from_components(&v, Flavor::Tensor, [d1]).unwrap();
        assert!(check_structure(&d, 3).unwrap().holds());
    }
}
