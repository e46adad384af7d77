//! The Massey F-product condition `δ∘α = μ∘(α⊗α)∘Δ` in the DGLA `(C(V), δ, {·,·})`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bracket::{family_bracket, BracketKind};
use crate::coalgebra::{lie_e, lie_f, restricted_e, restricted_f, FilteredCoalgebra};
use crate::cochain::{Family, StructureMap};
use crate::cohomology::{CoboundarySolution, Complex};
use crate::deformation::DeformationSeries;
use crate::error::{Error, Result};
use crate::graded::{Bidegree, Parity};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `δα - μ(α⊗α)Δ`.
    Product,
    /// `δα + ½ μ(α⊗α)Δ`.
    Mc,
}

impl Convention {
    fn coefficient(self) -> Scalar {
        match self {
            Convention::Product => Scalar::from_i64(-1),
            Convention::Mc => Scalar::half(),
        }
    }
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Product => "product",
            Convention::Mc => "mc",
        })
    }
}

/// A degree-one linear map `F1 → C(V)`, given on basis elements.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaMap {
    values: BTreeMap<usize, Family>,
}

impl AlphaMap {
    pub fn new() -> Self {
        AlphaMap { values: BTreeMap::new() }
    }

    /// Assigns `α(x)`; its good degree must be one more than the parity of `x`.
    pub fn set(&mut self, f: &FilteredCoalgebra, x: usize, value: Family) -> Result<()> {
        if x >= f.dim() {
            return Err(Error::Dimension(format!("coalgebra index {x} out of range")));
        }
        if !f.in_f1(x) {
            return Err(Error::Coalgebra(format!("{} is not in F1", f.name(x))));
        }
        let expected = f.parity(x) + Parity::ODD;
        if value.good_parity() != expected && !value.is_zero() {
            return Err(Error::Parity(format!("α({}) must have good degree {expected}", f.name(x))));
        }
        self.values.insert(x, value);
        Ok(())
    }

    pub fn get(&self, x: usize) -> Option<&Family> {
        self.values.get(&x)
    }

    pub fn scaled(&self, s: &Scalar) -> AlphaMap {
        AlphaMap { values: self.values.iter().map(|(k, v)| (*k, v.scaled(s))).collect() }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Family)> {
        self.values.iter().map(|(k, v)| (*k, v))
    }
}

impl Default for AlphaMap {
    fn default() -> Self {
        Self::new()
    }
}

/// The data of a Massey F-product question over `(C(V), δ = {d,·})`.
#[derive(Debug, Clone)]
pub struct MasseyProblem {
    pub coalgebra: FilteredCoalgebra,
    pub structure: StructureMap,
    pub arity_cap: usize,
    /// Representative cocycles of `a(x)` for `x ∈ F0`.
    pub a: BTreeMap<usize, Family>,
    /// Representative cocycles of `b(x)` for basis elements outside `F1`.
    pub b: Option<BTreeMap<usize, Family>>,
}

impl MasseyProblem {
    pub fn new(coalgebra: FilteredCoalgebra, structure: StructureMap, arity_cap: usize) -> Self {
        MasseyProblem { coalgebra, structure, arity_cap, a: BTreeMap::new(), b: None }
    }

    fn complex(&self) -> Complex {
        Complex::new(&self.structure, BracketKind::Modified, self.arity_cap)
    }
}

/// `Σ c (-1)^{⟨(1,0), bdeg u⟩} {α(u), α(v)}` over `Δx = Σ c u⊗v`.
pub fn alpha_square(alpha: &AlphaMap, problem: &MasseyProblem, x: usize) -> Result<Family> {
    let f = &problem.coalgebra;
    let d = &problem.structure;
    let good = f.parity(x);
    let mut out = Family::zero(d.space(), d.flavor(), good);
    let odd_map = Bidegree::new(Parity::ODD, 0);
    for (u, v, c) in f.delta(x) {
        let missing = |i: usize| Error::Missing(format!("α({}) is needed for Δ{}", f.name(i), f.name(x)));
        let au = alpha.get(*u).ok_or_else(|| missing(*u))?;
        let av = alpha.get(*v).ok_or_else(|| missing(*v))?;
        let sign = Scalar::sign(odd_map.pairing(f.bidegree(*u), f.pairing()).is_odd());
        let term = family_bracket(au, av, problem.arity_cap, BracketKind::Modified)?;
        if !term.is_zero() {
            out.add_scaled(&term, &(&sign * c))?;
        }
    }
    Ok(out)
}

/// The residual of the Massey equation on every basis element of `F1`.
pub fn massey_residual(alpha: &AlphaMap, problem: &MasseyProblem, convention: Convention) -> Result<BTreeMap<String, Family>> {
    let f = &problem.coalgebra;
    let cx = problem.complex();
    let coef = convention.coefficient();
    let mut out = BTreeMap::new();
    for x in (0..f.dim()).filter(|&x| f.in_f1(x)) {
        let ax = alpha.get(x).ok_or_else(|| Error::Missing(format!("α({}) is not given", f.name(x))))?;
        let mut r = cx.apply(ax)?;
        let sq = alpha_square(alpha, problem, x)?;
        if r.is_zero() {
            r = Family::zero(sq.space(), sq.flavor(), sq.good_parity());
        }
        r.add_scaled(&sq, &coef)?;
        out.insert(f.name(x).to_string(), r);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MasseyVerdict {
    /// "triviality" when `F1 = F`, otherwise "containment".
    pub statement: String,
    pub holds: bool,
    pub residual_ok: bool,
    pub first_residual_failure: Option<String>,
    pub a_ok: bool,
    pub first_a_failure: Option<String>,
    pub b_ok: bool,
    pub first_b_failure: Option<String>,
}

fn is_exact(cx: &Complex, f: &Family) -> Result<bool> {
    if f.is_zero() {
        return Ok(true);
    }
    Ok(match cx.solve_total(f) {
        Ok(CoboundarySolution::Solved(_)) => true,
        Ok(CoboundarySolution::Obstructed { .. }) | Err(Error::NotCocycle(_)) => false,
        Err(e) => return Err(e),
    })
}

/// Checks the Massey equation and both diagrams.
pub fn massey_verify(problem: &MasseyProblem, alpha: &AlphaMap, convention: Convention) -> Result<MasseyVerdict> {
    let f = &problem.coalgebra;
    if let Some(v) = f.check().first() {
        return Err(Error::Coalgebra(v.to_string()));
    }
    if f.is_f1_everything() && problem.b.is_some() {
        return Err(Error::Coalgebra("b must not be given when F1 = F".into()));
    }
    let cx = problem.complex();
    let residual = massey_residual(alpha, problem, convention)?;
    let first_residual_failure = residual.iter().find(|(_, r)| !r.is_zero()).map(|(k, _)| k.clone());

    let mut first_a_failure = None;
    for x in (0..f.dim()).filter(|&x| f.in_f0(x)) {
        let ax = alpha.get(x).ok_or_else(|| Error::Missing(format!("α({}) is not given", f.name(x))))?;
        let mut diff = ax.clone();
        if let Some(ax_class) = problem.a.get(&x) {
            if !ax_class.is_zero() {
                diff.add_scaled(ax_class, &Scalar::from_i64(-1))?;
            }
        }
        if !cx.is_closed(ax)? || !is_exact(&cx, &diff)? {
            first_a_failure = Some(f.name(x).to_string());
            break;
        }
    }

    let mut first_b_failure = None;
    if !f.is_f1_everything() {
        let b = problem.b.clone().unwrap_or_default();
        for x in (0..f.dim()).filter(|&x| !f.in_f1(x)) {
            let mut img = alpha_square(alpha, problem, x)?;
            if !cx.is_closed(&img)? {
                first_b_failure = Some(f.name(x).to_string());
                break;
            }
            if let Some(bx) = b.get(&x) {
                if !bx.is_zero() {
                    img.add_scaled(bx, &Scalar::from_i64(-1))?;
                }
            }
            if !is_exact(&cx, &img)? {
                first_b_failure = Some(f.name(x).to_string());
                break;
            }
        }
    }
    let residual_ok = first_residual_failure.is_none();
    let a_ok = first_a_failure.is_none();
    let b_ok = first_b_failure.is_none();
    Ok(MasseyVerdict {
        statement: if f.is_f1_everything() { "triviality".into() } else { "containment".into() },
        holds: residual_ok && a_ok && b_ok,
        residual_ok,
        first_residual_failure,
        a_ok,
        first_a_failure,
        b_ok,
        first_b_failure,
    })
}

/// `α(e^k) = γ_k`, `α(f^k) = β_k` on the Lie family (product convention).
pub fn alpha_from_series_lie(f: &FilteredCoalgebra, series: &DeformationSeries) -> Result<AlphaMap> {
    let mut alpha = AlphaMap::new();
    for k in 1..=series.order {
        if let Ok(x) = f.index_of(&lie_e(k)) {
            alpha.set(f, x, series.gamma[k].clone())?;
        }
        if let Ok(x) = f.index_of(&lie_f(k)) {
            alpha.set(f, x, series.beta[k].clone())?;
        }
    }
    Ok(alpha)
}

/// `α(e^{p,q}) = φ_{p,q}`, `α(f^{p,q}) = ψ_{p,q}` (zero for `q ≤ 0`) on the restricted family.
pub fn alpha_from_series_restricted(f: &FilteredCoalgebra, series: &DeformationSeries) -> Result<AlphaMap> {
    let mut alpha = AlphaMap::new();
    let space = series.gamma[0].space();
    let flavor = series.flavor;
    for x in 0..f.dim() {
        let name = f.name(x);
        let Some((is_e, p, q)) = parse_restricted(name) else {
            continue;
        };
        if p > series.order {
            continue;
        }
        let source = if is_e { &series.gamma[p] } else { &series.beta[p] };
        let good = if is_e { Parity::ODD } else { Parity::EVEN };
        let value = if q >= 1 {
            source.component(q as usize).map(|c| Family::from_cochain(c.clone())).unwrap_or_else(|| Family::zero(space, flavor, good))
        } else {
            Family::zero(space, flavor, good)
        };
        debug_assert!(name == restricted_e(p, q) || name == restricted_f(p, q));
        alpha.set(f, x, value)?;
    }
    Ok(alpha)
}

fn parse_restricted(name: &str) -> Option<(bool, usize, i64)> {
    let is_e = name.starts_with("e[");
    if !is_e && !name.starts_with("f[") {
        return None;
    }
    let inner = name.get(2..name.len().checked_sub(1)?)?;
    let (i, j) = inner.split_once(',')?;
    Some((is_e, i.parse().ok()?, j.parse().ok()?))
}

/// Problem data `a(e^1) = γ_1`, `a(f^1) = β_1` for the Lie family.
pub fn lie_problem(f: FilteredCoalgebra, d: &StructureMap, gamma1: &Family, beta1: &Family, cap: usize) -> Result<MasseyProblem> {
    let e1 = f.index_of(&lie_e(1))?;
    let f1 = f.index_of(&lie_f(1))?;
    let mut p = MasseyProblem::new(f, d.clone(), cap);
    p.a.insert(e1, gamma1.clone());
    p.a.insert(f1, beta1.clone());
    Ok(p)
}

/// Problem data `a(e^{1,j}) = c_j`, `a(f^{1,j}) = b_j` for the restricted family.
pub fn restricted_problem(f: FilteredCoalgebra, d: &StructureMap, series_one: (&Family, &Family), cap: usize) -> Result<MasseyProblem> {
    let mut a = BTreeMap::new();
    for x in 0..f.dim() {
        if let Some((is_e, 1, q)) = parse_restricted(f.name(x)) {
            let src = if is_e { series_one.0 } else { series_one.1 };
            let good = if is_e { Parity::ODD } else { Parity::EVEN };
            let v = if q >= 1 { src.component(q as usize).map(|c| Family::from_cochain(c.clone())) } else { None };
            a.insert(x, v.unwrap_or_else(|| Family::zero(d.space(), d.flavor(), good)));
        }
    }
    let mut p = MasseyProblem::new(f, d.clone(), cap);
    p.a = a;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::coalgebra::build_f_lie;
    use crate::cochain::{Cochain, Flavor};
    use crate::graded::{GradedVectorSpace, Vector};

    fn abelian2() -> StructureMap {
        let v = Arc::new(GradedVectorSpace::new([("x", Parity::EVEN), ("y", Parity::EVEN)]).unwrap());
        StructureMap::zero(&v, Flavor::Exterior)
    }

    #[test]
    fn zero_alpha_has_zero_residual() {
        let d = abelian2();
        let f = build_f_lie(3).unwrap();
        let mut alpha = AlphaMap::new();
        for x in 0..f.dim() {
            let good = f.parity(x) + Parity::ODD;
            alpha.set(&f, x, Family::zero(d.space(), Flavor::Exterior, good)).unwrap();
        }
        let problem = MasseyProblem::new(f, d, 3);
        for conv in [Convention::Product, Convention::Mc] {
            assert!(massey_residual(&alpha, &problem, conv).unwrap().values().all(Family::is_zero));
        }
    }

    #[test]
    fn order_two_residual_is_half_self_bracket() {
        let d = abelian2();
        let v = d.space().clone();
        let f = build_f_lie(2).unwrap();
        let g1 = Cochain::zero(&v, Flavor::Exterior, 2, Parity::EVEN).unwrap().with_entry(&[0, 1], Vector::basis(1)).unwrap();
        let g1 = Family::from_cochain(g1);
        let mut alpha = AlphaMap::new();
        for x in 0..f.dim() {
            let good = f.parity(x) + Parity::ODD;
            alpha.set(&f, x, Family::zero(&v, Flavor::Exterior, good)).unwrap();
        }
        alpha.set(&f, f.index_of("e1").unwrap(), g1.clone()).unwrap();
        let problem = MasseyProblem::new(f, d, 3);
        let r = massey_residual(&alpha, &problem, Convention::Product).unwrap();
        let expected = family_bracket(&g1, &g1, 3, BracketKind::Modified).unwrap().scaled(&Scalar::half());
        assert_eq!(r["e2"], expected);
    }

    #[test]
    fn names_of_restricted_elements_parse() {
        assert_eq!(parse_restricted("e[2,-1]"), Some((true, 2, -1)));
        assert_eq!(parse_restricted("f[1,3]"), Some((false, 1, 3)));
        assert_eq!(parse_restricted("e1"), None);
    }
}
