//! Order-by-order construction of formal deformations `d_t = Σ t^i (γ_i + θ β_i)`.
//!
//! `θ` is odd with `θ² = 0`, so a series is stored as the two lists of
//! coefficients. `γ_i` are odd and `β_i` even in the good grading; `γ_0 = d`
//! and `β_0 = 0`.

use std::fmt;

use serde::Serialize;

use crate::bracket::{family_bracket, BracketKind};
use crate::cochain::{Cochain, Family, Flavor, StructureMap};
use crate::cohomology::{CoboundarySolution, Complex, Slot};
use crate::error::{Error, Result};
use crate::graded::Parity;
use crate::relations::check_structure_direct;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DeformationSeries {
    pub flavor: Flavor,
    pub order: usize,
    pub arity_cap: usize,
    /// `gamma[0] = d`.
    pub gamma: Vec<Family>,
    /// `beta[0] = 0`.
    pub beta: Vec<Family>,
}

impl DeformationSeries {
    /// Coefficients of `t^p` and `t^p θ` in `{d_t, d_t}` for `p ≤ order`.
    pub fn residual(&self) -> Result<Vec<(Family, Family)>> {
        let cap = self.arity_cap;
        let mut out = Vec::with_capacity(self.order + 1);
        for p in 0..=self.order {
            let mut rg = Family::zero(self.gamma[0].space(), self.flavor, Parity::EVEN);
            let mut rb = Family::zero(self.gamma[0].space(), self.flavor, Parity::ODD);
            for i in 0..=p {
                let j = p - i;
                rg.add_scaled(&family_bracket(&self.gamma[i], &self.gamma[j], cap, BracketKind::Modified)?, &Scalar::one())?;
                // θ moving past the odd γ_i gives the minus sign
                rb.add_scaled(&family_bracket(&self.beta[i], &self.gamma[j], cap, BracketKind::Modified)?, &Scalar::one())?;
                rb.add_scaled(&family_bracket(&self.gamma[i], &self.beta[j], cap, BracketKind::Modified)?, &Scalar::from_i64(-1))?;
            }
            out.push((rg, rb));
        }
        Ok(out)
    }

    pub fn residual_vanishes(&self) -> Result<bool> {
        Ok(self.residual()?.iter().all(|(g, b)| g.is_zero() && b.is_zero()))
    }
}

impl fmt::Display for DeformationSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 1..=self.order {
            writeln!(f, "gamma_{p} = {}", self.gamma[p])?;
            writeln!(f, "beta_{p} = {}", self.beta[p])?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Gamma,
    Beta,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Gamma => "gamma",
            Target::Beta => "beta",
        })
    }
}

/// The first order at which the recursion has no solution.
#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub order: usize,
    pub target: Target,
    /// `(p, q)` when solving arity by arity.
    pub bigrade: Option<(usize, usize)>,
    pub rhs: Family,
    /// Class of `rhs` against `representatives`.
    pub coordinates: Vec<Scalar>,
    pub representatives: Vec<Family>,
    /// The part of the series solved before the obstruction.
    pub partial: DeformationSeries,
}

#[derive(Debug, Clone)]
pub enum Prolongation {
    Series(DeformationSeries),
    Obstructed(Box<ObstructionReport>),
}

impl Prolongation {
    pub fn series(&self) -> Option<&DeformationSeries> {
        match self {
            Prolongation::Series(s) => Some(s),
            Prolongation::Obstructed(_) => None,
        }
    }

    pub fn obstruction(&self) -> Option<&ObstructionReport> {
        match self {
            Prolongation::Series(_) => None,
            Prolongation::Obstructed(o) => Some(o),
        }
    }
}

fn require_half<'a>(families: impl IntoIterator<Item = &'a Family>) -> Result<()> {
    for f in families {
        for c in f.components() {
            for (_, v) in c.entries() {
                if v.iter().any(|(_, x)| x.modulus() == Some(2)) {
                    return Err(Error::Field("the deformation recursions divide by 2, which is impossible in characteristic 2".into()));
                }
            }
        }
    }
    Ok(())
}

fn check_family(f: &Family, d: &StructureMap, good: Parity, what: &str) -> Result<()> {
    if f.flavor() != d.flavor() {
        return Err(Error::Flavor(format!("{what} is {} but the structure is {}", f.flavor(), d.flavor())));
    }
    if f.space() != d.space() {
        return Err(Error::Dimension(format!("{what} lives on a different space")));
    }
    if f.good_parity() != good && !f.is_zero() {
        return Err(Error::Parity(format!("{what} must have good degree {good}")));
    }
    Ok(())
}

/// `Σ_{i=1}^{p-1} ⟦a_i, b_{p-i}⟧`.
fn convolve(a: &[Family], b: &[Family], p: usize, cap: usize, kind: BracketKind, good: Parity) -> Result<Family> {
    let mut out = Family::zero(a[0].space(), a[0].flavor(), good);
    for i in 1..p {
        out.add_scaled(&family_bracket(&a[i], &b[p - i], cap, kind)?, &Scalar::one())?;
    }
    Ok(out)
}

fn internal(e: Error) -> Error {
    match e {
        Error::NotCocycle(msg) => Error::Internal(format!("right-hand side is not closed: {msg}")),
        other => other,
    }
}

struct Step {
    cx: Complex,
    unknowns: Vec<Slot>,
    class_slots: Vec<Slot>,
}

enum Solved {
    Ok(Family),
    Obstructed { coordinates: Vec<Scalar>, representatives: Vec<Family> },
}

fn solve_step(step: &Step, rhs: &Family) -> Result<Solved> {
    match step.cx.solve(&step.unknowns, rhs, &step.class_slots).map_err(internal)? {
        CoboundarySolution::Solved(x) => Ok(Solved::Ok(x)),
        CoboundarySolution::Obstructed { coordinates, homology } => {
            Ok(Solved::Obstructed { coordinates, representatives: homology.representative_families()? })
        }
    }
}

fn zero_lists(d: &StructureMap, order: usize) -> (Vec<Family>, Vec<Family>) {
    let mut gamma = vec![Family::zero(d.space(), d.flavor(), Parity::ODD); order + 1];
    gamma[0] = d.family().clone();
    let beta = vec![Family::zero(d.space(), d.flavor(), Parity::EVEN); order + 1];
    (gamma, beta)
}

/// Deformation of a graded Lie (or associative) algebra with the plain bracket
/// and `δ = [l, ·]`; `γ_p`, `β_p` are binary.
pub fn prolong_lie(l: &StructureMap, gamma1: &Cochain, beta1: &Cochain, order: usize) -> Result<Prolongation> {
    if !l.is_binary() {
        return Err(Error::InvalidStructure("expected a structure with only a binary component".into()));
    }
    for (c, parity, what) in [(gamma1, Parity::EVEN, "gamma_1"), (beta1, Parity::ODD, "beta_1")] {
        if c.arity() != 2 || c.parity() != parity {
            return Err(Error::Parity(format!("{what} must be binary of internal parity {parity}")));
        }
    }
    let g1 = Family::from_cochain(gamma1.clone());
    let b1 = Family::from_cochain(beta1.clone());
    check_family(&g1, l, Parity::ODD, "gamma_1")?;
    check_family(&b1, l, Parity::EVEN, "beta_1")?;
    require_half([l.family(), &g1, &b1])?;

    let cx = Complex::new(l, BracketKind::Plain, 4);
    for (f, what) in [(&g1, "gamma_1"), (&b1, "beta_1")] {
        if !cx.apply(f)?.truncated(3).is_zero() {
            return Err(Error::NotCocycle(format!("{what} is not a cocycle")));
        }
    }
    let (mut gamma, mut beta) = zero_lists(l, order);
    if order >= 1 {
        gamma[1] = g1;
        beta[1] = b1;
    }
    let half = -Scalar::half();
    let step = |unknown: Parity| Step {
        cx: Complex::new(l, BracketKind::Plain, 4),
        unknowns: vec![Slot::new(unknown, 2)],
        class_slots: vec![Slot::new(unknown, 3)],
    };
    let (gstep, bstep) = (step(Parity::EVEN), step(Parity::ODD));
    for p in 2..=order {
        let rhs = convolve(&gamma, &gamma, p, 3, BracketKind::Plain, Parity::EVEN)?.scaled(&half);
        match solve_step(&gstep, &rhs)? {
            Solved::Ok(x) => gamma[p] = retag(x, Parity::ODD, l),
            Solved::Obstructed { coordinates, representatives } => {
                let partial = DeformationSeries { flavor: l.flavor(), order: p - 1, arity_cap: 3, gamma: gamma[..p].to_vec(), beta: beta[..p].to_vec() };
                return Ok(obstructed(p, Target::Gamma, None, rhs, coordinates, representatives, partial));
            }
        }
        let mut rhs = convolve(&beta, &gamma, p, 3, BracketKind::Plain, Parity::ODD)?;
        rhs.add_scaled(&convolve(&gamma, &beta, p, 3, BracketKind::Plain, Parity::ODD)?, &Scalar::one())?;
        let rhs = rhs.scaled(&half);
        match solve_step(&bstep, &rhs)? {
            Solved::Ok(x) => beta[p] = retag(x, Parity::EVEN, l),
            Solved::Obstructed { coordinates, representatives } => {
                let partial = DeformationSeries { flavor: l.flavor(), order: p - 1, arity_cap: 3, gamma: gamma[..p].to_vec(), beta: beta[..p].to_vec() };
                return Ok(obstructed(p, Target::Beta, None, rhs, coordinates, representatives, partial));
            }
        }
    }
    Ok(Prolongation::Series(DeformationSeries { flavor: l.flavor(), order, arity_cap: 3, gamma, beta }))
}

/// A solved family, re-tagged with its expected good degree even when zero.
fn retag(x: Family, good: Parity, d: &StructureMap) -> Family {
    if x.is_zero() {
        Family::zero(d.space(), d.flavor(), good)
    } else {
        x
    }
}

fn obstructed(
    order: usize,
    target: Target,
    bigrade: Option<(usize, usize)>,
    rhs: Family,
    coordinates: Vec<Scalar>,
    representatives: Vec<Family>,
    partial: DeformationSeries,
) -> Prolongation {
    Prolongation::Obstructed(Box::new(ObstructionReport { order, target, bigrade, rhs, coordinates, representatives, partial }))
}

/// Deformation of an infinity algebra with the modified bracket, over the
/// whole complex truncated at `cap`.
pub fn prolong_infinity(d: &StructureMap, gamma1: &Family, beta1: &Family, order: usize, cap: usize) -> Result<Prolongation> {
    check_family(gamma1, d, Parity::ODD, "gamma_1")?;
    check_family(beta1, d, Parity::EVEN, "beta_1")?;
    require_half([d.family(), gamma1, beta1])?;
    let cx = Complex::new(d, BracketKind::Modified, cap);
    for (f, what) in [(gamma1, "gamma_1"), (beta1, "beta_1")] {
        if !cx.apply(&f.truncated(cap))?.is_zero() {
            return Err(Error::NotCocycle(format!("{what} is not a cocycle")));
        }
    }
    let (mut gamma, mut beta) = zero_lists(d, order);
    if order >= 1 {
        gamma[1] = retag(gamma1.truncated(cap), Parity::ODD, d);
        beta[1] = retag(beta1.truncated(cap), Parity::EVEN, d);
    }
    let half = Scalar::half();
    let step = |unknown: Parity| Step {
        cx: Complex::new(d, BracketKind::Modified, cap),
        unknowns: cx.degree_layout(unknown).slots(),
        class_slots: cx.degree_layout(unknown + Parity::ODD).slots(),
    };
    let (gstep, bstep) = (step(Parity::ODD), step(Parity::EVEN));
    let partial = |gamma: &[Family], beta: &[Family], p: usize| DeformationSeries {
        flavor: d.flavor(),
        order: p - 1,
        arity_cap: cap,
        gamma: gamma[..p].to_vec(),
        beta: beta[..p].to_vec(),
    };
    for p in 2..=order {
        let rhs = convolve(&gamma, &gamma, p, cap, BracketKind::Modified, Parity::EVEN)?.scaled(&-&half);
        match solve_step(&gstep, &rhs)? {
            Solved::Ok(x) => gamma[p] = retag(x, Parity::ODD, d),
            Solved::Obstructed { coordinates, representatives } => {
                return Ok(obstructed(p, Target::Gamma, None, rhs, coordinates, representatives, partial(&gamma, &beta, p)));
            }
        }
        let mut rhs = convolve(&beta, &gamma, p, cap, BracketKind::Modified, Parity::ODD)?;
        rhs.add_scaled(&convolve(&gamma, &beta, p, cap, BracketKind::Modified, Parity::ODD)?, &Scalar::from_i64(-1))?;
        let rhs = rhs.scaled(&half);
        match solve_step(&bstep, &rhs)? {
            Solved::Ok(x) => beta[p] = retag(x, Parity::EVEN, d),
            Solved::Obstructed { coordinates, representatives } => {
                return Ok(obstructed(p, Target::Beta, None, rhs, coordinates, representatives, partial(&gamma, &beta, p)));
            }
        }
    }
    Ok(Prolongation::Series(DeformationSeries { flavor: d.flavor(), order, arity_cap: cap, gamma, beta }))
}

/// Deformation of a strict Lie or associative algebra into an infinity algebra,
/// solved separately for each `φ_{p,q}` (arity `q`, parity `q`) and
/// `ψ_{p,q}` (arity `q`, parity `q-1`).
///
/// `c` and `b` hold the order-one cocycles `φ_{1,j}` and `ψ_{1,j}`, any arities.
pub fn prolong_restricted(d2: &StructureMap, c: &[Cochain], b: &[Cochain], order: usize, cap: usize) -> Result<Prolongation> {
    if !d2.is_binary() {
        return Err(Error::InvalidStructure("expected a strict algebra with only a binary component".into()));
    }
    if !check_structure_direct(d2, 3)?.holds() {
        return Err(Error::InvalidStructure("the binary structure does not satisfy its structure equation".into()));
    }
    let mut g1 = Family::zero(d2.space(), d2.flavor(), Parity::ODD);
    let mut b1 = Family::zero(d2.space(), d2.flavor(), Parity::EVEN);
    for (list, fam, shift, what) in [(c, &mut g1, 0i64, "phi"), (b, &mut b1, 1i64, "psi")] {
        for x in list {
            let q = x.arity();
            if x.parity() != Parity::of(q as i64 - shift) {
                return Err(Error::Parity(format!("{what}_(1,{q}) must have internal parity {}", Parity::of(q as i64 - shift))));
            }
            if q > cap {
                return Err(Error::Arity(format!("{what}_(1,{q}) exceeds the arity cap {cap}")));
            }
            fam.add_cochain(x, &Scalar::one())?;
        }
    }
    check_family(&g1, d2, Parity::ODD, "phi")?;
    check_family(&b1, d2, Parity::EVEN, "psi")?;
    require_half([d2.family(), &g1, &b1])?;
    let cx = Complex::new(d2, BracketKind::Modified, cap);
    for (f, what) in [(&g1, "phi_1"), (&b1, "psi_1")] {
        if !cx.apply(f)?.is_zero() {
            return Err(Error::NotCocycle(format!("{what} is not a cocycle")));
        }
    }

    let (mut gamma, mut beta) = zero_lists(d2, order);
    if order >= 1 {
        gamma[1] = g1;
        beta[1] = b1;
    }
    let half = Scalar::half();
    let partial = |gamma: &[Family], beta: &[Family], p: usize| DeformationSeries {
        flavor: d2.flavor(),
        order: p - 1,
        arity_cap: cap,
        gamma: gamma[..p].to_vec(),
        beta: beta[..p].to_vec(),
    };
    for p in 2..=order {
        for target in [Target::Gamma, Target::Beta] {
            let mut solved = Family::zero(d2.space(), d2.flavor(), if target == Target::Gamma { Parity::ODD } else { Parity::EVEN });
            for q in 0..cap {
                let rhs = restricted_rhs(&gamma, &beta, p, q, target, &half)?;
                let shift = if target == Target::Gamma { 0 } else { 1 };
                if q == 0 {
                    if !rhs.is_zero() {
                        let class_slot = Slot::new(Parity::of(-shift), 1);
                        let (coordinates, representatives) = class_of(&cx, &rhs, class_slot)?;
                        return Ok(obstructed(p, target, Some((p, 0)), rhs, coordinates, representatives, partial(&gamma, &beta, p)));
                    }
                    continue;
                }
                let step = Step {
                    cx: Complex::new(d2, BracketKind::Modified, cap),
                    unknowns: vec![Slot::new(Parity::of(q as i64 - shift), q)],
                    class_slots: vec![Slot::new(Parity::of(q as i64 - shift), q + 1)],
                };
                match solve_step(&step, &rhs)? {
                    Solved::Ok(x) => solved.add_scaled(&x, &Scalar::one())?,
                    Solved::Obstructed { coordinates, representatives } => {
                        return Ok(obstructed(p, target, Some((p, q)), rhs, coordinates, representatives, partial(&gamma, &beta, p)));
                    }
                }
            }
            match target {
                Target::Gamma => gamma[p] = solved,
                Target::Beta => beta[p] = solved,
            }
        }
    }
    Ok(Prolongation::Series(DeformationSeries { flavor: d2.flavor(), order, arity_cap: cap, gamma, beta }))
}

/// Right-hand side of the `(p, q)` equation; it has arity `q + 1`.
fn restricted_rhs(gamma: &[Family], beta: &[Family], p: usize, q: usize, target: Target, half: &Scalar) -> Result<Family> {
    let space = gamma[0].space();
    let flavor = gamma[0].flavor();
    let good = if target == Target::Gamma { Parity::EVEN } else { Parity::ODD };
    let mut out = Family::zero(space, flavor, good);
    for i in 1..p {
        for j in 1..=q + 1 {
            let k = q + 2 - j;
            let phi_ij = gamma[i].component(j);
            let phi_rest = gamma[p - i].component(k);
            match target {
                Target::Gamma => {
                    if let (Some(a), Some(b)) = (phi_ij, phi_rest) {
                        out.add_cochain(&crate::bracket::modified_bracket(a, b)?, &-half)?;
                    }
                }
                Target::Beta => {
                    if let (Some(a), Some(b)) = (beta[i].component(j), phi_rest) {
                        out.add_cochain(&crate::bracket::modified_bracket(a, b)?, half)?;
                    }
                    if let (Some(a), Some(b)) = (phi_ij, beta[p - i].component(k)) {
                        out.add_cochain(&crate::bracket::modified_bracket(a, b)?, &-half)?;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn class_of(cx: &Complex, rhs: &Family, slot: Slot) -> Result<(Vec<Scalar>, Vec<Family>)> {
    if !cx.is_closed(rhs)? {
        return Err(Error::Internal("right-hand side is not closed".into()));
    }
    let h = cx.homology(&[slot])?;
    let coords = h.class_coordinates(&h.layout.coords(rhs)?)?;
    Ok((coords, h.representative_families()?))
}
