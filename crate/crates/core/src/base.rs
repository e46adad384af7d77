//! Deformations over a finite-dimensional graded commutative base `S = 𝕜·1 ⊕ m`.
//!
//! A deformation is an S-linear codifferential `τ` on `V⊗S` reducing to `d`
//! modulo `m`. It is stored in normal form `τ_k = d_k + Σ_i β_k^i ⊗ m_i` and
//! corresponds to a degree-one map `α: m* → C(V)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::bracket::{differential_with, family_bracket, BracketKind};
use crate::coalgebra::FilteredCoalgebra;
use crate::cochain::{Cochain, Family, Flavor, StructureMap};
use crate::error::{Error, Result};
use crate::graded::{exterior_sign, unshuffles, Bidegree, GradedVectorSpace, Pairing, Parity, Vector};
use crate::linalg::Echelon;
use crate::massey::AlphaMap;
use crate::scalar::Scalar;

/// The maximal ideal `m` of a local base algebra, with its multiplication.
#[derive(Debug, Clone)]
pub struct BaseAlgebra {
    names: Vec<String>,
    parities: Vec<Parity>,
    /// `m_i m_j = Σ_k c_{ij}^k m_k`, keyed by `(i, j)`.
    products: BTreeMap<(usize, usize), Vector>,
    nilpotency: usize,
    dual: FilteredCoalgebra,
}

impl BaseAlgebra {
    /// Validates graded commutativity, associativity and nilpotency of the constants.
    pub fn new<S: Into<String>>(basis: impl IntoIterator<Item = (S, Parity)>, products: impl IntoIterator<Item = ((usize, usize), Vector)>) -> Result<Self> {
        let (names, parities): (Vec<String>, Vec<Parity>) = basis.into_iter().map(|(n, p)| (n.into(), p)).unzip();
        let n = names.len();
        if n == 0 {
            return Err(Error::Base("the maximal ideal must be nonzero".into()));
        }
        for (i, a) in names.iter().enumerate() {
            if names[..i].contains(a) {
                return Err(Error::Base(format!("duplicate basis name '{a}'")));
            }
        }
        let mut table = BTreeMap::new();
        for ((i, j), v) in products {
            if i >= n || j >= n || v.iter().any(|(k, _)| k >= n) {
                return Err(Error::Dimension(format!("product m_{i} m_{j} refers to an index outside 0..{n}")));
            }
            if let Some((k, _)) = v.iter().find(|(k, _)| parities[*k] != parities[i] + parities[j]) {
                return Err(Error::Parity(format!("{}·{} has a term in {} of the wrong parity", names[i], names[j], names[k])));
            }
            if !v.is_zero() {
                table.insert((i, j), v);
            }
        }
        let mut s = BaseAlgebra { names, parities, products: table, nilpotency: 0, dual: FilteredCoalgebra::new(Vec::<(String, Bidegree)>::new(), Pairing::Usual)? };
        s.validate()?;
        s.nilpotency = s.compute_nilpotency()?;
        s.dual = s.build_dual()?;
        Ok(s)
    }

    /// `𝕜[x_1, …]` modulo `x_g^{e_g + 1}`, with the nonconstant monomials as basis.
    ///
    /// Odd generators square to zero regardless of the bound given.
    pub fn truncated_polynomial(generators: &[(&str, Parity, u32)]) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::Base("at least one generator is needed".into()));
        }
        let bounds: Vec<u32> = generators.iter().map(|(_, p, e)| if p.is_odd() { (*e).min(1) } else { *e }).collect();
        if bounds.iter().any(|&e| e == 0) {
            return Err(Error::Base("every generator needs a positive exponent bound".into()));
        }
        let mut monomials: Vec<Vec<u32>> = vec![vec![]];
        for &b in &bounds {
            monomials = monomials.into_iter().flat_map(|m| (0..=b).map(move |e| [m.clone(), vec![e]].concat())).collect();
        }
        monomials.retain(|m| m.iter().any(|&e| e > 0));
        monomials.sort_by_key(|m| (m.iter().sum::<u32>(), std::cmp::Reverse(m.clone())));
        let parity_of = |m: &[u32]| m.iter().zip(generators).fold(Parity::EVEN, |acc, (e, g)| acc + Parity::of((*e as i64) * g.1.value() as i64));
        let name_of = |m: &[u32]| {
            let parts: Vec<String> = m
                .iter()
                .zip(generators)
                .filter(|(e, _)| **e > 0)
                .map(|(e, g)| if *e == 1 { g.0.to_string() } else { format!("{}^{e}", g.0) })
                .collect();
            parts.join("*")
        };
        let index: BTreeMap<Vec<u32>, usize> = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut products = Vec::new();
        for (i, a) in monomials.iter().enumerate() {
            for (j, b) in monomials.iter().enumerate() {
                let sum: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                if sum.iter().zip(&bounds).any(|(s, b)| s > b) {
                    continue;
                }
                // sorting b's odd generators past the later odd generators of a
                let mut odd = false;
                for (g, ag) in a.iter().enumerate() {
                    for (h, bh) in b.iter().enumerate() {
                        if h < g && generators[g].1.is_odd() && generators[h].1.is_odd() && ag * bh % 2 == 1 {
                            odd = !odd;
                        }
                    }
                }
                products.push(((i, j), Vector::term(index[&sum], Scalar::sign(odd))));
            }
        }
        let basis: Vec<(String, Parity)> = monomials.iter().map(|m| (name_of(m), parity_of(m))).collect();
        BaseAlgebra::new(basis, products)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parities[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names.iter().position(|n| n == name).ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    /// `m_i m_j` in the basis of `m`.
    pub fn product(&self, i: usize, j: usize) -> Vector {
        self.products.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> Scalar {
        self.products.get(&(i, j)).map(|v| v.coeff(k)).unwrap_or_else(Scalar::zero)
    }

    /// The least `r` with `m^r = 0`.
    pub fn nilpotency(&self) -> usize {
        self.nilpotency
    }

    /// `F = m*` with `Δm^k = Σ (-1)^{m_i m_j} c_{ij}^k m^i⊗m^j`, `F0 = (m/m²)*`, `F1 = F`.
    pub fn dual(&self) -> &FilteredCoalgebra {
        &self.dual
    }

    /// Product of two basis elements of `S`, where index 0 is the unit and `i + 1` is `m_i`.
    fn s_mul(&self, a: usize, b: usize) -> Vector {
        match (a, b) {
            (0, _) => Vector::basis(b),
            (_, 0) => Vector::basis(a),
            _ => self.product(a - 1, b - 1).iter().map(|(k, c)| (k + 1, c.clone())).collect(),
        }
    }

    fn s_parity(&self, a: usize) -> Parity {
        if a == 0 {
            Parity::EVEN
        } else {
            self.parities[a - 1]
        }
    }

    fn s_mul_vec(&self, x: &Vector, b: usize) -> Vector {
        let mut out = Vector::zero();
        for (a, c) in x.iter() {
            out.add_scaled(&self.s_mul(a, b), c);
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let sign = Scalar::sign((self.parities[i] * self.parities[j]).is_odd());
                if self.product(i, j) != self.product(j, i).scaled(&sign) {
                    return Err(Error::Base(format!("{}·{} violates graded commutativity", self.names[i], self.names[j])));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut left = Vector::zero();
                    for (l, c) in self.product(i, j).iter() {
                        left.add_scaled(&self.product(l, k), c);
                    }
                    let mut right = Vector::zero();
                    for (l, c) in self.product(j, k).iter() {
                        right.add_scaled(&self.product(i, l), c);
                    }
                    if left != right {
                        return Err(Error::Base(format!("associativity fails on ({}, {}, {})", self.names[i], self.names[j], self.names[k])));
                    }
                }
            }
        }
        Ok(())
    }

    fn compute_nilpotency(&self) -> Result<usize> {
        let n = self.dim();
        let dense = |v: &Vector| (0..n).map(|k| v.coeff(k)).collect::<Vec<_>>();
        let mut power: Vec<Vector> = (0..n).map(Vector::basis).collect();
        for r in 1..=n + 1 {
            let mut span = Echelon::new(n);
            for v in &power {
                span.insert(&dense(v));
            }
            if span.rank() == 0 {
                return Ok(r);
            }
            let mut next = Vec::new();
            for v in &power {
                for i in 0..n {
                    let mut w = Vector::zero();
                    for (a, c) in v.iter() {
                        w.add_scaled(&self.product(a, i), c);
                    }
                    if !w.is_zero() {
                        next.push(w);
                    }
                }
            }
            power = next;
        }
        Err(Error::Base("the maximal ideal is not nilpotent".into()))
    }

    fn build_dual(&self) -> Result<FilteredCoalgebra> {
        let n = self.dim();
        let basis: Vec<(String, Bidegree)> = (0..n).map(|i| (format!("{}*", self.names[i]), Bidegree::new(self.parities[i], 0))).collect();
        let mut f = FilteredCoalgebra::new(basis, Pairing::Usual)?;
        let mut decomposable = vec![false; n];
        for ((i, j), v) in &self.products {
            let sign = Scalar::sign((self.parities[*i] * self.parities[*j]).is_odd());
            for (k, c) in v.iter() {
                f.add_delta_term(k, *i, *j, &sign * c)?;
                decomposable[k] = true;
            }
        }
        for (k, dec) in decomposable.iter().enumerate() {
            f.set_filtration(k, !dec, true);
        }
        Ok(f)
    }
}

impl fmt::Display for BaseAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m = span{{{}}}", self.names.join(", "))?;
        for ((i, j), v) in &self.products {
            let terms: Vec<String> = v.iter().map(|(k, c)| format!("{c} {}", self.names[k])).collect();
            write!(f, "; {}·{} = {}", self.names[*i], self.names[*j], terms.join(" + "))?;
        }
        Ok(())
    }
}

/// An S-linear map in normal form `τ_k = d_k + Σ_i β_k^i ⊗ m_i`.
#[derive(Debug, Clone)]
pub struct TauMap {
    d: StructureMap,
    base: Arc<BaseAlgebra>,
    beta: BTreeMap<(usize, usize), Cochain>,
}

impl TauMap {
    /// `τ = d`.
    pub fn new(d: &StructureMap, base: &Arc<BaseAlgebra>) -> Self {
        TauMap { d: d.clone(), base: base.clone(), beta: BTreeMap::new() }
    }

    /// Normalizes a map given by its components on `V ⊗ 1`, keyed by
    /// `(arity, s)` with `s = 0` the unit and `s = i + 1` the element `m_i`.
    ///
    /// The unit components must reproduce `d`: this is the condition that
    /// `1⊗ε` is a homomorphism.
    pub fn from_components(d: &StructureMap, base: &Arc<BaseAlgebra>, components: BTreeMap<(usize, usize), Cochain>) -> Result<Self> {
        let mut tau = TauMap::new(d, base);
        let arities: Vec<usize> = components.keys().map(|(k, _)| *k).chain(d.components().map(Cochain::arity)).collect();
        for k in arities {
            let unit = components.get(&(k, 0));
            let expected = d.component(k);
            let same = match (unit, expected) {
                (Some(u), Some(e)) => u == e,
                (Some(u), None) => u.is_zero(),
                (None, e) => e.is_none_or(Cochain::is_zero),
            };
            if !same {
                return Err(Error::InvalidStructure(format!("the unit component of tau_{k} differs from d_{k}, so 1⊗ε is not a homomorphism")));
            }
        }
        for ((k, s), c) in components {
            if s > 0 {
                tau.set_beta(k, s - 1, c)?;
            }
        }
        Ok(tau)
    }

    pub fn structure(&self) -> &StructureMap {
        &self.d
    }

    pub fn base(&self) -> &Arc<BaseAlgebra> {
        &self.base
    }

    pub fn flavor(&self) -> Flavor {
        self.d.flavor()
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        self.d.space()
    }

    /// Sets `β_k^i`; it must have internal parity `k + m_i` so that `τ_k` is odd.
    pub fn set_beta(&mut self, k: usize, i: usize, c: Cochain) -> Result<()> {
        if i >= self.base.dim() {
            return Err(Error::Dimension(format!("base index {i} out of range")));
        }
        if c.arity() != k || k == 0 {
            return Err(Error::Arity(format!("beta_{k}^{i} has arity {}", c.arity())));
        }
        if c.flavor() != self.flavor() || c.space() != self.space() {
            return Err(Error::Flavor(format!("beta_{k}^{i} lives on a different complex")));
        }
        let expected = Parity::of(k as i64) + self.base.parity(i);
        if c.parity() != expected && !c.is_zero() {
            return Err(Error::Parity(format!("beta_{k}^{i} must have internal parity {expected}")));
        }
        if c.is_zero() {
            self.beta.remove(&(k, i));
        } else {
            self.beta.insert((k, i), c);
        }
        Ok(())
    }

    pub fn beta(&self, k: usize, i: usize) -> Option<&Cochain> {
        self.beta.get(&(k, i))
    }

    pub fn corrections(&self) -> impl Iterator<Item = ((usize, usize), &Cochain)> {
        self.beta.iter().map(|(k, c)| (*k, c))
    }

    pub fn max_arity(&self) -> usize {
        self.beta.keys().map(|(k, _)| *k).chain([self.d.max_arity()]).max().unwrap_or(0)
    }

    /// Index of `v_a ⊗ s` in `V⊗S`, with `s = 0` the unit.
    fn module_index(&self, a: usize, s: usize) -> usize {
        a * (self.base.dim() + 1) + s
    }

    fn split_index(&self, w: usize) -> (usize, usize) {
        (w / (self.base.dim() + 1), w % (self.base.dim() + 1))
    }

    /// `τ_k(v_1⊗1, …, v_k⊗1)` as an element of `V⊗S`.
    fn eval_on_v(&self, k: usize, args: &[Vector]) -> Result<Vector> {
        let mut out = Vector::zero();
        if let Some(dk) = self.d.component(k) {
            for (a, c) in dk.eval(args)?.iter() {
                out.add_term(self.module_index(a, 0), c);
            }
        }
        for i in 0..self.base.dim() {
            if let Some(b) = self.beta.get(&(k, i)) {
                for (a, c) in b.eval(args)?.iter() {
                    out.add_term(self.module_index(a, i + 1), c);
                }
            }
        }
        Ok(out)
    }

    /// S-linear evaluation on arbitrary elements of `V⊗S`:
    /// `τ(v_1 s_1, …, v_k s_k) = (-1)^{Σ_{p<q} s_p v_q} τ(v_1, …, v_k) s_1⋯s_k`.
    pub fn eval(&self, k: usize, args: &[Vector]) -> Result<Vector> {
        if args.len() != k {
            return Err(Error::Arity(format!("tau_{k} applied to {} arguments", args.len())));
        }
        let space = self.space().clone();
        let mut out = Vector::zero();
        let mut stack: Vec<(usize, usize, Scalar)> = Vec::with_capacity(k);
        self.expand(&space, args, &mut stack, &mut out)?;
        Ok(out)
    }

    fn expand(&self, space: &GradedVectorSpace, args: &[Vector], chosen: &mut Vec<(usize, usize, Scalar)>, out: &mut Vector) -> Result<()> {
        let p = chosen.len();
        if p == args.len() {
            let mut odd = false;
            let mut coef = Scalar::one();
            for (x, (_, s, c)) in chosen.iter().enumerate() {
                coef = &coef * c;
                for (a, _, _) in &chosen[x + 1..] {
                    odd ^= (self.base.s_parity(*s) * space.parity(*a)).is_odd();
                }
            }
            let vs: Vec<Vector> = chosen.iter().map(|(a, _, _)| Vector::basis(*a)).collect();
            let mut s_prod = Vector::basis(0);
            for (_, s, _) in chosen.iter() {
                s_prod = self.base.s_mul_vec(&s_prod, *s);
            }
            if s_prod.is_zero() {
                return Ok(());
            }
            let value = self.eval_on_v(args.len(), &vs)?;
            let coef = &coef * &Scalar::sign(odd);
            for (w, c) in value.iter() {
                let (a, t) = self.split_index(w);
                for (s, e) in s_prod.iter() {
                    let ts = self.base.s_mul(t, s);
                    for (u, f) in ts.iter() {
                        out.add_term(self.module_index(a, u), &(&(&coef * c) * &(e * f)));
                    }
                }
            }
            return Ok(());
        }
        for (w, c) in args[p].iter() {
            let (a, s) = self.split_index(w);
            chosen.push((a, s, c.clone()));
            self.expand(space, args, chosen, out)?;
            chosen.pop();
        }
        Ok(())
    }

    /// `τ` written out as a `𝕜`-linear structure on `V⊗S`, for `k ≤ cap`.
    pub fn on_module(&self, cap: usize) -> Result<StructureMap> {
        let v = self.space();
        let n = self.base.dim() + 1;
        let mut basis = Vec::new();
        for a in 0..v.dim() {
            for s in 0..n {
                let name = if s == 0 { v.name(a).to_string() } else { format!("{}⊗{}", v.name(a), self.base.name(s - 1)) };
                basis.push((name, v.parity(a) + self.base.s_parity(s)));
            }
        }
        let w = Arc::new(GradedVectorSpace::new(basis)?);
        let mut comps = Vec::new();
        for k in 1..=cap.min(self.max_arity()) {
            let mut c = Cochain::zero(&w, self.flavor(), k, Parity::of(k as i64))?;
            for args in Cochain::domain_tuples(&w, self.flavor(), k) {
                let vs: Vec<Vector> = args.iter().map(|&x| Vector::basis(x)).collect();
                let value = self.eval(k, &vs)?;
                if !value.is_zero() {
                    c.add_entry(&args, &value)?;
                }
            }
            comps.push(c);
        }
        StructureMap::from_components(&w, self.flavor(), comps)
    }
}

/// `(-1)^{m_i (k + 1 + v_1 + ⋯ + v_k)}` applied entrywise; an involution.
fn twist(c: &Cochain, m: Parity) -> Result<Cochain> {
    if !m.is_odd() {
        return Ok(c.clone());
    }
    let space = c.space().clone();
    let mut out = Cochain::zero(&space, c.flavor(), c.arity(), c.parity())?;
    for (args, value) in c.entries() {
        let odd = ((c.arity() + 1) % 2 == 1) ^ space.tuple_parity(args).is_odd();
        out.add_entry(args, &value.scaled(&Scalar::sign(odd)))?;
    }
    Ok(out)
}

/// `α(m^i)_k = (-1)^{m_i(k+1+Σv)} β_k^i`, on the coalgebra `m*`.
pub fn alpha_from_tau(tau: &TauMap) -> Result<AlphaMap> {
    let base = tau.base();
    let mut alpha = AlphaMap::new();
    for i in 0..base.dim() {
        let good = base.parity(i) + Parity::ODD;
        let mut fam = Family::zero(tau.space(), tau.flavor(), good);
        for ((_, j), b) in tau.corrections() {
            if j == i {
                fam.add_cochain(&twist(b, base.parity(i))?, &Scalar::one())?;
            }
        }
        alpha.set(base.dual(), i, fam)?;
    }
    Ok(alpha)
}

/// Inverse of [`alpha_from_tau`].
pub fn tau_from_alpha(alpha: &AlphaMap, d: &StructureMap, base: &Arc<BaseAlgebra>) -> Result<TauMap> {
    let mut tau = TauMap::new(d, base);
    for (i, fam) in alpha.iter() {
        if i >= base.dim() {
            return Err(Error::Dimension(format!("alpha is given on index {i} outside m*")));
        }
        if fam.is_zero() {
            continue;
        }
        if fam.flavor() != d.flavor() || fam.space() != d.space() {
            return Err(Error::Flavor(format!("alpha({}) lives on a different complex", base.dual().name(i))));
        }
        let good = base.parity(i) + Parity::ODD;
        if fam.good_parity() != good {
            return Err(Error::Parity(format!("alpha({}) must have good degree {good}", base.dual().name(i))));
        }
        for c in fam.components() {
            tau.set_beta(c.arity(), i, twist(c, base.parity(i))?)?;
        }
    }
    Ok(tau)
}

/// One term of the reduced structure sum: `(k, l)`, a sign, and the split of the arguments.
struct Placement {
    k: usize,
    l: usize,
    negative: bool,
    before: Vec<usize>,
    inner: Vec<usize>,
    after: Vec<usize>,
}

/// The placements of `f_k(…, g_l(…), …)` in the reduced relation of arity `n`.
///
/// L∞: `Σ_{σ ∈ sh(l,k-1)} (-1)^σ ε(σ) (-1)^{(k-1)l} f_k(g_l(v_σ…), v_σ…)`.
/// A∞: `Σ_j (-1)^{(k-1)l + l(v_1+⋯+v_{j-1}) + (j-1)(l-1)} f_k(v_1, …, g_l(v_j, …), …)`.
fn placements(space: &GradedVectorSpace, flavor: Flavor, args: &[usize]) -> Result<Vec<Placement>> {
    let n = args.len();
    let parities = space.parities_of(args);
    let mut out = Vec::new();
    for k in 1..=n {
        let l = n + 1 - k;
        let base_sign = (k - 1) * l % 2 == 1;
        match flavor {
            Flavor::Exterior => {
                for perm in unshuffles(l, k - 1) {
                    let eps = exterior_sign(&perm, &parities)?.is_negative();
                    out.push(Placement {
                        k,
                        l,
                        negative: base_sign ^ eps,
                        before: vec![],
                        inner: perm[..l].iter().map(|&p| args[p]).collect(),
                        after: perm[l..].iter().map(|&p| args[p]).collect(),
                    });
                }
            }
            Flavor::Tensor => {
                for j in 0..k {
                    let before_odd = space.tuple_parity(&args[..j]).is_odd();
                    let negative = base_sign ^ (l % 2 == 1 && before_odd) ^ (j * (l - 1) % 2 == 1);
                    out.push(Placement {
                        k,
                        l,
                        negative,
                        before: args[..j].to_vec(),
                        inner: args[j..j + l].to_vec(),
                        after: args[j + l..].to_vec(),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn basis_args(args: &[usize]) -> Vec<Vector> {
    args.iter().map(|&a| Vector::basis(a)).collect()
}

fn with_inner(before: &[usize], inner: Vector, after: &[usize]) -> Vec<Vector> {
    let mut v = basis_args(before);
    v.push(inner);
    v.extend(basis_args(after));
    v
}

/// `P(f/g)`: the placements of `g` inside `f` in the reduced relation, with their signs.
///
/// Summed over `k + l = n + 1` this is the reduced form of `½{τ,τ}`; for a
/// single pair only `{f,g} + {g,f} = 2(P(f/g) + P(g/f))` holds.
pub fn reduced_composition(outer: &Cochain, inner: &Cochain) -> Result<Cochain> {
    if outer.flavor() != inner.flavor() || outer.space() != inner.space() {
        return Err(Error::Flavor("compositions need cochains on the same complex".into()));
    }
    let space = outer.space();
    let (k, l) = (outer.arity(), inner.arity());
    let n = k + l - 1;
    let mut out = Cochain::zero(space, outer.flavor(), n, outer.parity() + inner.parity())?;
    for args in Cochain::domain_tuples(space, outer.flavor(), n) {
        let mut total = Vector::zero();
        for p in placements(space, outer.flavor(), &args)?.into_iter().filter(|p| p.k == k && p.l == l) {
            let v = inner.eval(&basis_args(&p.inner))?;
            if v.is_zero() {
                continue;
            }
            total.add_scaled(&outer.eval(&with_inner(&p.before, v, &p.after))?, &Scalar::sign(p.negative));
        }
        if !total.is_zero() {
            out.add_entry(&args, &total)?;
        }
    }
    Ok(out)
}

/// Per-arity residual over `V⊗S`, split along `1, m_1, m_2, …`.
#[derive(Debug, Clone)]
pub struct BaseResidual {
    pub arity_cap: usize,
    /// `base[n-1]`: the unit component, which is `d`'s own relation.
    pub base: Vec<Cochain>,
    /// `parts[i][n-1]`: the `m_i` component.
    pub parts: Vec<Vec<Cochain>>,
}

impl BaseResidual {
    pub fn base_vanishes(&self) -> bool {
        self.base.iter().all(Cochain::is_zero)
    }

    pub fn vanishes(&self) -> bool {
        self.base_vanishes() && self.parts.iter().flatten().all(Cochain::is_zero)
    }
}

fn zero_parts(space: &Arc<GradedVectorSpace>, flavor: Flavor, base: &BaseAlgebra, cap: usize) -> Result<Vec<Vec<Cochain>>> {
    (0..base.dim())
        .map(|i| (1..=cap).map(|n| Cochain::zero(space, flavor, n, Parity::of(n as i64 + 1) + base.parity(i))).collect())
        .collect()
}

/// The reduced structure sum `Σ ± τ_k(…, τ_l(…), …)` of arity `n ≤ cap`, which is
/// `½{τ,τ}` up to a sign depending only on `n`, evaluated on `V⊗1`.
pub fn structure_residual_tau(tau: &TauMap, cap: usize) -> Result<BaseResidual> {
    let space = tau.space().clone();
    let flavor = tau.flavor();
    let base = tau.base().clone();
    let mut out = BaseResidual {
        arity_cap: cap,
        base: (1..=cap).map(|n| Cochain::zero(&space, flavor, n, Parity::of(n as i64 + 1))).collect::<Result<_>>()?,
        parts: zero_parts(&space, flavor, &base, cap)?,
    };
    for n in 1..=cap {
        for args in Cochain::domain_tuples(&space, flavor, n) {
            let mut total = Vector::zero();
            for p in placements(&space, flavor, &args)? {
                let inner = tau.eval(p.l, &lifted(tau, &p.inner))?;
                if inner.is_zero() {
                    continue;
                }
                let mut outer_args = lifted(tau, &p.before);
                outer_args.push(inner);
                outer_args.extend(lifted(tau, &p.after));
                let value = tau.eval(p.k, &outer_args)?;
                total.add_scaled(&value, &Scalar::sign(p.negative));
            }
            let mut split: BTreeMap<usize, Vector> = BTreeMap::new();
            for (w, c) in total.iter() {
                let (a, s) = tau.split_index(w);
                split.entry(s).or_default().add_term(a, c);
            }
            for (s, v) in split {
                if s == 0 {
                    out.base[n - 1].add_entry(&args, &v)?;
                } else {
                    out.parts[s - 1][n - 1].add_entry(&args, &v)?;
                }
            }
        }
    }
    Ok(out)
}

/// Basis vectors `v_a ⊗ 1`.
fn lifted(tau: &TauMap, args: &[usize]) -> Vec<Vector> {
    args.iter().map(|&a| Vector::basis(tau.module_index(a, 0))).collect()
}

fn alpha_component<'a>(alpha: &'a AlphaMap, i: usize, k: usize) -> Option<&'a Cochain> {
    alpha.get(i).and_then(|f| f.component(k))
}

fn eval_opt(c: Option<&Cochain>, args: &[Vector]) -> Result<Vector> {
    match c {
        Some(c) => c.eval(args),
        None => Ok(Vector::zero()),
    }
}

/// `M_i` at one placement: the three terms, with the sign
/// `x = m_s(m_r + k + v_1 + ⋯ + v_{j-1})` on the quadratic term.
fn m_term(alpha: &AlphaMap, d: &StructureMap, base: &BaseAlgebra, i: usize, p: &Placement) -> Result<Vector> {
    let space = d.space();
    let before_par = space.tuple_parity(&p.before);
    let k_par = Parity::of(p.k as i64);
    let inner_args = basis_args(&p.inner);
    let mut out = Vector::zero();

    if let Some(dl) = d.component(p.l) {
        let inner = dl.eval(&inner_args)?;
        if !inner.is_zero() {
            out.add_scaled(&eval_opt(alpha_component(alpha, i, p.k), &with_inner(&p.before, inner, &p.after))?, &Scalar::one());
        }
    }
    if let Some(dk) = d.component(p.k) {
        let inner = eval_opt(alpha_component(alpha, i, p.l), &inner_args)?;
        if !inner.is_zero() {
            let sign = Scalar::sign((base.parity(i) * (k_par + before_par)).is_odd());
            out.add_scaled(&dk.eval(&with_inner(&p.before, inner, &p.after))?, &sign);
        }
    }
    for ((r, s), v) in &base.products {
        let c = v.coeff(i);
        if c.is_zero() {
            continue;
        }
        let inner = eval_opt(alpha_component(alpha, *s, p.l), &inner_args)?;
        if inner.is_zero() {
            continue;
        }
        let x = base.parity(*s) * (base.parity(*r) + k_par + before_par);
        let value = eval_opt(alpha_component(alpha, *r, p.k), &with_inner(&p.before, inner, &p.after))?;
        out.add_scaled(&value, &(&c * &Scalar::sign(x.is_odd())));
    }
    Ok(out)
}

/// The signed sum of `M_i` over all placements of arity `n`, as a cochain.
pub fn mi_terms(alpha: &AlphaMap, d: &StructureMap, base: &BaseAlgebra, i: usize, n: usize) -> Result<Cochain> {
    let space = d.space();
    let mut out = Cochain::zero(space, d.flavor(), n, Parity::of(n as i64 + 1) + base.parity(i))?;
    for args in Cochain::domain_tuples(space, d.flavor(), n) {
        let mut total = Vector::zero();
        for p in placements(space, d.flavor(), &args)? {
            total.add_scaled(&m_term(alpha, d, base, i, &p)?, &Scalar::sign(p.negative));
        }
        if !total.is_zero() {
            out.add_entry(&args, &total)?;
        }
    }
    Ok(out)
}

/// `(δα + ½ μ(α⊗α)Δ)(m^i)` at each arity `n ≤ cap`, indexed `[i][n-1]`.
///
/// `δ = {d, ·}` and `μ(α⊗α)Δ(m^i) = Σ_{r,s} (-1)^{m_r(m_s+1)} c_{rs}^i {α^r, α^s}`.
pub fn mc_residual_base(alpha: &AlphaMap, d: &StructureMap, base: &BaseAlgebra, cap: usize) -> Result<Vec<Vec<Cochain>>> {
    let space = d.space();
    let flavor = d.flavor();
    let half = Scalar::half();
    let zero_fam = |i: usize| Family::zero(space, flavor, base.parity(i) + Parity::ODD);
    let get = |i: usize| alpha.get(i).cloned().unwrap_or_else(|| zero_fam(i));
    let mut out = zero_parts(space, flavor, base, cap)?;
    for (i, slot) in out.iter_mut().enumerate() {
        let mut total = differential_with(d, &get(i), cap, BracketKind::Modified)?;
        for ((r, s), v) in &base.products {
            let c = v.coeff(i);
            if c.is_zero() {
                continue;
            }
            let sign = Scalar::sign((base.parity(*r) * (base.parity(*s) + Parity::ODD)).is_odd());
            let term = family_bracket(&get(*r), &get(*s), cap, BracketKind::Modified)?;
            total.add_scaled(&term, &(&(&sign * &c) * &half))?;
        }
        for c in total.components() {
            if c.arity() <= cap {
                slot[c.arity() - 1] = c.clone();
            }
        }
    }
    Ok(out)
}

/// The expansion of `δα(m^i) = Σ {d_k, α_l^i}` written out term by term, without brackets.
///
/// A∞: `Σ (-1)^x (d_k(…, α_l(…), …) + (-1)^y α_k(…, d_l(…), …))` with
/// `x = (l+m_i)(k+v_1+⋯+v_{j-1}) + j(l-1) + m_i + 1`, `y = m_i(k+v_1+⋯+v_{j-1})`, `j` counted from 1.
/// L∞: `Σ_{sh(l,k-1)} ±(-1)^{(k-1)(l+m_i)} d_k(α_l(…), …) + Σ_{sh(k,l-1)} ±(-1)^{(l+1)k+m_i} α_l(d_k(…), …)`.
pub fn delta_alpha_expanded(alpha_i: &Family, m: Parity, d: &StructureMap, n: usize) -> Result<Cochain> {
    let space = d.space();
    let flavor = d.flavor();
    let mut out = Cochain::zero(space, flavor, n, Parity::of(n as i64 + 1) + m)?;
    let mi = m.value() as usize;
    for args in Cochain::domain_tuples(space, flavor, n) {
        let parities = space.parities_of(&args);
        let mut total = Vector::zero();
        for k in 1..=n {
            let l = n + 1 - k;
            match flavor {
                Flavor::Tensor => {
                    for j in 1..=k {
                        let before = &args[..j - 1];
                        let inner = &args[j - 1..j - 1 + l];
                        let after = &args[j - 1 + l..];
                        let bp = space.tuple_parity(before).value() as usize;
                        let x = (l + mi) * (k + bp) + j * (l - 1) + mi + 1;
                        let y = mi * (k + bp);
                        if let (Some(dk), Some(al)) = (d.component(k), alpha_i.component(l)) {
                            let v = al.eval(&basis_args(inner))?;
                            if !v.is_zero() {
                                total.add_scaled(&dk.eval(&with_inner(before, v, after))?, &Scalar::sign(x % 2 == 1));
                            }
                        }
                        if let (Some(ak), Some(dl)) = (alpha_i.component(k), d.component(l)) {
                            let v = dl.eval(&basis_args(inner))?;
                            if !v.is_zero() {
                                total.add_scaled(&ak.eval(&with_inner(before, v, after))?, &Scalar::sign((x + y) % 2 == 1));
                            }
                        }
                    }
                }
                Flavor::Exterior => {
                    if let (Some(dk), Some(al)) = (d.component(k), alpha_i.component(l)) {
                        for perm in unshuffles(l, k - 1) {
                            let eps = exterior_sign(&perm, &parities)?.is_negative();
                            let v = al.eval(&basis_args(&perm[..l].iter().map(|&p| args[p]).collect::<Vec<_>>()))?;
                            if v.is_zero() {
                                continue;
                            }
                            let rest: Vec<usize> = perm[l..].iter().map(|&p| args[p]).collect();
                            let odd = eps ^ ((k - 1) * (l + mi) % 2 == 1);
                            total.add_scaled(&dk.eval(&with_inner(&[], v, &rest))?, &Scalar::sign(odd));
                        }
                    }
                    if let (Some(dk), Some(al)) = (d.component(k), alpha_i.component(l)) {
                        for perm in unshuffles(k, l - 1) {
                            let eps = exterior_sign(&perm, &parities)?.is_negative();
                            let v = dk.eval(&basis_args(&perm[..k].iter().map(|&p| args[p]).collect::<Vec<_>>()))?;
                            if v.is_zero() {
                                continue;
                            }
                            let rest: Vec<usize> = perm[k..].iter().map(|&p| args[p]).collect();
                            let odd = eps ^ (((l + 1) * k + mi) % 2 == 1);
                            total.add_scaled(&al.eval(&with_inner(&[], v, &rest))?, &Scalar::sign(odd));
                        }
                    }
                }
            }
        }
        if !total.is_zero() {
            out.add_entry(&args, &total)?;
        }
    }
    Ok(out)
}

/// A slot `(m^i, n)` of the base residuals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BaseSlot {
    pub element: String,
    pub arity: usize,
}

impl fmt::Display for BaseSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, arity {})", self.element, self.arity)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Prop1Report {
    pub flavor: Flavor,
    pub arity_cap: usize,
    /// The unit component of the structure residual, i.e. `d`'s own relation, vanishes.
    pub base_relation_holds: bool,
    pub structure_vanishes: bool,
    pub mc_vanishes: bool,
    /// Both residuals vanish on exactly the same slots.
    pub equivalent: bool,
    pub first_structure_failure: Option<BaseSlot>,
    pub first_mc_failure: Option<BaseSlot>,
    /// `m_i`-part of the structure residual `= (-1)^{m_i(n+Σv)} · Σ ±M_i`.
    pub structure_identity: bool,
    /// MC residual `= (-1)^{m_i} Σ ±M_i`.
    pub mc_identity: bool,
    pub first_identity_failure: Option<String>,
    /// MC residual `= Σ ±M_i` with no `(-1)^{m_i}`; fails exactly where odd `m_i` carry a nonzero sum.
    pub mc_identity_without_sign: bool,
    pub first_unsigned_mismatch: Option<BaseSlot>,
}

impl Prop1Report {
    /// Every termwise identity holds and the two residuals vanish together.
    pub fn holds(&self) -> bool {
        self.base_relation_holds && self.equivalent && self.structure_identity && self.mc_identity
    }
}

/// Computes both residuals and the signed `M_i` sums, and checks the identities between them.
pub fn verify_prop1(alpha: &AlphaMap, d: &StructureMap, base: &Arc<BaseAlgebra>, cap: usize) -> Result<Prop1Report> {
    let tau = tau_from_alpha(alpha, d, base)?;
    let structure = structure_residual_tau(&tau, cap)?;
    let mc = mc_residual_base(alpha, d, base, cap)?;
    let space = d.space();
    let mut report = Prop1Report {
        flavor: d.flavor(),
        arity_cap: cap,
        base_relation_holds: structure.base_vanishes(),
        structure_vanishes: true,
        mc_vanishes: true,
        equivalent: true,
        first_structure_failure: None,
        first_mc_failure: None,
        structure_identity: true,
        mc_identity: true,
        first_identity_failure: None,
        mc_identity_without_sign: true,
        first_unsigned_mismatch: None,
    };
    for n in 1..=cap {
        for i in 0..base.dim() {
            let slot = || BaseSlot { element: base.dual().name(i).to_string(), arity: n };
            let a = &structure.parts[i][n - 1];
            let b = &mc[i][n - 1];
            if !a.is_zero() {
                report.structure_vanishes = false;
                report.first_structure_failure.get_or_insert_with(slot);
            }
            if !b.is_zero() {
                report.mc_vanishes = false;
                report.first_mc_failure.get_or_insert_with(slot);
            }
            if a.is_zero() != b.is_zero() {
                report.equivalent = false;
            }
            let m = mi_terms(alpha, d, base, i, n)?;
            let twisted = {
                let mut t = Cochain::zero(space, d.flavor(), n, m.parity())?;
                for (args, v) in m.entries() {
                    let odd = (base.parity(i) * (Parity::of(n as i64) + space.tuple_parity(args))).is_odd();
                    t.add_entry(args, &v.scaled(&Scalar::sign(odd)))?;
                }
                t
            };
            if &twisted != a && report.structure_identity {
                report.structure_identity = false;
                report.first_identity_failure.get_or_insert_with(|| format!("structure residual at {}", slot()));
            }
            if &m.scaled(&base.parity(i).sign()) != b && report.mc_identity {
                report.mc_identity = false;
                report.first_identity_failure.get_or_insert_with(|| format!("Maurer-Cartan residual at {}", slot()));
            }
            if &m != b && report.mc_identity_without_sign {
                report.mc_identity_without_sign = false;
                report.first_unsigned_mismatch = Some(slot());
            }
        }
    }
    Ok(report)
}
