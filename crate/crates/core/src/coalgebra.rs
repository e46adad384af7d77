//! Finite filtered graded coalgebras and their dual algebras.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graded::{Bidegree, Pairing, Parity};
use crate::scalar::Scalar;

/// `Δx = Σ c · (u ⊗ v)` stored as `(u, v, c)` triples.
pub type Coproduct = Vec<(usize, usize, Scalar)>;

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredCoalgebra {
    names: Vec<String>,
    bidegrees: Vec<Bidegree>,
    delta: Vec<Coproduct>,
    in_f0: Vec<bool>,
    in_f1: Vec<bool>,
    /// Pairing used for the swap map and the dual algebra signs.
    pairing: Pairing,
    index: HashMap<String, usize>,
}

impl FilteredCoalgebra {
    /// A coalgebra with `Δ = 0`, everything in `F1` and nothing in `F0`.
    pub fn new<S: Into<String>>(basis: impl IntoIterator<Item = (S, Bidegree)>, pairing: Pairing) -> Result<Self> {
        let mut names = Vec::new();
        let mut bidegrees = Vec::new();
        let mut index = HashMap::new();
        for (name, b) in basis {
            let name = name.into();
            if index.insert(name.clone(), names.len()).is_some() {
                return Err(Error::Coalgebra(format!("duplicate basis name '{name}'")));
            }
            names.push(name);
            bidegrees.push(b);
        }
        let n = names.len();
        Ok(FilteredCoalgebra { names, bidegrees, delta: vec![Vec::new(); n], in_f0: vec![false; n], in_f1: vec![true; n], pairing, index })
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

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn bidegree(&self, i: usize) -> Bidegree {
        self.bidegrees[i]
    }

    /// Total parity of a basis element.
    pub fn parity(&self, i: usize) -> Parity {
        self.bidegrees[i].total()
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    pub fn delta(&self, i: usize) -> &Coproduct {
        &self.delta[i]
    }

    pub fn in_f0(&self, i: usize) -> bool {
        self.in_f0[i]
    }

    pub fn in_f1(&self, i: usize) -> bool {
        self.in_f1[i]
    }

    /// Adds `c · (u ⊗ v)` to `Δx`.
    pub fn add_delta_term(&mut self, x: usize, u: usize, v: usize, c: Scalar) -> Result<()> {
        let n = self.dim();
        if x >= n || u >= n || v >= n {
            return Err(Error::Dimension("coalgebra basis index out of range".into()));
        }
        if c.is_zero() {
            return Ok(());
        }
        let terms = &mut self.delta[x];
        match terms.iter_mut().position(|(a, b, _)| *a == u && *b == v) {
            Some(pos) => {
                let sum = &terms[pos].2 + &c;
                if sum.is_zero() {
                    terms.remove(pos);
                } else {
                    terms[pos].2 = sum;
                }
            }
            None => terms.push((u, v, c)),
        }
        Ok(())
    }

    pub fn set_filtration(&mut self, i: usize, in_f0: bool, in_f1: bool) {
        self.in_f0[i] = in_f0;
        self.in_f1[i] = in_f1;
    }

    fn sign(&self, a: usize, b: usize) -> Scalar {
        Scalar::sign(self.bidegrees[a].pairing(self.bidegrees[b], self.pairing).is_odd())
    }

    fn delta_map(&self, x: usize) -> BTreeMap<(usize, usize), Scalar> {
        let mut m = BTreeMap::new();
        for (u, v, c) in &self.delta[x] {
            *m.entry((*u, *v)).or_insert_with(Scalar::zero) += c;
        }
        m.retain(|_, c| !c.is_zero());
        m
    }

    fn triples(&self, x: usize, left: bool) -> BTreeMap<(usize, usize, usize), Scalar> {
        let mut out = BTreeMap::new();
        for (u, v, c) in &self.delta[x] {
            let (split, keep) = if left { (*u, *v) } else { (*v, *u) };
            for (a, b, c2) in &self.delta[split] {
                let key = if left { (*a, *b, keep) } else { (keep, *a, *b) };
                *out.entry(key).or_insert_with(Scalar::zero) += &(c * c2);
            }
        }
        out.retain(|_, c: &mut Scalar| !c.is_zero());
        out
    }

    /// Checks coassociativity, cocommutativity and the filtration conditions.
    pub fn check(&self) -> CoalgebraReport {
        let mut violations = Vec::new();
        for x in 0..self.dim() {
            if self.in_f0[x] && !self.in_f1[x] {
                violations.push(Violation::F0NotInF1 { element: self.names[x].clone() });
            }
            if self.in_f0[x] && !self.delta_map(x).is_empty() {
                violations.push(Violation::F0NotPrimitive { element: self.names[x].clone() });
            }
            for (u, v, _) in &self.delta[x] {
                if !self.in_f1[*u] || !self.in_f1[*v] {
                    violations.push(Violation::DeltaOutsideF1 { element: self.names[x].clone(), term: (self.names[*u].clone(), self.names[*v].clone()) });
                    break;
                }
            }
            let left = self.triples(x, true);
            let right = self.triples(x, false);
            if left != right {
                let witness = left
                    .keys()
                    .chain(right.keys())
                    .find(|k| left.get(*k) != right.get(*k))
                    .map(|&(a, b, c)| (self.names[a].clone(), self.names[b].clone(), self.names[c].clone()))
                    .expect("maps differ");
                violations.push(Violation::Coassociativity { element: self.names[x].clone(), term: witness });
            }
            let d = self.delta_map(x);
            for (&(u, v), c) in &d {
                let swapped = d.get(&(v, u)).cloned().unwrap_or_else(Scalar::zero);
                if swapped != &self.sign(u, v) * c {
                    violations.push(Violation::Cocommutativity { element: self.names[x].clone(), term: (self.names[u].clone(), self.names[v].clone()) });
                    break;
                }
            }
        }
        CoalgebraReport { violations }
    }

    pub fn is_f1_everything(&self) -> bool {
        self.in_f1.iter().all(|&b| b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Coassociativity { element: String, term: (String, String, String) },
    Cocommutativity { element: String, term: (String, String) },
    F0NotInF1 { element: String },
    F0NotPrimitive { element: String },
    DeltaOutsideF1 { element: String, term: (String, String) },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Coassociativity { element, term } => {
                write!(f, "coassociativity fails on {element} at {}⊗{}⊗{}", term.0, term.1, term.2)
            }
            Violation::Cocommutativity { element, term } => write!(f, "cocommutativity fails on {element} at {}⊗{}", term.0, term.1),
            Violation::F0NotInF1 { element } => write!(f, "{element} is in F0 but not in F1"),
            Violation::F0NotPrimitive { element } => write!(f, "{element} is in F0 but has nonzero coproduct"),
            Violation::DeltaOutsideF1 { element, term } => write!(f, "coproduct of {element} has the term {}⊗{} outside F1⊗F1", term.0, term.1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoalgebraReport {
    pub violations: Vec<Violation>,
}

impl CoalgebraReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first(&self) -> Option<&Violation> {
        self.violations.first()
    }
}

pub fn check_coalgebra(f: &FilteredCoalgebra) -> CoalgebraReport {
    f.check()
}

pub fn lie_e(k: usize) -> String {
    format!("e{k}")
}

pub fn lie_f(k: usize) -> String {
    format!("f{k}")
}

/// `span{e^k, f^k : k ≤ n}` with `Δe^k = -½ Σ e^i⊗e^{k-i}`,
/// `Δf^k = -½ Σ (f^i⊗e^{k-i} + e^i⊗f^{k-i})`, `F0 = span{e^1, f^1}`.
pub fn build_f_lie(n: usize) -> Result<FilteredCoalgebra> {
    if n == 0 {
        return Err(Error::Coalgebra("order must be at least 1".into()));
    }
    let mut basis = Vec::new();
    for k in 1..=n {
        basis.push((lie_e(k), Bidegree::new(Parity::EVEN, 0)));
    }
    for k in 1..=n {
        basis.push((lie_f(k), Bidegree::new(Parity::ODD, 0)));
    }
    let mut f = FilteredCoalgebra::new(basis, Pairing::Usual)?;
    let e = |k: usize| k - 1;
    let fi = |k: usize| n + k - 1;
    let c = -Scalar::half();
    for k in 1..=n {
        for i in 1..k {
            f.add_delta_term(e(k), e(i), e(k - i), c.clone())?;
            f.add_delta_term(fi(k), fi(i), e(k - i), c.clone())?;
            f.add_delta_term(fi(k), e(i), fi(k - i), c.clone())?;
        }
    }
    f.set_filtration(e(1), true, true);
    f.set_filtration(fi(1), true, true);
    Ok(f)
}

pub fn restricted_e(i: usize, j: i64) -> String {
    format!("e[{i},{j}]")
}

pub fn restricted_f(i: usize, j: i64) -> String {
    format!("f[{i},{j}]")
}

/// The indices `(i, j)` of the restricted family: `1 ≤ i ≤ n`, `i + j ≥ 2`, `i + j - 1 ≤ cap`.
pub fn restricted_indices(n: usize, cap: usize) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    for i in 1..=n {
        let lo = 2 - i as i64;
        let hi = cap as i64 + 1 - i as i64;
        for j in lo..=hi {
            out.push((i, j));
        }
    }
    out
}

/// `span{e^{i,j}, f^{i,j}}` with `bdeg e^{i,j} = (j, j-2)`, `bdeg f^{i,j} = (j-1, j-2)`,
/// `Δe^{p,q} = -½ Σ e^{i,j}⊗e^{p-i,q+2-j}` and the analogous `Δf`, summed over
/// every pair of indices in the family.
///
/// Summing only `1 ≤ j ≤ q + 1` loses coassociativity as soon as `e^{i,j}` with
/// `j ≤ 0` exist; the extra summands involve only elements of non-positive
/// arity. The index set is cut off by the weight `i + j - 1 ≤ cap`, which is
/// closed under the summands of `Δ`; `F0` is the `i = 1` span.
pub fn build_f_restricted(n: usize, cap: usize) -> Result<FilteredCoalgebra> {
    if n == 0 || cap < 2 {
        return Err(Error::Coalgebra("need order ≥ 1 and arity cap ≥ 2".into()));
    }
    let idx = restricted_indices(n, cap);
    let mut basis = Vec::new();
    for &(i, j) in &idx {
        basis.push((restricted_e(i, j), Bidegree::new(Parity::of(j), j - 2)));
    }
    for &(i, j) in &idx {
        basis.push((restricted_f(i, j), Bidegree::new(Parity::of(j - 1), j - 2)));
    }
    let mut f = FilteredCoalgebra::new(basis, Pairing::Good)?;
    let pos: HashMap<(usize, i64), usize> = idx.iter().enumerate().map(|(k, &ij)| (ij, k)).collect();
    let m = idx.len();
    let c = -Scalar::half();
    for &(p, q) in &idx {
        let x = pos[&(p, q)];
        for i in 1..p {
            for j in (2 - i as i64)..=(q + (p - i) as i64) {
                let (Some(&u), Some(&v)) = (pos.get(&(i, j)), pos.get(&(p - i, q + 2 - j))) else {
                    continue;
                };
                f.add_delta_term(x, u, v, c.clone())?;
                f.add_delta_term(m + x, m + u, v, c.clone())?;
                f.add_delta_term(m + x, u, m + v, c.clone())?;
            }
        }
        if p == 1 {
            f.set_filtration(x, true, true);
            f.set_filtration(m + x, true, true);
        }
    }
    Ok(f)
}

/// The algebra dual to a coalgebra: `u_a u_b = Σ_c (-1)^{⟨a,b⟩} Δ_c(a⊗b) u_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualAlgebra {
    pub names: Vec<String>,
    pub parities: Vec<Parity>,
    products: BTreeMap<(usize, usize), BTreeMap<usize, Scalar>>,
}

impl DualAlgebra {
    pub fn product(&self, a: usize, b: usize) -> BTreeMap<usize, Scalar> {
        self.products.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    fn multiply(&self, x: &BTreeMap<usize, Scalar>, y: &BTreeMap<usize, Scalar>) -> BTreeMap<usize, Scalar> {
        let mut out: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (a, ca) in x {
            for (b, cb) in y {
                for (c, k) in self.product(*a, *b) {
                    *out.entry(c).or_insert_with(Scalar::zero) += &(&(ca * cb) * &k);
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualReport {
    pub graded_commutative: bool,
    pub associative: bool,
    /// First pair or triple where a law fails.
    pub witness: Option<Vec<String>>,
}

pub fn dual_algebra(f: &FilteredCoalgebra) -> (DualAlgebra, DualReport) {
    let mut products: BTreeMap<(usize, usize), BTreeMap<usize, Scalar>> = BTreeMap::new();
    for x in 0..f.dim() {
        for (u, v, c) in f.delta(x) {
            let k = &f.sign(*u, *v) * c;
            let slot = products.entry((*u, *v)).or_default();
            *slot.entry(x).or_insert_with(Scalar::zero) += &k;
            slot.retain(|_, c| !c.is_zero());
        }
    }
    products.retain(|_, m| !m.is_empty());
    let g = DualAlgebra { names: f.names.clone(), parities: (0..f.dim()).map(|i| f.parity(i)).collect(), products };

    let n = g.dim();
    let unit = |i: usize| BTreeMap::from([(i, Scalar::one())]);
    let mut witness = None;
    let mut graded_commutative = true;
    'comm: for a in 0..n {
        for b in 0..n {
            let ab = g.product(a, b);
            let s = f.sign(a, b);
            let ba: BTreeMap<usize, Scalar> = g.product(b, a).into_iter().map(|(k, c)| (k, &s * &c)).collect();
            if ab != ba {
                graded_commutative = false;
                witness = Some(vec![g.names[a].clone(), g.names[b].clone()]);
                break 'comm;
            }
        }
    }
    let mut associative = true;
    'assoc: for a in 0..n {
        for b in 0..n {
            let ab = g.product(a, b);
            for c in 0..n {
                let bc = g.product(b, c);
                if g.multiply(&ab, &unit(c)) != g.multiply(&unit(a), &bc) {
                    associative = false;
                    if witness.is_none() {
                        witness = Some(vec![g.names[a].clone(), g.names[b].clone(), g.names[c].clone()]);
                    }
                    break 'assoc;
                }
            }
        }
    }
    (g, DualReport { graded_commutative, associative, witness })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> Scalar {
        -Scalar::half()
    }

    #[test]
    fn lie_family_constants() {
        let f = build_f_lie(3).unwrap();
        let e = |k| f.index_of(&lie_e(k)).unwrap();
        let fi = |k| f.index_of(&lie_f(k)).unwrap();
        assert!(f.delta(e(1)).is_empty() && f.delta(fi(1)).is_empty());
        assert_eq!(f.delta(e(2)), &vec![(e(1), e(1), half())]);
        let mut d = f.delta(fi(2)).clone();
        d.sort_by_key(|t| (t.0, t.1));
        let mut expected = vec![(fi(1), e(1), half()), (e(1), fi(1), half())];
        expected.sort_by_key(|t| (t.0, t.1));
        assert_eq!(d, expected);
        assert!(f.check().holds(), "{:?}", f.check());
    }

    #[test]
    fn primitive_element_passes() {
        let mut f = FilteredCoalgebra::new([("e", Bidegree::new(Parity::EVEN, 0))], Pairing::Usual).unwrap();
        f.set_filtration(0, true, true);
        assert!(f.check().holds());
    }

    #[test]
    fn antisymmetric_coproduct_is_not_cocommutative() {
        let mut f = FilteredCoalgebra::new(
            [("x", Bidegree::new(Parity::EVEN, 0)), ("e", Bidegree::new(Parity::EVEN, 0)), ("f", Bidegree::new(Parity::ODD, 0))],
            Pairing::Usual,
        )
        .unwrap();
        f.add_delta_term(0, 1, 2, Scalar::one()).unwrap();
        f.add_delta_term(0, 2, 1, Scalar::from_i64(-1)).unwrap();
        let report = f.check();
        assert!(matches!(report.first(), Some(Violation::Cocommutativity { .. })));
    }

    #[test]
    fn restricted_family_small_cases() {
        let f = build_f_restricted(2, 3).unwrap();
        assert!(f.check().holds(), "{:?}", f.check());
        let e11 = f.index_of(&restricted_e(1, 1)).unwrap();
        let e12 = f.index_of(&restricted_e(1, 2)).unwrap();
        let e13 = f.index_of(&restricted_e(1, 3)).unwrap();
        let e22 = f.index_of(&restricted_e(2, 2)).unwrap();
        // weight of e[2,2] is 3, so all three summands survive
        let mut d = f.delta(e22).clone();
        d.sort_by_key(|t| (t.0, t.1));
        let mut expected = vec![(e11, e13, half()), (e12, e12, half()), (e13, e11, half())];
        expected.sort_by_key(|t| (t.0, t.1));
        assert_eq!(d, expected);
        let f12 = f.index_of(&restricted_f(1, 2)).unwrap();
        assert_eq!(f.bidegree(f12), Bidegree::new(Parity::ODD, 0));
        for j in 1..=3 {
            assert!(f.delta(f.index_of(&restricted_e(1, j)).unwrap()).is_empty());
        }
    }

    #[test]
    fn dual_of_lie_family() {
        let f = build_f_lie(4).unwrap();
        let (g, report) = dual_algebra(&f);
        assert!(report.graded_commutative && report.associative, "{report:?}");
        let e = |k| f.index_of(&lie_e(k)).unwrap();
        let fi = |k| f.index_of(&lie_f(k)).unwrap();
        assert_eq!(g.product(e(1), e(1)), BTreeMap::from([(e(2), half())]));
        assert!(g.product(fi(1), fi(1)).is_empty());
    }
}
