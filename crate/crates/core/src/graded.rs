//! Z2-graded spaces, Z2×Z bidegrees, Koszul signs and shuffles.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An element of Z2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub struct Parity(bool);

impl Parity {
    pub const EVEN: Parity = Parity(false);
    pub const ODD: Parity = Parity(true);

    pub fn of(n: i64) -> Parity {
        Parity(n.rem_euclid(2) == 1)
    }

    pub fn is_odd(self) -> bool {
        self.0
    }

    pub fn value(self) -> u8 {
        self.0 as u8
    }

    pub fn sign(self) -> Scalar {
        Scalar::sign(self.0)
    }
}

impl From<Parity> for u8 {
    fn from(p: Parity) -> u8 {
        p.value()
    }
}

impl TryFrom<u8> for Parity {
    type Error = String;
    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Parity::EVEN),
            1 => Ok(Parity::ODD),
            _ => Err(format!("parity must be 0 or 1, got {v}")),
        }
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity(self.0 ^ rhs.0)
    }
}

impl Mul for Parity {
    type Output = Parity;
    fn mul(self, rhs: Parity) -> Parity {
        Parity(self.0 && rhs.0)
    }
}

impl std::iter::Sum for Parity {
    fn sum<I: Iterator<Item = Parity>>(iter: I) -> Parity {
        iter.fold(Parity::EVEN, |a, b| a + b)
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

/// The two Z2-valued inner products on Z2×Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// `kl + mn`
    Usual,
    /// `(k+m)(l+n)`
    Good,
}

/// A Z2×Z bidegree `(k̄, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bidegree {
    pub internal: Parity,
    pub external: i64,
}

impl Bidegree {
    pub fn new(internal: Parity, external: i64) -> Self {
        Bidegree { internal, external }
    }

    /// Parity of `k + m`; "odd" in either grading.
    pub fn total(self) -> Parity {
        self.internal + Parity::of(self.external)
    }

    pub fn pairing(self, other: Bidegree, kind: Pairing) -> Parity {
        match kind {
            Pairing::Usual => self.internal * other.internal + Parity::of(self.external) * Parity::of(other.external),
            Pairing::Good => self.total() * other.total(),
        }
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.internal, self.external)
    }
}

/// A finite-dimensional Z2-graded space with an ordered, named homogeneous basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedVectorSpace {
    names: Vec<String>,
    parities: Vec<Parity>,
    index: HashMap<String, usize>,
}

impl GradedVectorSpace {
    pub fn new<S: Into<String>>(basis: impl IntoIterator<Item = (S, Parity)>) -> Result<Self> {
        let mut space = GradedVectorSpace { names: Vec::new(), parities: Vec::new(), index: HashMap::new() };
        for (name, parity) in basis {
            let name = name.into();
            if space.index.insert(name.clone(), space.names.len()).is_some() {
                return Err(Error::Format(format!("duplicate basis name '{name}'")));
            }
            space.names.push(name);
            space.parities.push(parity);
        }
        Ok(space)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn parity(&self, i: usize) -> Parity {
        self.parities[i]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn basis(&self) -> impl Iterator<Item = (&str, Parity)> {
        self.names.iter().map(String::as_str).zip(self.parities.iter().copied())
    }

    pub fn tuple_parity(&self, args: &[usize]) -> Parity {
        args.iter().map(|&a| self.parities[a]).sum()
    }

    pub fn parities_of(&self, args: &[usize]) -> Vec<Parity> {
        args.iter().map(|&a| self.parities[a]).collect()
    }

    /// Sorts an exterior monomial into basis order.
    ///
    /// Returns `None` when an even basis vector repeats. The flag is true when
    /// the accumulated sign `(-1)^σ ε(σ)` is negative.
    pub fn canonical_exterior(&self, args: &[usize]) -> Option<(Vec<usize>, bool)> {
        let mut sorted = args.to_vec();
        let mut negative = false;
        for i in 1..sorted.len() {
            let mut j = i;
            while j > 0 && sorted[j - 1] > sorted[j] {
                let (a, b) = (sorted[j - 1], sorted[j]);
                // swapping neighbours u, v contributes -(-1)^{|u||v|}
                negative ^= !(self.parities[a] * self.parities[b]).is_odd();
                sorted.swap(j - 1, j);
                j -= 1;
            }
        }
        for w in sorted.windows(2) {
            if w[0] == w[1] && !self.parities[w[0]].is_odd() {
                return None;
            }
        }
        Some((sorted, negative))
    }

    /// Name-level form of [`canonical_exterior`](Self::canonical_exterior).
    pub fn canonicalize_exterior(&self, names: &[&str]) -> Result<Option<(Vec<String>, Scalar)>> {
        let idx = names.iter().map(|n| self.index_of(n)).collect::<Result<Vec<_>>>()?;
        Ok(self
            .canonical_exterior(&idx)
            .map(|(t, neg)| (t.iter().map(|&i| self.names[i].clone()).collect(), Scalar::sign(neg))))
    }

    /// All basis tuples of length `n`, lexicographic.
    pub fn tensor_tuples(&self, n: usize) -> Vec<Vec<usize>> {
        let d = self.dim();
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out.into_iter().flat_map(|t| (0..d).map(move |i| [t.clone(), vec![i]].concat())).collect();
        }
        if d == 0 && n > 0 {
            out.clear();
        }
        out
    }

    /// Canonical exterior tuples of length `n`: non-decreasing, with only odd
    /// basis vectors allowed to repeat. Lexicographic.
    pub fn exterior_tuples(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        self.exterior_rec(n, 0, &mut cur, &mut out);
        out
    }

    fn exterior_rec(&self, n: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for i in start..self.dim() {
            let next = if self.parities[i].is_odd() { i } else { i + 1 };
            cur.push(i);
            self.exterior_rec(n, next, cur, out);
            cur.pop();
        }
    }
}

/// A sparse vector in a [`GradedVectorSpace`], keyed by basis index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vector {
    coeffs: BTreeMap<usize, Scalar>,
}

impl Vector {
    pub fn zero() -> Self {
        Vector::default()
    }

    pub fn basis(i: usize) -> Self {
        Vector::term(i, Scalar::one())
    }

    pub fn term(i: usize, c: Scalar) -> Self {
        let mut v = Vector::zero();
        v.add_term(i, &c);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Scalar {
        self.coeffs.get(&i).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Scalar)> {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, i: usize, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&i) {
            Some(cur) => {
                *cur += c;
                if cur.is_zero() {
                    self.coeffs.remove(&i);
                }
            }
            None => {
                self.coeffs.insert(i, c.clone());
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Vector, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (i, x) in &other.coeffs {
            self.add_term(*i, &(x * c));
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Vector {
        let mut v = Vector::zero();
        v.add_scaled(self, c);
        v
    }

    /// The common parity of the support, if any; `Err` if mixed.
    pub fn parity(&self, space: &GradedVectorSpace) -> Result<Option<Parity>> {
        let mut found = None;
        for &i in self.coeffs.keys() {
            let p = space.parity(i);
            match found {
                None => found = Some(p),
                Some(q) if q != p => return Err(Error::Parity("vector is not homogeneous".into())),
                _ => {}
            }
        }
        Ok(found)
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<Vector> {
        let mut v = Vector::zero();
        for (i, c) in &self.coeffs {
            v.add_term(*i, &f(c)?);
        }
        Ok(v)
    }
}

impl FromIterator<(usize, Scalar)> for Vector {
    fn from_iter<T: IntoIterator<Item = (usize, Scalar)>>(iter: T) -> Self {
        let mut v = Vector::zero();
        for (i, c) in iter {
            v.add_term(i, &c);
        }
        v
    }
}

/// A permutation in "target" form: position `i` receives original element `perm[i]`.
pub type Permutation = Vec<usize>;

/// `(-1)^σ`, the ordinary sign of a permutation.
pub fn permutation_sign(perm: &[usize]) -> Scalar {
    Scalar::sign(inversion_parity(perm, None))
}

fn inversion_parity(perm: &[usize], parities: Option<&[Parity]>) -> bool {
    let mut odd = false;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                odd ^= match parities {
                    None => true,
                    Some(p) => (p[perm[i]] * p[perm[j]]).is_odd(),
                };
            }
        }
    }
    odd
}

fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::Dimension(format!("permutation of length {} with {n} parities", perm.len())));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Format(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

/// Negative-flag form of the Koszul sign `ε(σ; v_1, …, v_n)`.
pub(crate) fn koszul_negative(perm: &[usize], parities: &[Parity]) -> bool {
    inversion_parity(perm, Some(parities))
}

/// The Koszul sign `ε(σ; v_1, …, v_n)` of reordering graded elements as
/// `v_{σ(1)}, …, v_{σ(n)}`; the permutation sign is not included.
pub fn koszul_sign(perm: &[usize], parities: &[Parity]) -> Result<Scalar> {
    check_perm(perm, parities.len())?;
    Ok(Scalar::sign(koszul_negative(perm, parities)))
}

/// `(-1)^σ ε(σ)`, the sign relating a graded exterior monomial to its reordering.
pub fn exterior_sign(perm: &[usize], parities: &[Parity]) -> Result<Scalar> {
    check_perm(perm, parities.len())?;
    Ok(Scalar::sign(inversion_parity(perm, None) ^ koszul_negative(perm, parities)))
}

/// The `(k, l)`-unshuffles, in lexicographic order of their first block.
pub fn unshuffles(k: usize, l: usize) -> Vec<Permutation> {
    let n = k + l;
    let mut out = Vec::new();
    let mut first = Vec::with_capacity(k);
    combos(n, k, 0, &mut first, &mut |chosen| {
        let mut perm = chosen.to_vec();
        perm.extend((0..n).filter(|i| !chosen.contains(i)));
        out.push(perm);
    });
    out
}

fn combos(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in start..n {
        if n - i < k - cur.len() {
            break;
        }
        cur.push(i);
        combos(n, k, i + 1, cur, f);
        cur.pop();
    }
}
