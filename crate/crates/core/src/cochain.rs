//! Multilinear cochains `V^{⊗k} → V` and `Λ^k V → V` as sparse tables.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graded::{Bidegree, GradedVectorSpace, Parity, Vector};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// Cochains on the tensor coalgebra (A∞ side).
    Tensor,
    /// Cochains on the graded exterior coalgebra (L∞ side).
    Exterior,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Tensor => "tensor",
            Flavor::Exterior => "exterior",
        })
    }
}

/// A homogeneous cochain of fixed arity and internal parity.
///
/// Exterior tables are keyed by canonical tuples only.
#[derive(Debug, Clone, PartialEq)]
pub struct Cochain {
    space: Arc<GradedVectorSpace>,
    flavor: Flavor,
    arity: usize,
    parity: Parity,
    table: BTreeMap<Vec<usize>, Vector>,
}

impl Cochain {
    pub fn zero(space: &Arc<GradedVectorSpace>, flavor: Flavor, arity: usize, parity: Parity) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Arity("cochains have arity at least 1".into()));
        }
        Ok(Cochain { space: space.clone(), flavor, arity, parity, table: BTreeMap::new() })
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        &self.space
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Internal parity `e(φ)`.
    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// `(e(φ), k-1)`.
    pub fn bidegree(&self) -> Bidegree {
        Bidegree::new(self.parity, self.arity as i64 - 1)
    }

    /// Parity in the good grading, `e(φ) + k - 1`.
    pub fn good_parity(&self) -> Parity {
        self.bidegree().total()
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vector)> {
        self.table.iter()
    }

    pub fn nnz(&self) -> usize {
        self.table.len()
    }

    /// Adds `value` at the basis tuple `args`, canonicalizing exterior tuples.
    pub fn add_entry(&mut self, args: &[usize], value: &Vector) -> Result<()> {
        if args.len() != self.arity {
            return Err(Error::Arity(format!("{} arguments for arity {}", args.len(), self.arity)));
        }
        if let Some(&bad) = args.iter().find(|&&a| a >= self.space.dim()) {
            return Err(Error::Dimension(format!("basis index {bad} out of range")));
        }
        if let Some(p) = value.parity(&self.space)? {
            let expected = self.parity + self.space.tuple_parity(args);
            if p != expected {
                return Err(Error::Parity(format!(
                    "value at {} has parity {p}, cochain requires {expected}",
                    self.format_args(args)
                )));
            }
        }
        let (key, negative) = match self.flavor {
            Flavor::Tensor => (args.to_vec(), false),
            Flavor::Exterior => match self.space.canonical_exterior(args) {
                Some(c) => c,
                None if value.is_zero() => return Ok(()),
                None => {
                    return Err(Error::Parity(format!(
                        "nonzero value on {}, which vanishes in the exterior power",
                        self.format_args(args)
                    )))
                }
            },
        };
        let slot = self.table.entry(key.clone()).or_default();
        slot.add_scaled(value, &Scalar::sign(negative));
        if slot.is_zero() {
            self.table.remove(&key);
        }
        Ok(())
    }

    pub fn with_entry(mut self, args: &[usize], value: Vector) -> Result<Self> {
        self.add_entry(args, &value)?;
        Ok(self)
    }

    /// Table entry for a canonical key, without sign handling.
    pub fn stored(&self, key: &[usize]) -> Option<&Vector> {
        self.table.get(key)
    }

    /// Value on a basis tuple, with the exterior reordering sign folded in.
    pub fn value_at(&self, args: &[usize]) -> Vector {
        match self.lookup(args) {
            Some((v, false)) => v.clone(),
            Some((v, true)) => v.scaled(&Scalar::from_i64(-1)),
            None => Vector::zero(),
        }
    }

    /// Table entry for `args` and whether it must be negated.
    pub(crate) fn lookup(&self, args: &[usize]) -> Option<(&Vector, bool)> {
        match self.flavor {
            Flavor::Tensor => self.table.get(args).map(|v| (v, false)),
            Flavor::Exterior => {
                let (key, neg) = self.space.canonical_exterior(args)?;
                self.table.get(&key).map(|v| (v, neg))
            }
        }
    }

    /// `φ(prefix…, w, suffix…)` extended linearly in the slot holding `w`.
    pub(crate) fn eval_slot(&self, prefix: &[usize], inner: &Vector, suffix: &[usize], out: &mut Vector, coef: &Scalar) {
        let mut args = Vec::with_capacity(self.arity);
        args.extend_from_slice(prefix);
        args.push(0);
        args.extend_from_slice(suffix);
        let slot = prefix.len();
        for (c, wc) in inner.iter() {
            args[slot] = c;
            if let Some((v, neg)) = self.lookup(&args) {
                let mut f = wc * coef;
                if neg {
                    f = -f;
                }
                out.add_scaled(v, &f);
            }
        }
    }

    /// Multilinear evaluation on homogeneous vectors.
    pub fn eval(&self, args: &[Vector]) -> Result<Vector> {
        if args.len() != self.arity {
            return Err(Error::Arity(format!("{} arguments for arity {}", args.len(), self.arity)));
        }
        for a in args {
            a.parity(&self.space)?;
        }
        let mut out = Vector::zero();
        let mut idx = vec![0usize; self.arity];
        self.eval_rec(args, 0, &mut idx, Scalar::one(), &mut out);
        Ok(out)
    }

    fn eval_rec(&self, args: &[Vector], pos: usize, idx: &mut Vec<usize>, coef: Scalar, out: &mut Vector) {
        if pos == args.len() {
            if let Some((v, neg)) = self.lookup(idx) {
                out.add_scaled(v, &if neg { -coef } else { coef });
            }
            return;
        }
        for (i, c) in args[pos].iter() {
            idx[pos] = i;
            self.eval_rec(args, pos + 1, idx, &coef * c, out);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Cochain {
        let mut out = self.cleared();
        if !c.is_zero() {
            for (k, v) in &self.table {
                out.table.insert(k.clone(), v.scaled(c));
            }
        }
        out
    }

    pub(crate) fn cleared(&self) -> Cochain {
        Cochain { space: self.space.clone(), flavor: self.flavor, arity: self.arity, parity: self.parity, table: BTreeMap::new() }
    }

    fn check_compatible(&self, other: &Cochain) -> Result<()> {
        if self.flavor != other.flavor {
            return Err(Error::Flavor(format!("{} vs {}", self.flavor, other.flavor)));
        }
        if self.arity != other.arity || self.parity != other.parity {
            return Err(Error::Arity(format!(
                "cannot add cochains of arity/parity {}/{} and {}/{}",
                self.arity, self.parity, other.arity, other.parity
            )));
        }
        Ok(())
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, other: &Cochain, c: &Scalar) -> Result<()> {
        self.check_compatible(other)?;
        for (k, v) in &other.table {
            let slot = self.table.entry(k.clone()).or_default();
            slot.add_scaled(v, c);
            if slot.is_zero() {
                self.table.remove(k);
            }
        }
        Ok(())
    }

    pub(crate) fn insert_canonical(&mut self, key: Vec<usize>, value: Vector) {
        if !value.is_zero() {
            self.table.insert(key, value);
        }
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<Cochain> {
        let mut out = self.cleared();
        for (k, v) in &self.table {
            out.insert_canonical(k.clone(), v.map_scalars(&f)?);
        }
        Ok(out)
    }

    /// Basis tuples on which a cochain of this flavor and arity is determined.
    pub fn domain_tuples(space: &GradedVectorSpace, flavor: Flavor, arity: usize) -> Vec<Vec<usize>> {
        match flavor {
            Flavor::Tensor => space.tensor_tuples(arity),
            Flavor::Exterior => space.exterior_tuples(arity),
        }
    }

    pub fn format_args(&self, args: &[usize]) -> String {
        format_tuple(&self.space, args)
    }
}

pub fn format_tuple(space: &GradedVectorSpace, args: &[usize]) -> String {
    let names: Vec<&str> = args.iter().map(|&a| space.name(a)).collect();
    format!("({})", names.join(","))
}

pub fn format_vector(space: &GradedVectorSpace, v: &Vector) -> String {
    if v.is_zero() {
        return "0".into();
    }
    v.iter().map(|(i, c)| format!("{c}*{}", space.name(i))).collect::<Vec<_>>().join(" + ")
}

impl fmt::Display for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} arity {} parity {}]", self.flavor, self.arity, self.parity)?;
        if self.table.is_empty() {
            return write!(f, " 0");
        }
        for (k, v) in &self.table {
            write!(f, " {}={}", self.format_args(k), format_vector(&self.space, v))?;
        }
        Ok(())
    }
}

/// A sum of cochains over several arities, homogeneous in the good grading:
/// the component of arity `k` has internal parity `good + k - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    space: Arc<GradedVectorSpace>,
    flavor: Flavor,
    good: Parity,
    components: BTreeMap<usize, Cochain>,
}

impl Family {
    pub fn zero(space: &Arc<GradedVectorSpace>, flavor: Flavor, good: Parity) -> Self {
        Family { space: space.clone(), flavor, good, components: BTreeMap::new() }
    }

    pub fn from_cochain(c: Cochain) -> Self {
        let mut f = Family::zero(&c.space, c.flavor, c.good_parity());
        f.components.insert(c.arity, c);
        f
    }

    pub fn from_cochains(space: &Arc<GradedVectorSpace>, flavor: Flavor, good: Parity, cochains: impl IntoIterator<Item = Cochain>) -> Result<Self> {
        let mut f = Family::zero(space, flavor, good);
        for c in cochains {
            f.add_cochain(&c, &Scalar::one())?;
        }
        Ok(f)
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        &self.space
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn good_parity(&self) -> Parity {
        self.good
    }

    /// Internal parity required of the arity-`k` component.
    pub fn parity_at(&self, arity: usize) -> Parity {
        self.good + Parity::of(arity as i64 - 1)
    }

    pub fn component(&self, arity: usize) -> Option<&Cochain> {
        self.components.get(&arity)
    }

    /// The arity-`k` component, or the zero cochain of the right parity.
    pub fn component_or_zero(&self, arity: usize) -> Cochain {
        self.components
            .get(&arity)
            .cloned()
            .unwrap_or_else(|| Cochain::zero(&self.space, self.flavor, arity, self.parity_at(arity)).expect("arity >= 1"))
    }

    pub fn components(&self) -> impl Iterator<Item = &Cochain> {
        self.components.values()
    }

    pub fn max_arity(&self) -> usize {
        self.components.keys().next_back().copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(Cochain::is_zero)
    }

    pub fn add_cochain(&mut self, c: &Cochain, coef: &Scalar) -> Result<()> {
        if c.is_zero() || coef.is_zero() {
            return Ok(());
        }
        if c.flavor != self.flavor {
            return Err(Error::Flavor(format!("{} cochain in {} family", c.flavor, self.flavor)));
        }
        if c.good_parity() != self.good {
            return Err(Error::Parity(format!(
                "arity-{} cochain of internal parity {} is not of good degree {}",
                c.arity, c.parity, self.good
            )));
        }
        match self.components.get_mut(&c.arity) {
            Some(cur) => {
                cur.add_scaled(c, coef)?;
                if cur.is_zero() {
                    self.components.remove(&c.arity);
                }
            }
            None => {
                self.components.insert(c.arity, c.scaled(coef));
            }
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, other: &Family, coef: &Scalar) -> Result<()> {
        if other.is_zero() {
            return Ok(());
        }
        if self.is_zero() && self.components.is_empty() && other.flavor == self.flavor {
            self.good = other.good;
        }
        if other.good != self.good {
            return Err(Error::Parity("adding families of different good degree".into()));
        }
        for c in other.components.values() {
            self.add_cochain(c, coef)?;
        }
        Ok(())
    }

    pub fn scaled(&self, coef: &Scalar) -> Family {
        let mut out = Family::zero(&self.space, self.flavor, self.good);
        if !coef.is_zero() {
            for (k, c) in &self.components {
                out.components.insert(*k, c.scaled(coef));
            }
        }
        out
    }

    pub fn truncated(&self, cap: usize) -> Family {
        let mut out = self.clone();
        out.components.retain(|k, _| *k <= cap);
        out
    }

    /// The first arity with a nonzero component and its first nonzero entry.
    pub fn first_nonzero(&self) -> Option<(usize, Vec<usize>, Vector)> {
        self.components.values().find_map(|c| c.entries().next().map(|(k, v)| (c.arity, k.clone(), v.clone())))
    }

    pub fn map_scalars(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<Family> {
        let mut out = Family::zero(&self.space, self.flavor, self.good);
        for (k, c) in &self.components {
            let m = c.map_scalars(&f)?;
            if !m.is_zero() {
                out.components.insert(*k, m);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.components.values().filter(|c| !c.is_zero()).map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An odd element `d = Σ d_k` of the cochain complex: the structure maps of an
/// A∞ (tensor) or L∞ (exterior) algebra, or a candidate for one.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureMap {
    family: Family,
}

impl StructureMap {
    pub fn new(family: Family) -> Result<Self> {
        if !family.good_parity().is_odd() {
            return Err(Error::Parity("structure maps must be odd in the good grading".into()));
        }
        Ok(StructureMap { family })
    }

    pub fn zero(space: &Arc<GradedVectorSpace>, flavor: Flavor) -> Self {
        StructureMap { family: Family::zero(space, flavor, Parity::ODD) }
    }

    pub fn from_components(space: &Arc<GradedVectorSpace>, flavor: Flavor, components: impl IntoIterator<Item = Cochain>) -> Result<Self> {
        StructureMap::new(Family::from_cochains(space, flavor, Parity::ODD, components)?)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn into_family(self) -> Family {
        self.family
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        self.family.space()
    }

    pub fn flavor(&self) -> Flavor {
        self.family.flavor()
    }

    pub fn component(&self, arity: usize) -> Option<&Cochain> {
        self.family.component(arity)
    }

    pub fn components(&self) -> impl Iterator<Item = &Cochain> {
        self.family.components().filter(|c| !c.is_zero())
    }

    pub fn max_arity(&self) -> usize {
        self.components().map(Cochain::arity).max().unwrap_or(0)
    }

    /// True when only the arity-2 component is nonzero (or everything is zero).
    pub fn is_binary(&self) -> bool {
        self.components().all(|c| c.arity() == 2)
    }
}

impl fmt::Display for StructureMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}
