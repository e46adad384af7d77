//! JSON problem documents.
//!
//! Scalars are strings (`"3"`, `"-1/2"`). A cochain is
//! `{"arity": 2, "parity": 0, "entries": [{"args": ["x", "y"], "value": {"y": "1"}}]}`;
//! `parity` is the internal parity and may be omitted where the context fixes it.
//! Exterior tuples may be given in any order: they are sorted with the Koszul
//! sign, and two entries landing on the same tuple must agree.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::base::BaseAlgebra;
use crate::coalgebra::{build_f_lie, build_f_restricted, FilteredCoalgebra};
use crate::cochain::{Cochain, Family, Flavor, StructureMap};
use crate::error::{Error, Result};
use crate::graded::{Bidegree, GradedVectorSpace, Pairing, Parity, Vector};
use crate::scalar::{FieldConfig, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Space,
    Structure,
    Deformation,
    Massey,
    Base,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lie,
    #[default]
    Infinity,
    Restricted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBasis {
    pub name: String,
    pub parity: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEntry {
    pub args: Vec<String>,
    pub value: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCochain {
    pub arity: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<u8>,
    #[serde(default)]
    pub entries: Vec<RawEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDeformation {
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub gamma1: Vec<RawCochain>,
    #[serde(default)]
    pub beta1: Vec<RawCochain>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCoalgebraBasis {
    pub name: String,
    pub internal: u8,
    pub external: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDeltaTerm {
    pub element: String,
    pub left: String,
    pub right: String,
    pub coefficient: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum RawCoalgebra {
    Lie {
        order: usize,
    },
    Restricted {
        order: usize,
        cap: usize,
    },
    Explicit {
        basis: Vec<RawCoalgebraBasis>,
        pairing: Pairing,
        #[serde(default)]
        delta: Vec<RawDeltaTerm>,
        #[serde(default)]
        f0: Vec<String>,
        /// Everything when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f1: Option<Vec<String>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMassey {
    pub coalgebra: RawCoalgebra,
    #[serde(default)]
    pub a: BTreeMap<String, Vec<RawCochain>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<BTreeMap<String, Vec<RawCochain>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<BTreeMap<String, Vec<RawCochain>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGenerator {
    pub name: String,
    pub parity: u8,
    pub exponent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProduct {
    pub left: String,
    pub right: String,
    pub value: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawBaseAlgebra {
    Truncated { generators: Vec<RawGenerator> },
    Explicit { basis: Vec<RawBasis>, products: Vec<RawProduct> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawBase {
    pub algebra: RawBaseAlgebra,
    /// `α(m_i^*)` keyed by the name of `m_i`.
    #[serde(default)]
    pub alpha: BTreeMap<String, Vec<RawCochain>>,
}

/// The document as written on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDocument {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity_cap: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub basis: Vec<RawBasis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<Flavor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<Vec<RawCochain>>,
    /// Free cochains, e.g. the operands of `bracket`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cochains: Vec<RawCochain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deformation: Option<RawDeformation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub massey: Option<RawMassey>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<RawBase>,
}

#[derive(Debug, Clone)]
pub struct DeformationData {
    pub method: Method,
    pub gamma1: Vec<Cochain>,
    pub beta1: Vec<Cochain>,
}

#[derive(Debug, Clone)]
pub struct MasseyData {
    pub coalgebra: FilteredCoalgebra,
    pub a: BTreeMap<usize, Family>,
    pub b: Option<BTreeMap<usize, Family>>,
    pub alpha: Option<BTreeMap<usize, Family>>,
}

#[derive(Debug, Clone)]
pub struct BaseData {
    pub algebra: Arc<BaseAlgebra>,
    /// Keyed by the index of `m_i`.
    pub alpha: BTreeMap<usize, Family>,
}

/// A validated document. `raw` is the normalized form that [`serialize_document`] writes.
#[derive(Debug, Clone)]
pub struct Document {
    pub raw: RawDocument,
    pub kind: Kind,
    pub field: FieldConfig,
    pub space: Arc<GradedVectorSpace>,
    pub structure: Option<StructureMap>,
    pub cochains: Vec<Cochain>,
    pub deformation: Option<DeformationData>,
    pub massey: Option<MasseyData>,
    pub base: Option<BaseData>,
}

impl PartialEq for Document {
    fn eq(&self, other: &Self) -> bool {
        self.raw == other.raw
    }
}

impl Document {
    pub fn flavor(&self) -> Result<Flavor> {
        self.raw.flavor.ok_or_else(|| Error::Missing("flavor".into()))
    }

    pub fn structure(&self) -> Result<&StructureMap> {
        self.structure.as_ref().ok_or_else(|| Error::Missing("structure".into()))
    }
}

fn at(path: &str, e: Error) -> Error {
    Error::Format(format!("{path}: {e}"))
}

fn parse_scalar(text: &str, field: FieldConfig, path: &str) -> Result<Scalar> {
    let s: Scalar = text.parse().map_err(|e| at(path, e))?;
    field.coerce(&s).map_err(|e| at(path, e))
}

fn parity_of(p: u8, path: &str) -> Result<Parity> {
    match p {
        0 | 1 => Ok(Parity::of(p as i64)),
        _ => Err(Error::Format(format!("{path}: parity must be 0 or 1, got {p}"))),
    }
}

fn vector(space: &GradedVectorSpace, map: &BTreeMap<String, String>, field: FieldConfig, path: &str) -> Result<Vector> {
    let mut v = Vector::zero();
    for (name, c) in map {
        let i = space.index_of(name).map_err(|e| at(path, e))?;
        v.add_term(i, &parse_scalar(c, field, &format!("{path}.{name}"))?);
    }
    Ok(v)
}

fn vector_to_raw(space: &GradedVectorSpace, v: &Vector) -> BTreeMap<String, String> {
    v.iter().map(|(i, c)| (space.name(i).to_string(), c.to_string())).collect()
}

/// Builds a cochain whose internal parity is `good + arity - 1` unless stated.
fn cochain(space: &Arc<GradedVectorSpace>, flavor: Flavor, raw: &RawCochain, good: Parity, field: FieldConfig, path: &str) -> Result<Cochain> {
    if raw.arity == 0 {
        return Err(Error::Format(format!("{path}.arity: arity must be at least 1")));
    }
    let implied = good + Parity::of(raw.arity as i64 - 1);
    let parity = match raw.parity {
        Some(p) => {
            let p = parity_of(p, &format!("{path}.parity"))?;
            if p != implied {
                return Err(Error::Format(format!("{path}.parity: expected {implied} here, got {p}")));
            }
            p
        }
        None => implied,
    };
    let mut c = Cochain::zero(space, flavor, raw.arity, parity)?;
    // canonical tuple -> (value as given, index of the first entry)
    let mut seen: BTreeMap<Vec<usize>, (Vector, usize)> = BTreeMap::new();
    for (n, e) in raw.entries.iter().enumerate() {
        let epath = format!("{path}.entries[{n}]");
        if e.args.len() != raw.arity {
            return Err(Error::Format(format!("{epath}.args: {} arguments for arity {}", e.args.len(), raw.arity)));
        }
        let args = e
            .args
            .iter()
            .enumerate()
            .map(|(k, a)| space.index_of(a).map_err(|err| at(&format!("{epath}.args[{k}]"), err)))
            .collect::<Result<Vec<_>>>()?;
        let value = vector(space, &e.value, field, &format!("{epath}.value"))?;
        let (key, sign) = match flavor {
            Flavor::Tensor => (args.clone(), Scalar::one()),
            Flavor::Exterior => match space.canonical_exterior(&args) {
                Some((k, neg)) => (k, Scalar::sign(neg)),
                None if value.is_zero() => continue,
                None => return Err(Error::Format(format!("{epath}: nonzero value on a repeated even argument"))),
            },
        };
        let folded = value.scaled(&sign);
        if let Some((prev, first)) = seen.get(&key) {
            if *prev != folded {
                return Err(Error::Format(format!("{epath}: inconsistent with entries[{first}] on the same tuple")));
            }
            continue;
        }
        c.add_entry(&args, &value).map_err(|err| at(&epath, err))?;
        seen.insert(key, (folded, n));
    }
    Ok(c)
}

pub fn cochain_to_raw(c: &Cochain) -> RawCochain {
    let space = c.space();
    RawCochain {
        arity: c.arity(),
        parity: Some(c.parity().value()),
        entries: c
            .entries()
            .map(|(args, v)| RawEntry { args: args.iter().map(|&i| space.name(i).to_string()).collect(), value: vector_to_raw(space, v) })
            .collect(),
    }
}

fn family(space: &Arc<GradedVectorSpace>, flavor: Flavor, raws: &[RawCochain], good: Parity, field: FieldConfig, path: &str) -> Result<Family> {
    let mut f = Family::zero(space, flavor, good);
    for (n, r) in raws.iter().enumerate() {
        let c = cochain(space, flavor, r, good, field, &format!("{path}[{n}]"))?;
        f.add_cochain(&c, &Scalar::one()).map_err(|e| at(&format!("{path}[{n}]"), e))?;
    }
    Ok(f)
}

pub fn family_to_raw(f: &Family) -> Vec<RawCochain> {
    f.components().filter(|c| !c.is_zero()).map(cochain_to_raw).collect()
}

fn coalgebra(raw: &RawCoalgebra, field: FieldConfig) -> Result<FilteredCoalgebra> {
    let path = "massey.coalgebra";
    match raw {
        RawCoalgebra::Lie { order } => build_f_lie(*order).map_err(|e| at(path, e)),
        RawCoalgebra::Restricted { order, cap } => build_f_restricted(*order, *cap).map_err(|e| at(path, e)),
        RawCoalgebra::Explicit { basis, pairing, delta, f0, f1 } => {
            let mut items = Vec::new();
            for (n, b) in basis.iter().enumerate() {
                let p = parity_of(b.internal, &format!("{path}.basis[{n}].internal"))?;
                items.push((b.name.clone(), Bidegree::new(p, b.external)));
            }
            let mut f = FilteredCoalgebra::new(items, *pairing).map_err(|e| at(&format!("{path}.basis"), e))?;
            for (n, t) in delta.iter().enumerate() {
                let tp = format!("{path}.delta[{n}]");
                let idx = |name: &str| f.index_of(name).map_err(|e| at(&tp, e));
                let (x, u, v) = (idx(&t.element)?, idx(&t.left)?, idx(&t.right)?);
                let c = parse_scalar(&t.coefficient, field, &format!("{tp}.coefficient"))?;
                f.add_delta_term(x, u, v, c)?;
            }
            let f1_set: Option<Vec<usize>> = match f1 {
                Some(names) => Some(names.iter().enumerate().map(|(n, s)| f.index_of(s).map_err(|e| at(&format!("{path}.f1[{n}]"), e))).collect::<Result<_>>()?),
                None => None,
            };
            let f0_set = f0.iter().enumerate().map(|(n, s)| f.index_of(s).map_err(|e| at(&format!("{path}.f0[{n}]"), e))).collect::<Result<Vec<_>>>()?;
            for x in 0..f.dim() {
                let in_f1 = f1_set.as_ref().is_none_or(|s| s.contains(&x));
                f.set_filtration(x, f0_set.contains(&x), in_f1);
            }
            Ok(f)
        }
    }
}

fn keyed_families(
    space: &Arc<GradedVectorSpace>,
    flavor: Flavor,
    f: &FilteredCoalgebra,
    raw: &BTreeMap<String, Vec<RawCochain>>,
    shift: Parity,
    field: FieldConfig,
    path: &str,
) -> Result<BTreeMap<usize, Family>> {
    let mut out = BTreeMap::new();
    for (name, cochains) in raw {
        let x = f.index_of(name).map_err(|e| at(path, e))?;
        let good = f.parity(x) + shift;
        out.insert(x, family(space, flavor, cochains, good, field, &format!("{path}.{name}"))?);
    }
    Ok(out)
}

fn base_algebra(raw: &RawBaseAlgebra, field: FieldConfig) -> Result<BaseAlgebra> {
    let path = "base.algebra";
    match raw {
        RawBaseAlgebra::Truncated { generators } => {
            let mut gens = Vec::new();
            for (n, g) in generators.iter().enumerate() {
                gens.push((g.name.as_str(), parity_of(g.parity, &format!("{path}.generators[{n}].parity"))?, g.exponent));
            }
            BaseAlgebra::truncated_polynomial(&gens).map_err(|e| at(path, e))
        }
        RawBaseAlgebra::Explicit { basis, products } => {
            let mut items = Vec::new();
            for (n, b) in basis.iter().enumerate() {
                items.push((b.name.clone(), parity_of(b.parity, &format!("{path}.basis[{n}].parity"))?));
            }
            let names: Vec<&str> = basis.iter().map(|b| b.name.as_str()).collect();
            let idx = |s: &str, p: &str| names.iter().position(|n| *n == s).ok_or_else(|| at(p, Error::UnknownName(s.to_string())));
            let mut table = Vec::new();
            for (n, pr) in products.iter().enumerate() {
                let pp = format!("{path}.products[{n}]");
                let mut v = Vector::zero();
                for (k, c) in &pr.value {
                    v.add_term(idx(k, &pp)?, &parse_scalar(c, field, &format!("{pp}.value.{k}"))?);
                }
                table.push(((idx(&pr.left, &pp)?, idx(&pr.right, &pp)?), v));
            }
            BaseAlgebra::new(items, table).map_err(|e| at(path, e))
        }
    }
}

/// Parses and validates a document.
pub fn parse_document(text: &str) -> Result<Document> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        if inner.is_syntax() || inner.is_eof() {
            Error::Format(format!("syntax error at line {} column {}: {inner}", inner.line(), inner.column()))
        } else {
            Error::Format(format!("schema violation at {}: {inner}", e.path()))
        }
    })?;
    build(raw)
}

/// Validates a raw document and normalizes it.
pub fn build(raw: RawDocument) -> Result<Document> {
    let field = match &raw.field {
        Some(s) => FieldConfig::parse(s).map_err(|e| at("field", e))?,
        None => FieldConfig::Rationals,
    };
    let mut basis = Vec::new();
    for (n, b) in raw.basis.iter().enumerate() {
        if raw.basis[..n].iter().any(|o| o.name == b.name) {
            return Err(Error::Format(format!("basis[{n}].name: duplicate basis name '{}'", b.name)));
        }
        basis.push((b.name.clone(), parity_of(b.parity, &format!("basis[{n}].parity"))?));
    }
    let space = Arc::new(GradedVectorSpace::new(basis)?);
    let needs_structure = raw.kind != Kind::Space;
    if needs_structure && raw.flavor.is_none() {
        return Err(Error::Format("flavor: required for this kind".into()));
    }
    let flavor = raw.flavor.unwrap_or(Flavor::Tensor);

    let structure = match &raw.structure {
        Some(s) => Some(StructureMap::new(family(&space, flavor, s, Parity::ODD, field, "structure")?)?),
        None if needs_structure => Some(StructureMap::zero(&space, flavor)),
        None => None,
    };
    let mut cochains = Vec::new();
    for (n, r) in raw.cochains.iter().enumerate() {
        let path = format!("cochains[{n}]");
        let p = r.parity.ok_or_else(|| Error::Format(format!("{path}.parity: required for free cochains")))?;
        let good = parity_of(p, &format!("{path}.parity"))? + Parity::of(r.arity as i64 - 1);
        cochains.push(cochain(&space, flavor, r, good, field, &path)?);
    }

    let deformation = match (&raw.deformation, raw.kind) {
        (Some(d), _) => {
            let g = family(&space, flavor, &d.gamma1, Parity::ODD, field, "deformation.gamma1")?;
            let b = family(&space, flavor, &d.beta1, Parity::EVEN, field, "deformation.beta1")?;
            Some(DeformationData { method: d.method, gamma1: g.components().cloned().collect(), beta1: b.components().cloned().collect() })
        }
        (None, Kind::Deformation) => return Err(Error::Format("deformation: required for kind \"deformation\"".into())),
        (None, _) => None,
    };

    let massey = match (&raw.massey, raw.kind) {
        (Some(m), _) => {
            let f = coalgebra(&m.coalgebra, field)?;
            let a = keyed_families(&space, flavor, &f, &m.a, Parity::ODD, field, "massey.a")?;
            let b = m.b.as_ref().map(|b| keyed_families(&space, flavor, &f, b, Parity::EVEN, field, "massey.b")).transpose()?;
            let alpha = m.alpha.as_ref().map(|al| keyed_families(&space, flavor, &f, al, Parity::ODD, field, "massey.alpha")).transpose()?;
            Some(MasseyData { coalgebra: f, a, b, alpha })
        }
        (None, Kind::Massey) => return Err(Error::Format("massey: required for kind \"massey\"".into())),
        (None, _) => None,
    };

    let base = match (&raw.base, raw.kind) {
        (Some(b), _) => {
            let s = Arc::new(base_algebra(&b.algebra, field)?);
            let mut alpha = BTreeMap::new();
            for (name, cs) in &b.alpha {
                let i = s.index_of(name).map_err(|e| at("base.alpha", e))?;
                alpha.insert(i, family(&space, flavor, cs, s.parity(i) + Parity::ODD, field, &format!("base.alpha.{name}"))?);
            }
            Some(BaseData { algebra: s, alpha })
        }
        (None, Kind::Base) => return Err(Error::Format("base: required for kind \"base\"".into())),
        (None, _) => None,
    };

    let normalized = normalize(&raw, field, &structure, &cochains, &deformation, &massey, &base);
    Ok(Document { raw: normalized, kind: raw.kind, field, space, structure, cochains, deformation, massey, base })
}

fn normalize(
    raw: &RawDocument,
    field: FieldConfig,
    structure: &Option<StructureMap>,
    cochains: &[Cochain],
    deformation: &Option<DeformationData>,
    massey: &Option<MasseyData>,
    base: &Option<BaseData>,
) -> RawDocument {
    let keyed = |f: &FilteredCoalgebra, m: &BTreeMap<usize, Family>| -> BTreeMap<String, Vec<RawCochain>> {
        m.iter().map(|(x, fam)| (f.name(*x).to_string(), family_to_raw(fam))).collect()
    };
    RawDocument {
        kind: raw.kind,
        field: Some(field.name()),
        arity_cap: raw.arity_cap,
        order: raw.order,
        basis: raw.basis.clone(),
        flavor: raw.flavor,
        structure: structure.as_ref().filter(|_| raw.structure.is_some()).map(|s| family_to_raw(s.family())),
        cochains: cochains.iter().map(cochain_to_raw).collect(),
        deformation: deformation.as_ref().map(|d| RawDeformation {
            method: d.method,
            gamma1: d.gamma1.iter().filter(|c| !c.is_zero()).map(cochain_to_raw).collect(),
            beta1: d.beta1.iter().filter(|c| !c.is_zero()).map(cochain_to_raw).collect(),
        }),
        massey: massey.as_ref().map(|m| RawMassey {
            coalgebra: raw.massey.as_ref().map(|r| r.coalgebra.clone()).expect("massey section present"),
            a: keyed(&m.coalgebra, &m.a),
            b: m.b.as_ref().map(|b| keyed(&m.coalgebra, b)),
            alpha: m.alpha.as_ref().map(|al| keyed(&m.coalgebra, al)),
        }),
        base: base.as_ref().map(|b| RawBase {
            algebra: raw.base.as_ref().map(|r| r.algebra.clone()).expect("base section present"),
            alpha: b.alpha.iter().map(|(i, fam)| (b.algebra.name(*i).to_string(), family_to_raw(fam))).collect(),
        }),
    }
}

/// Pretty JSON of the normalized document.
pub fn serialize_document(doc: &Document) -> String {
    serde_json::to_string_pretty(&doc.raw).expect("documents serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::check_structure_direct;

    #[test]
    fn minimal_space() {
        let d = parse_document(r#"{"kind": "space", "basis": [{"name": "x", "parity": 0}]}"#).unwrap();
        assert_eq!(d.space.dim(), 1);
        assert_eq!(d.space.parity(0), Parity::EVEN);
    }

    #[test]
    fn dual_numbers_load_and_pass() {
        let text = r#"{
            "kind": "structure", "flavor": "tensor",
            "basis": [{"name": "1", "parity": 0}, {"name": "x", "parity": 0}],
            "structure": [{"arity": 2, "entries": [
                {"args": ["1", "1"], "value": {"1": "1"}},
                {"args": ["1", "x"], "value": {"x": "1"}},
                {"args": ["x", "1"], "value": {"x": "1"}}
            ]}]
        }"#;
        let d = parse_document(text).unwrap();
        assert!(check_structure_direct(d.structure().unwrap(), 4).unwrap().holds());
    }

    #[test]
    fn duplicate_basis_names_are_rejected_with_a_path() {
        let e = parse_document(r#"{"kind": "space", "basis": [{"name": "x", "parity": 0}, {"name": "x", "parity": 1}]}"#).unwrap_err();
        assert!(e.to_string().contains("basis[1].name"), "{e}");
    }

    #[test]
    fn syntax_and_schema_errors() {
        let e = parse_document("{\"kind\": \"space\",\n \"basis\": [}").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = parse_document(r#"{"kind": "space", "basis": [{"name": "x", "parity": "even"}]}"#).unwrap_err();
        assert!(e.to_string().contains("basis[0].parity"), "{e}");
        let e = parse_document(r#"{"kind": "structure", "flavor": "exterior", "basis": [{"name": "x", "parity": 0}],
            "structure": [{"arity": 1, "entries": [{"args": ["z"], "value": {}}]}]}"#)
        .unwrap_err();
        assert!(e.to_string().contains("structure[0].entries[0].args[0]"), "{e}");
    }

    #[test]
    fn exterior_tuples_fold_signs() {
        let base = r#"{"kind": "structure", "flavor": "exterior",
            "basis": [{"name": "x", "parity": 0}, {"name": "y", "parity": 0}],
            "structure": [{"arity": 2, "entries": ENTRIES}]}"#;
        let load = |entries: &str| parse_document(&base.replace("ENTRIES", entries));
        let a = load(r#"[{"args": ["y", "x"], "value": {"y": "-1"}}]"#).unwrap();
        let b = load(r#"[{"args": ["x", "y"], "value": {"y": "1"}}]"#).unwrap();
        assert_eq!(a.structure, b.structure);
        assert!(load(r#"[{"args": ["x", "y"], "value": {"y": "1"}}, {"args": ["y", "x"], "value": {"y": "-1"}}]"#).is_ok());
        let e = load(r#"[{"args": ["x", "y"], "value": {"y": "1"}}, {"args": ["y", "x"], "value": {"y": "1"}}]"#).unwrap_err();
        assert!(e.to_string().contains("inconsistent"), "{e}");
    }

    #[test]
    fn prime_field_coerces_scalars() {
        let d = parse_document(r#"{"kind": "structure", "flavor": "exterior", "field": "fp:5",
            "basis": [{"name": "x", "parity": 0}, {"name": "y", "parity": 0}],
            "structure": [{"arity": 2, "entries": [{"args": ["x", "y"], "value": {"y": "1/2"}}]}]}"#)
        .unwrap();
        let s = serialize_document(&d);
        assert!(s.contains("\"3\""), "{s}");
        assert_eq!(parse_document(&s).unwrap(), d);
    }
}
