//! The `infalg` command line.
//!
//! Every command prints a human-readable report, then the sentinel line
//! [`MACHINE_SENTINEL`], then a single JSON object. Exit codes: 0 when the
//! statement is verified or the solver succeeds, 1 when it is refuted or
//! obstructed, 2 on usage or input errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::base::verify_prop1;
use crate::bracket::{bracket_with, check_structure, differential_with, BracketKind};
use crate::coalgebra::{lie_e, lie_f, restricted_e, restricted_f};
use crate::cochain::{Cochain, Family, StructureMap};
use crate::cohomology::{cohomology, Slot};
use crate::deformation::{prolong_infinity, prolong_lie, prolong_restricted, DeformationSeries, Prolongation};
use crate::document::{self, cochain_to_raw, family_to_raw, Document, Method, RawCoalgebra, RawDocument};
use crate::error::{Error, Result};
use crate::graded::Parity;
use crate::massey::{alpha_from_series_lie, alpha_from_series_restricted, massey_verify, AlphaMap, Convention, MasseyProblem};
use crate::relations::check_structure_direct;
use crate::scalar::Scalar;

pub const MACHINE_SENTINEL: &str = "=== MACHINE REPORT ===";

#[derive(Debug, Parser)]
#[command(name = "infalg", version, about = "Exact checks and deformations of A∞ and L∞ algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Problem document (JSON).
    pub file: PathBuf,
    /// Largest arity considered; overrides the document.
    #[arg(long)]
    pub arity_cap: Option<usize>,
    /// Coefficient field, `q` or `fp:<p>`; overrides the document.
    #[arg(long)]
    pub field: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Product,
    Mc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Lie,
    Infinity,
    Restricted,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structure equation {d,d} = 0 with both checkers.
    Check(Common),
    /// Bracket of the document's two cochains, or δ of its single cochain.
    Bracket {
        #[command(flatten)]
        common: Common,
        /// Use the plain bracket instead of the modified one.
        #[arg(long)]
        plain: bool,
    },
    /// Cohomology of C(V) slot by slot.
    Cohomology {
        #[command(flatten)]
        common: Common,
        /// Internal parity of a single slot.
        #[arg(long, requires = "arity")]
        parity: Option<u8>,
        /// Arity of a single slot.
        #[arg(long, requires = "parity")]
        arity: Option<usize>,
    },
    /// Prolong a first-order deformation order by order.
    Deform {
        #[command(flatten)]
        common: Common,
        /// Highest order to solve for; defaults to the document or 3
        #[arg(long)]
        order: Option<usize>,
        /// Overrides the document's method.
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Verify a Massey F-product statement, solving for α when none is given.
    Massey {
        #[command(flatten)]
        common: Common,
        /// `product`: δα = μ(α⊗α)Δ; `mc`: δα + ½μ(α⊗α)Δ = 0
        #[arg(long, value_enum, default_value = "product")]
        convention: ConventionArg,
    },
    /// Check that α defines a deformation over the base, with the termwise identities.
    BaseVerify(Common),
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    human: String,
    machine: Value,
    code: i32,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome { code: 0, stdout: text, stderr: String::new() },
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let name = command_name(&cli.command);
    match dispatch(&cli.command) {
        Ok(r) => Outcome { code: r.code, stdout: render(&r.human, &r.machine), stderr: String::new() },
        Err(e) => {
            let machine = json!({ "command": name, "status": "error", "error": e.to_string() });
            Outcome { code: 2, stdout: render("", &machine), stderr: format!("error: {e}\n") }
        }
    }
}

fn render(human: &str, machine: &Value) -> String {
    let mut out = String::from(human);
    if !out.is_empty() && !out.ends_with('\n') {
        out.push('\n');
    }
    out.push_str(MACHINE_SENTINEL);
    out.push('\n');
    out.push_str(&serde_json::to_string_pretty(machine).expect("reports serialize"));
    out.push('\n');
    out
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check(_) => "check",
        Command::Bracket { .. } => "bracket",
        Command::Cohomology { .. } => "cohomology",
        Command::Deform { .. } => "deform",
        Command::Massey { .. } => "massey",
        Command::BaseVerify(_) => "base-verify",
    }
}

fn load(common: &Common) -> Result<(Document, usize)> {
    let text = std::fs::read_to_string(&common.file).map_err(|e| Error::Format(format!("cannot read {}: {e}", common.file.display())))?;
    let doc = load_text(&text, common.field.as_deref())?;
    let cap = common.arity_cap.or(doc.raw.arity_cap).unwrap_or(4);
    if cap == 0 {
        return Err(Error::Format("--arity-cap must be at least 1".into()));
    }
    Ok((doc, cap))
}

/// Parses a document, replacing its field when `field` is given.
pub fn load_text(text: &str, field: Option<&str>) -> Result<Document> {
    let doc = document::parse_document(text)?;
    match field {
        None => Ok(doc),
        Some(f) => {
            let raw: RawDocument = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
            document::build(RawDocument { field: Some(f.to_string()), ..raw })
        }
    }
}

fn dispatch(c: &Command) -> Result<Report> {
    match c {
        Command::Check(common) => {
            let (doc, cap) = load(common)?;
            check(&doc, cap)
        }
        Command::Bracket { common, plain } => {
            let (doc, cap) = load(common)?;
            bracket(&doc, cap, if *plain { BracketKind::Plain } else { BracketKind::Modified })
        }
        Command::Cohomology { common, parity, arity } => {
            let (doc, cap) = load(common)?;
            let slot = match (parity, arity) {
                (Some(p), Some(n)) if *p <= 1 => Some(Slot::new(Parity::of(*p as i64), *n)),
                (Some(p), Some(_)) => return Err(Error::Format(format!("--parity must be 0 or 1, got {p}"))),
                _ => None,
            };
            cohomology_report(&doc, cap, slot)
        }
        Command::Deform { common, order, method } => {
            let (doc, cap) = load(common)?;
            let order = order.or(doc.raw.order).unwrap_or(3);
            deform(&doc, cap, order, *method)
        }
        Command::Massey { common, convention } => {
            let (doc, cap) = load(common)?;
            let convention = match convention {
                ConventionArg::Product => Convention::Product,
                ConventionArg::Mc => Convention::Mc,
            };
            massey(&doc, cap, convention)
        }
        Command::BaseVerify(common) => {
            let (doc, cap) = load(common)?;
            base_verify(&doc, cap)
        }
    }
}

fn scalars(v: &[Scalar]) -> Vec<String> {
    v.iter().map(Scalar::to_string).collect()
}

fn check(doc: &Document, cap: usize) -> Result<Report> {
    let d = doc.structure()?;
    let direct = check_structure_direct(d, cap)?;
    let bracket = check_structure(d, cap)?;
    let in_char_2 = doc.field.characteristic() == 2;
    let agree = direct.agrees_with(&bracket);
    let holds = direct.holds();
    let mut human = String::new();
    writeln!(human, "{} structure on {} basis vectors, arity cap {cap}", d.flavor(), doc.space.dim()).ok();
    if holds {
        writeln!(human, "{{d,d}}=0 verified for n≤{cap}").ok();
    } else {
        let f = direct.first_failure().expect("a failing arity");
        let w = f.witness.as_ref().expect("a witness");
        let value = f.value.as_ref().map(|v| crate::cochain::format_vector(&doc.space, v)).unwrap_or_default();
        writeln!(human, "structure equation fails at arity {}: relation({}) = {value}", f.arity, crate::cochain::format_tuple(&doc.space, w)).ok();
    }
    if in_char_2 {
        writeln!(human, "characteristic 2: {{d,d}} is twice the relation, so only the direct check is used").ok();
    } else if !agree {
        writeln!(human, "warning: the bracket and direct checkers disagree").ok();
    }
    let witness = direct.first_failure().map(|f| {
        json!({
            "arity": f.arity,
            "args": f.witness.as_ref().map(|w| w.iter().map(|&i| doc.space.name(i).to_string()).collect::<Vec<_>>()),
        })
    });
    let machine = json!({
        "command": "check",
        "status": if holds { "verified" } else { "failed" },
        "arity_cap": cap,
        "holds": holds,
        "checkers_agree": in_char_2 || agree,
        "witness": witness,
        "verdicts": direct.verdicts.iter().map(|v| json!({"arity": v.arity, "holds": v.holds()})).collect::<Vec<_>>(),
    });
    Ok(Report { human, machine, code: if holds { 0 } else { 1 } })
}

fn bracket(doc: &Document, cap: usize, kind: BracketKind) -> Result<Report> {
    let mut human = String::new();
    let (label, result) = match doc.cochains.as_slice() {
        [a, b] => ("bracket", Family::from_cochain(bracket_with(a, b, kind)?)),
        [a] => ("differential", differential_with(doc.structure()?, &Family::from_cochain(a.clone()), cap, kind)?),
        other => return Err(Error::Format(format!("cochains: expected one or two cochains, got {}", other.len()))),
    };
    writeln!(human, "{label} ({}):", if kind == BracketKind::Plain { "plain" } else { "modified" }).ok();
    writeln!(human, "{result}").ok();
    let machine = json!({ "command": "bracket", "status": "ok", "operation": label, "result": family_to_raw(&result) });
    Ok(Report { human, machine, code: 0 })
}

fn require_structure(doc: &Document, cap: usize) -> Result<&StructureMap> {
    let d = doc.structure()?;
    if !check_structure_direct(d, cap)?.holds() {
        return Err(Error::InvalidStructure(format!("the structure equation fails below arity {}; run `check`", cap + 1)));
    }
    Ok(d)
}

fn cohomology_report(doc: &Document, cap: usize, only: Option<Slot>) -> Result<Report> {
    let d = require_structure(doc, cap)?;
    let slots: Vec<Slot> = match only {
        Some(s) => vec![s],
        None => (1..=cap).flat_map(|n| [Slot::new(Parity::EVEN, n), Slot::new(Parity::ODD, n)]).collect(),
    };
    let mut human = String::new();
    let mut rows = Vec::new();
    for s in slots {
        let h = cohomology(d, s, cap)?;
        let note = if h.boundary_unreliable { " (δ out of this slot is cut off by the cap)" } else { "" };
        writeln!(human, "H at {s}: dim {} = {} cocycles - {} coboundaries{note}", h.dim, h.cocycle_dim, h.coboundary_dim).ok();
        for r in &h.representatives {
            writeln!(human, "  {r}").ok();
        }
        rows.push(json!({
            "parity": s.parity.value(),
            "arity": s.arity,
            "dim": h.dim,
            "cocycle_dim": h.cocycle_dim,
            "coboundary_dim": h.coboundary_dim,
            "boundary_unreliable": h.boundary_unreliable,
            "representatives": h.representatives.iter().map(cochain_to_raw).collect::<Vec<_>>(),
        }));
    }
    Ok(Report { human, machine: json!({ "command": "cohomology", "status": "ok", "arity_cap": cap, "slots": rows }), code: 0 })
}

fn series_json(s: &DeformationSeries) -> Value {
    let orders: Vec<Value> = (1..=s.order)
        .map(|p| json!({ "order": p, "gamma": family_to_raw(&s.gamma[p]), "beta": family_to_raw(&s.beta[p]) }))
        .collect();
    json!({ "order": s.order, "arity_cap": s.arity_cap, "terms": orders })
}

fn prolongation_report(p: &Prolongation, human: &mut String) -> (Value, i32) {
    match p {
        Prolongation::Series(s) => {
            writeln!(human, "solved to order {}", s.order).ok();
            write!(human, "{s}").ok();
            (json!({ "status": "solved", "series": series_json(s) }), 0)
        }
        Prolongation::Obstructed(o) => {
            let at = o.bigrade.map(|(p, q)| format!(" at bigrade ({p},{q})")).unwrap_or_default();
            writeln!(human, "obstructed at order {} ({}){at}", o.order, o.target).ok();
            writeln!(human, "class coordinates: [{}]", scalars(&o.coordinates).join(", ")).ok();
            writeln!(human, "right-hand side: {}", o.rhs).ok();
            let obstruction = json!({
                "order": o.order,
                "target": o.target,
                "bigrade": o.bigrade,
                "coordinates": scalars(&o.coordinates),
                "representatives": o.representatives.iter().map(family_to_raw).collect::<Vec<_>>(),
                "rhs": family_to_raw(&o.rhs),
                "partial": series_json(&o.partial),
            });
            (json!({ "status": "obstructed", "obstruction": obstruction }), 1)
        }
    }
}

fn single(list: &[Cochain], arity: usize, what: &str, zero: impl FnOnce() -> Result<Cochain>) -> Result<Cochain> {
    match list {
        [] => zero(),
        [c] if c.arity() == arity => Ok(c.clone()),
        _ => Err(Error::Format(format!("deformation.{what}: the lie method takes one binary cochain"))),
    }
}

fn deform(doc: &Document, cap: usize, order: usize, method: Option<MethodArg>) -> Result<Report> {
    let d = doc.structure()?;
    let data = doc.deformation.as_ref().ok_or_else(|| Error::Missing("deformation".into()))?;
    let method = match method {
        Some(MethodArg::Lie) => Method::Lie,
        Some(MethodArg::Infinity) => Method::Infinity,
        Some(MethodArg::Restricted) => Method::Restricted,
        None => data.method,
    };
    if order == 0 {
        return Err(Error::Format("--order must be at least 1".into()));
    }
    let fam = |list: &[Cochain], good: Parity| Family::from_cochains(d.space(), d.flavor(), good, list.iter().cloned());
    let result = match method {
        Method::Lie => {
            let g = single(&data.gamma1, 2, "gamma1", || Cochain::zero(d.space(), d.flavor(), 2, Parity::EVEN))?;
            let b = single(&data.beta1, 2, "beta1", || Cochain::zero(d.space(), d.flavor(), 2, Parity::ODD))?;
            prolong_lie(d, &g, &b, order)?
        }
        Method::Infinity => prolong_infinity(d, &fam(&data.gamma1, Parity::ODD)?, &fam(&data.beta1, Parity::EVEN)?, order, cap)?,
        Method::Restricted => prolong_restricted(d, &data.gamma1, &data.beta1, order, cap)?,
    };
    let mut human = String::new();
    writeln!(human, "method {}, order {order}, arity cap {cap}", method_name(method)).ok();
    let (mut machine, code) = prolongation_report(&result, &mut human);
    machine["command"] = json!("deform");
    machine["method"] = json!(method_name(method));
    Ok(Report { human, machine, code })
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Lie => "lie",
        Method::Infinity => "infinity",
        Method::Restricted => "restricted",
    }
}

fn massey(doc: &Document, cap: usize, convention: Convention) -> Result<Report> {
    let d = doc.structure()?;
    let data = doc.massey.as_ref().ok_or_else(|| Error::Missing("massey".into()))?;
    let raw = &doc.raw.massey.as_ref().expect("massey section").coalgebra;
    let f = data.coalgebra.clone();
    let mut human = String::new();
    let mut extra = json!({});
    let alpha = match &data.alpha {
        Some(values) => {
            let mut alpha = AlphaMap::new();
            for (x, v) in values {
                alpha.set(&f, *x, v.clone())?;
            }
            alpha
        }
        None => {
            // the mc solution with data a is −2 times the product solution with data −½a
            let pre = match convention {
                Convention::Product => Scalar::one(),
                Convention::Mc => -Scalar::half(),
            };
            let a_of = |name: &str| -> Family {
                match f.index_of(name) {
                    Ok(x) => data.a.get(&x).map(|v| v.scaled(&pre)).unwrap_or_else(|| Family::zero(d.space(), d.flavor(), f.parity(x) + Parity::ODD)),
                    Err(_) => Family::zero(d.space(), d.flavor(), Parity::ODD),
                }
            };
            let (prolongation, build): (Prolongation, fn(&crate::coalgebra::FilteredCoalgebra, &DeformationSeries) -> Result<AlphaMap>) = match raw {
                RawCoalgebra::Lie { order } => (prolong_infinity(d, &a_of(&lie_e(1)), &a_of(&lie_f(1)), *order, cap)?, alpha_from_series_lie),
                RawCoalgebra::Restricted { order, cap: fcap } => {
                    let mut c = Vec::new();
                    let mut b = Vec::new();
                    for j in 1..=(*fcap as i64) {
                        c.extend(a_of(&restricted_e(1, j)).components().filter(|x| !x.is_zero()).cloned());
                        b.extend(a_of(&restricted_f(1, j)).components().filter(|x| !x.is_zero()).cloned());
                    }
                    (prolong_restricted(d, &c, &b, *order, (*fcap).min(cap))?, alpha_from_series_restricted)
                }
                RawCoalgebra::Explicit { .. } => return Err(Error::Missing("massey.alpha: required for an explicit coalgebra".into())),
            };
            writeln!(human, "no α given; solving the deformation problem").ok();
            let (solver, code) = prolongation_report(&prolongation, &mut human);
            extra = solver;
            let Prolongation::Series(s) = &prolongation else {
                let mut machine = extra;
                machine["command"] = json!("massey");
                machine["convention"] = json!(convention.to_string());
                return Ok(Report { human, machine, code });
            };
            let alpha = build(&f, s)?;
            match convention {
                Convention::Product => alpha,
                // α solves the product form, −2α the mc form
                Convention::Mc => alpha.scaled(&Scalar::from_i64(-2)),
            }
        }
    };
    let mut problem = MasseyProblem::new(f.clone(), d.clone(), cap);
    problem.a = data.a.clone();
    problem.b = data.b.clone();
    let verdict = massey_verify(&problem, &alpha, convention)?;
    writeln!(human, "{} ({convention} convention): {}", verdict.statement, if verdict.holds { "holds" } else { "fails" }).ok();
    for (what, fail) in [("equation", &verdict.first_residual_failure), ("a-diagram", &verdict.first_a_failure), ("b-diagram", &verdict.first_b_failure)] {
        if let Some(x) = fail {
            writeln!(human, "  {what} fails at {x}").ok();
        }
    }
    let alpha_json: BTreeMap<String, Value> = alpha.iter().map(|(x, v)| (f.name(x).to_string(), json!(family_to_raw(v)))).collect();
    let machine = json!({
        "command": "massey",
        "status": if verdict.holds { "verified" } else { "failed" },
        "convention": convention.to_string(),
        "verdict": verdict,
        "alpha": alpha_json,
        "solver": extra,
    });
    Ok(Report { human, machine, code: if verdict.holds { 0 } else { 1 } })
}

fn base_verify(doc: &Document, cap: usize) -> Result<Report> {
    let d = doc.structure()?;
    let data = doc.base.as_ref().ok_or_else(|| Error::Missing("base".into()))?;
    let s = &data.algebra;
    let mut alpha = AlphaMap::new();
    for i in 0..s.dim() {
        let v = data.alpha.get(&i).cloned().unwrap_or_else(|| Family::zero(d.space(), d.flavor(), s.parity(i) + Parity::ODD));
        alpha.set(s.dual(), i, v)?;
    }
    let r = verify_prop1(&alpha, d, s, cap)?;
    let deformation = r.structure_vanishes && r.mc_vanishes;
    let mut human = String::new();
    writeln!(human, "base {s}, arity cap {cap}").ok();
    writeln!(human, "termwise identities: {}", if r.holds() { "hold" } else { "FAIL" }).ok();
    if let Some(x) = &r.first_identity_failure {
        writeln!(human, "  first identity failure: {x}").ok();
    }
    writeln!(human, "τ is a codifferential: {}; α satisfies Maurer–Cartan: {}", r.structure_vanishes, r.mc_vanishes).ok();
    if let Some(x) = &r.first_mc_failure {
        writeln!(human, "  first nonzero slot: {x}").ok();
    }
    let ok = r.holds() && deformation;
    let machine = json!({ "command": "base-verify", "status": if ok { "verified" } else { "failed" }, "report": r });
    Ok(Report { human, machine, code: if ok { 0 } else { 1 } })
}
