//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs without the libtest harness. The process fails when a criterion fails,
//! except for the ones listed in `KNOWN_FAILURES`, which are false as stated and
//! are reported as FAIL without failing the build.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::catalogue::{catalogue, named_space, table};
use common::instances::{base, bases, random_alpha, random_small_space, random_structure};
use common::{random_cochain, random_odd_map, random_space, rng, space};
use infalg::base::{reduced_composition, verify_prop1};
use infalg::bracket::{bracket, check_structure, differential_with, family_bracket, modified_bracket, BracketKind};
use infalg::coalgebra::{build_f_lie, build_f_restricted, dual_algebra, lie_e, lie_f, restricted_e, restricted_f, restricted_indices};
use infalg::cochain::{Cochain, Family, Flavor, StructureMap};
use infalg::cohomology::{cohomology, Slot};
use infalg::deformation::{prolong_infinity, prolong_lie, Prolongation};
use infalg::graded::{Pairing, Parity};
use infalg::massey::{alpha_from_series_lie, lie_problem, massey_verify, Convention};
use infalg::relations::check_structure_direct;
use infalg::scalar::Scalar;
use rand::Rng;
use serde_json::Value;

/// Criteria that do not hold as written; see the project notes.
const KNOWN_FAILURES: &[u32] = &[4];

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sign(p: Parity) -> Scalar {
    Scalar::sign(p.is_odd())
}

fn plus(a: &Cochain, b: &Cochain, c: &Scalar) -> Cochain {
    let mut out = a.clone();
    out.add_scaled(b, c).unwrap();
    out
}

fn flavors() -> [Flavor; 2] {
    [Flavor::Exterior, Flavor::Tensor]
}

fn bracket_laws() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1001);
    let (mut triples, mut nonzero) = (0, 0);
    for flavor in flavors() {
        for _ in 0..60 {
            let v = random_space(&mut r, 3);
            let one = |r: &mut _| {
                let k = Rng::gen_range(r, 1..=3);
                let p = Parity::of(Rng::gen_range(r, 0..2));
                random_cochain(r, &v, flavor, k, p, 0.7)
            };
            let (f, g, h) = (one(&mut r), one(&mut r), one(&mut r));
            for (kind, pairing) in [(BracketKind::Modified, Pairing::Good), (BracketKind::Plain, Pairing::Usual)] {
                let br = |a: &Cochain, b: &Cochain| if kind == BracketKind::Modified { modified_bracket(a, b).unwrap() } else { bracket(a, b).unwrap() };
                let s = sign(f.bidegree().pairing(g.bidegree(), pairing));
                ensure(br(&f, &g) == br(&g, &f).scaled(&-s.clone()), || format!("{kind:?} antisymmetry fails ({flavor})"))?;
                let lhs = br(&f, &br(&g, &h));
                ensure(lhs == plus(&br(&br(&f, &g), &h), &br(&g, &br(&f, &h)), &s), || format!("{kind:?} Jacobi fails ({flavor})"))?;
                nonzero += !lhs.is_zero() as usize;
            }
            triples += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    ensure(nonzero >= 40, || format!("only {nonzero} nonzero Jacobi samples"))?;
    Ok(format!("{triples} triples, {nonzero} nonzero double brackets, {:.1}s", elapsed.as_secs_f64()))
}

fn delta_squared() -> Outcome {
    let all = catalogue();
    ensure(all.len() >= 20, || format!("only {} structures", all.len()))?;
    let mut r = rng(1002);
    let mut checked = 0;
    for (name, d) in &all {
        ensure(check_structure_direct(d, 4).unwrap().holds(), || format!("{name} is not a structure"))?;
        for good in [Parity::EVEN, Parity::ODD] {
            let mut phi = Family::zero(d.space(), d.flavor(), good);
            for k in 1..=3 {
                phi.add_cochain(&random_cochain(&mut r, d.space(), d.flavor(), k, good + Parity::of(k as i64 - 1), 0.6), &Scalar::one()).unwrap();
            }
            let once = differential_with(d, &phi, 4, BracketKind::Modified).unwrap();
            let twice = differential_with(d, &once, 4, BracketKind::Modified).unwrap();
            ensure(twice.is_zero(), || format!("δ² ≠ 0 on {name}"))?;
            checked += 1;
        }
    }
    let cubic = &all.iter().find(|(n, _)| *n == "cubic l-infinity").ok_or("no l3 structure")?.1;
    ensure(cubic.component(3).is_some_and(|c| !c.is_zero()), || "l3 is zero".into())?;
    Ok(format!("{} structures incl. a restricted-solver l3, {checked} cochains, cap 4", all.len()))
}

fn checker_agreement() -> Outcome {
    let mut r = rng(1003);
    let mut pool: Vec<StructureMap> = catalogue().into_iter().map(|(_, d)| d).collect();
    for d in pool.clone() {
        let k = r.gen_range(1..=3);
        let mut fam = d.family().clone();
        fam.add_cochain(&random_cochain(&mut r, d.space(), d.flavor(), k, Parity::of(k as i64), 0.6), &Scalar::one()).unwrap();
        pool.push(StructureMap::new(fam).unwrap());
    }
    for n in 0..40 {
        let flavor = if n % 2 == 0 { Flavor::Exterior } else { Flavor::Tensor };
        let v = random_space(&mut r, 3);
        pool.push(random_odd_map(&mut r, &v, flavor, 3, 0.4));
    }
    let mut broken = 0;
    for d in &pool {
        let a = check_structure(d, 4).unwrap();
        let b = check_structure_direct(d, 4).unwrap();
        ensure(a.agrees_with(&b), || format!("verdicts differ: {a:?} vs {b:?}"))?;
        broken += !b.holds() as usize;
    }
    ensure(pool.len() >= 50 && broken > 0, || format!("{} structures, {broken} broken", pool.len()))?;
    Ok(format!("{} structures ({broken} broken), identical verdicts and witnesses", pool.len()))
}

fn sign_and_reduction() -> Outcome {
    let mut literal_failures = 0;
    for k in 1..=8usize {
        for l in 1..=8usize {
            let lhs = (k * l + (k + 1) * (l + 1) + (k - 1) * l) % 2;
            let rhs = ((l - 1) * k) % 2;
            literal_failures += (lhs != rhs) as usize;
        }
    }
    // the symmetric reduction {f,g} + {g,f} = 2(P(f/g) + P(g/f)) on good-odd cochains
    let mut r = rng(1004);
    let mut reductions = 0;
    for flavor in flavors() {
        for _ in 0..40 {
            let v = space(&[0, 1]);
            let (k, l) = (r.gen_range(1..=3), r.gen_range(1..=3));
            let f = random_cochain(&mut r, &v, flavor, k, Parity::of(k as i64), 0.7);
            let g = random_cochain(&mut r, &v, flavor, l, Parity::of(l as i64), 0.7);
            let p = plus(&reduced_composition(&f, &g).unwrap(), &reduced_composition(&g, &f).unwrap(), &Scalar::one());
            let lhs = plus(&modified_bracket(&f, &g).unwrap(), &modified_bracket(&g, &f).unwrap(), &Scalar::one());
            ensure(lhs == p.scaled(&Scalar::from_i64(2)), || format!("reduction fails at k={k}, l={l} ({flavor})"))?;
            reductions += 1;
        }
        let tau = random_odd_map(&mut r, &space(&[0, 1]), flavor, 3, 0.6);
        let square = family_bracket(tau.family(), tau.family(), 3, BracketKind::Modified).unwrap();
        for n in 1..=3 {
            let mut sum = Cochain::zero(tau.space(), flavor, n, Parity::of(n as i64 + 1)).unwrap();
            for k in 1..=n {
                if let (Some(a), Some(b)) = (tau.component(k), tau.component(n + 1 - k)) {
                    sum.add_scaled(&reduced_composition(a, b).unwrap(), &Scalar::one()).unwrap();
                }
            }
            ensure(square.component_or_zero(n) == sum.scaled(&Scalar::from_i64(2)), || format!("whole-map reduction fails at arity {n}"))?;
        }
    }
    ensure(literal_failures == 0, || {
        format!("sign identity false on {literal_failures}/64 pairs (exponents always differ by 1); reduction identity holds on {reductions} pairs")
    })?;
    Ok(format!("sign identity on 64 pairs; reduction on {reductions} pairs"))
}

fn coalgebras() -> Outcome {
    for n in 1..=6 {
        let f = build_f_lie(n).unwrap();
        ensure(f.check().holds(), || format!("F_lie({n}): {:?}", f.check().first()))?;
        for q in 2..=5 {
            let f = build_f_restricted(n, q).unwrap();
            ensure(f.check().holds(), || format!("F_restricted({n},{q}): {:?}", f.check().first()))?;
        }
    }
    let half = -Scalar::half();
    let f = build_f_lie(6).unwrap();
    let (g, rep) = dual_algebra(&f);
    ensure(rep.associative && rep.graded_commutative, || format!("{rep:?}"))?;
    let idx = |s: String| f.index_of(&s).unwrap();
    ensure(g.product(idx(lie_e(1)), idx(lie_e(1))) == [(idx(lie_e(2)), half.clone())].into(), || "e1 e1 ≠ -½ e2".into())?;
    ensure(g.product(idx(lie_f(1)), idx(lie_f(1))).is_empty(), || "f f ≠ 0".into())?;
    let f = build_f_restricted(3, 5).unwrap();
    let (g, _) = dual_algebra(&f);
    let mut pairs = 0;
    for &(_, k) in restricted_indices(3, 5).iter().filter(|ij| ij.0 == 1) {
        for &(_, l) in restricted_indices(3, 5).iter().filter(|ij| ij.0 == 1) {
            let prod = g.product(f.index_of(&restricted_e(1, k)).unwrap(), f.index_of(&restricted_e(1, l)).unwrap());
            let expected = f.index_of(&restricted_e(2, k + l - 2)).map(|t| [(t, half.clone())].into()).unwrap_or_default();
            ensure(prod == expected, || format!("e[1,{k}] e[1,{l}]"))?;
            let ff = g.product(f.index_of(&restricted_f(1, k)).unwrap(), f.index_of(&restricted_f(1, l)).unwrap());
            ensure(ff.is_empty(), || format!("f[1,{k}] f[1,{l}] ≠ 0"))?;
            pairs += 1;
        }
    }
    Ok(format!("N ≤ 6, Q ≤ 5 pass all four checks; dual tables match ({pairs} restricted pairs)"))
}

fn small_lie_algebras() -> Vec<StructureMap> {
    let ex = Flavor::Exterior;
    catalogue().into_iter().filter(|(_, d)| d.flavor() == ex && d.is_binary()).map(|(_, d)| d).collect()
}

fn massey_link() -> Outcome {
    let mut r = rng(1006);
    let mut solved = 0;
    for d in small_lie_algebras() {
        for _ in 0..3 {
            let cocycle = |r: &mut _, parity| {
                let h = cohomology(&d, Slot::new(parity, 2), 3).unwrap();
                let mut c = Cochain::zero(d.space(), d.flavor(), 2, parity).unwrap();
                for x in h.representatives.iter().chain(&h.coboundaries) {
                    c.add_scaled(x, &Scalar::from_i64(Rng::gen_range(r, -2..=2))).unwrap();
                }
                c
            };
            let (g1, b1) = (cocycle(&mut r, Parity::EVEN), cocycle(&mut r, Parity::ODD));
            let Prolongation::Series(s) = prolong_lie(&d, &g1, &b1, 3).unwrap() else { continue };
            let f = build_f_lie(3).unwrap();
            let alpha = alpha_from_series_lie(&f, &s).unwrap();
            let problem = lie_problem(f, &d, &s.gamma[1], &s.beta[1], 3).unwrap();
            let v = massey_verify(&problem, &alpha, Convention::Product).unwrap();
            ensure(v.holds, || format!("product convention fails: {v:?}"))?;
            let mc = alpha.scaled(&Scalar::from_i64(-2));
            ensure(massey_verify(&problem, &mc, Convention::Mc).unwrap().residual_ok, || "−2α misses the mc equation".into())?;
            ensure(massey_verify(&problem, &mc.scaled(&-Scalar::half()), Convention::Product).unwrap().residual_ok, || "−½ scaling fails".into())?;
            let inf = prolong_infinity(&d, &Family::from_cochain(g1), &Family::from_cochain(b1), 3, 3).unwrap();
            ensure(inf.series().is_some(), || "infinity solver obstructed where the Lie solver is not".into())?;
            solved += 1;
        }
    }
    ensure(solved >= 10, || format!("only {solved} solvable instances"))?;
    Ok(format!("{solved} solvable instances; product-convention α verified; −½ scaling verified"))
}

fn mc_identity() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1007);
    let mut summary = Vec::new();
    let mut list = bases();
    list.push(base(&[("t", Parity::EVEN, 2), ("h", Parity::ODD, 1)]));
    for flavor in flavors() {
        let (mut n, mut nonzero) = (0, 0);
        for i in 0..120 {
            let s = &list[i % list.len()];
            let v = random_small_space(&mut r);
            let d = random_structure(&mut r, &v, flavor);
            let alpha = random_alpha(&mut r, &v, flavor, s, if i % 4 == 0 { 0.0 } else { 0.5 });
            let rep = verify_prop1(&alpha, &d, s, 3).unwrap();
            ensure(rep.holds(), || {
                format!("{flavor} over {s}: identity fails at {:?} (structure {:?}, mc {:?})", rep.first_identity_failure, rep.first_structure_failure, rep.first_mc_failure)
            })?;
            nonzero += !rep.mc_vanishes as usize;
            n += 1;
        }
        summary.push(format!("{flavor}: {n} instances, {nonzero} nonzero"));
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || format!("took {elapsed:?}"))?;
    Ok(format!("{}; MC identity carries (-1)^m_i; {:.1}s", summary.join(", "), elapsed.as_secs_f64()))
}

fn cli(args: &[&str], doc: &str) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("problem.json");
    std::fs::write(&path, doc).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_infalg")).args(args).arg(&path).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let machine = text.split_once(infalg::cli::MACHINE_SENTINEL).map(|(_, j)| serde_json::from_str(j).unwrap()).unwrap_or(Value::Null);
    (out.status.code().unwrap(), machine)
}

fn end_to_end() -> Outcome {
    let abelian = r#"{"kind": "deformation", "flavor": "exterior",
        "basis": [{"name": "x", "parity": 0}, {"name": "y", "parity": 0}],
        "deformation": {"method": "infinity", "gamma1": [{"arity": 2, "entries": [{"args": ["x", "y"], "value": {"y": "1"}}]}]}}"#;
    let (code, m) = cli(&["deform", "--order", "3", "--arity-cap", "4"], abelian);
    ensure(code == 0, || format!("abelian deform exited {code}"))?;
    let terms = m["series"]["terms"].as_array().ok_or("no series")?;
    ensure(terms.len() == 3 && terms[1..].iter().all(|t| t["gamma"].as_array().is_some_and(Vec::is_empty)), || "γ≥2 ≠ 0".into())?;

    // δ = 0 on the 3-dim abelian algebra, so im δ = 0 and {γ1,γ1} ≠ 0 is a nonzero class
    let obstructed = r#"{"kind": "deformation", "flavor": "exterior",
        "basis": [{"name": "x", "parity": 0}, {"name": "y", "parity": 0}, {"name": "z", "parity": 0}],
        "deformation": {"method": "lie", "gamma1": [{"arity": 2, "entries": [
            {"args": ["x", "y"], "value": {"x": "1"}}, {"args": ["y", "z"], "value": {"y": "1"}}, {"args": ["x", "z"], "value": {"z": "1"}}]}]}}"#;
    let (code, m) = cli(&["deform", "--order", "3"], obstructed);
    ensure(code == 1 && m["status"] == "obstructed", || format!("obstructed deform exited {code}"))?;
    let o = &m["obstruction"];
    let coords: Vec<Scalar> = o["coordinates"].as_array().ok_or("no coordinates")?.iter().map(|c| c.as_str().unwrap().parse().unwrap()).collect();
    // brute force: the unique small combination of the slot basis matching -½{γ1,γ1}
    let v = named_space(&[("x", 0), ("y", 0), ("z", 0)]);
    let g1 = table(&v, Flavor::Exterior, 2, Parity::EVEN, &[(&[0, 1], &[(0, 1)]), (&[1, 2], &[(1, 1)]), (&[0, 2], &[(2, 1)])]);
    let target = modified_bracket(&g1, &g1).unwrap().scaled(&-Scalar::half());
    let h = cohomology(&StructureMap::zero(&v, Flavor::Exterior), Slot::new(Parity::EVEN, 3), 4).unwrap();
    ensure(h.dim == h.representatives.len() && h.coboundary_dim == 0, || "im δ is not zero".into())?;
    let mut matches = Vec::new();
    let dim = h.representatives.len();
    let range: Vec<i64> = (-2..=2).collect();
    let mut idx = vec![0usize; dim];
    loop {
        let mut c = Cochain::zero(&v, Flavor::Exterior, 3, Parity::EVEN).unwrap();
        for (k, rep) in h.representatives.iter().enumerate() {
            c.add_scaled(rep, &Scalar::from_i64(range[idx[k]])).unwrap();
        }
        if c == target {
            matches.push(idx.iter().map(|&i| Scalar::from_i64(range[i])).collect::<Vec<_>>());
        }
        let Some(pos) = idx.iter().position(|&i| i + 1 < range.len()) else { break };
        for i in idx.iter_mut().take(pos) {
            *i = 0;
        }
        idx[pos] += 1;
    }
    ensure(matches == vec![coords.clone()], || format!("coordinates {coords:?}, brute force {matches:?}"))?;

    let (code, _) = cli(&["deform", "--order", "0"], abelian);
    ensure(code == 2, || format!("usage error exited {code}"))?;
    let (code, m) = cli(&["check"], "{ not json");
    ensure(code == 2 && m["status"] == "error", || format!("format error exited {code}"))?;
    Ok(format!("abelian series γ≥2 = 0; obstruction class [{}] matches brute force; exit codes 0/1/2", coords.iter().map(Scalar::to_string).collect::<Vec<_>>().join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "bracket laws", bracket_laws),
        (2, "δ² = 0", delta_squared),
        (3, "checker equivalence", checker_agreement),
        (4, "sign and reduction identities", sign_and_reduction),
        (5, "coalgebra constants", coalgebras),
        (6, "deformation–Massey link", massey_link),
        (7, "base MC identity termwise", mc_identity),
        (8, "end-to-end CLI", end_to_end),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut unexpected = Vec::new();
    for (n, name, f) in criteria {
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => {
                println!("criterion {n} ({name}): PASS: {detail}");
                if KNOWN_FAILURES.contains(&n) {
                    println!("  note: criterion {n} is listed as a known failure but passed");
                }
            }
            Err(why) => {
                let known = KNOWN_FAILURES.contains(&n);
                println!("criterion {n} ({name}): FAIL{}: {why}", if known { " (known)" } else { "" });
                if !known {
                    unexpected.push(n);
                }
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
