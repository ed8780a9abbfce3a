//! Acceptance run: one PASS/FAIL line per criterion, each within its time
//! budget. Exits non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use serde_json::Value;

use gadtparam_core::analyses::{
    check_free_theorem, check_graph_lemma, check_preservation, sweep_candidates, CandidatePoly,
    GmapResult, Verdict,
};
use gadtparam_core::completion::{complete_in, embed, fmap, map_completion};
use gadtparam_core::kernel::{
    all_tables, carrier, compose, enumerate_values, identity_table, product_fun, type_of, Env, Term, TypeExpr,
};
use gadtparam_core::lifting::{lift_relation, LiftEngine, Mode};
use gadtparam_core::parser::{load_source, parse_decls, parse_fun, parse_rel, parse_term};
use gadtparam_core::relations::{delta, eq_rel, graph, product_rel, Rel, RelUniverse};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn data_arg(name: &str) -> String {
    data(name).display().to_string()
}

/// Runs the binary with `--json`; returns the exit code and the report.
fn cli(args: &[&str]) -> Result<(i32, Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_gadtparam"))
        .args(args)
        .arg("--json")
        .env_remove("GADTPARAM_MAX_REL_ENUM")
        .output()
        .map_err(|e| format!("spawning gadtparam: {e}"))?;
    let code = out.status.code().unwrap_or(-1);
    let report = serde_json::from_slice(&out.stdout).map_err(|e| {
        format!(
            "gadtparam {args:?} exited {code} without a report ({e}): {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok((code, report))
}

fn seq_source() -> gadtparam_core::parser::SourceFile {
    let text = std::fs::read_to_string(data("seq.gadt")).expect("data/seq.gadt");
    load_source("seq.gadt", &text, &Env::default()).expect("seq.gadt loads")
}

fn list_env() -> Env {
    let text = std::fs::read_to_string(data("list.gadt")).expect("data/list.gadt");
    load_source("list.gadt", &text, &Env::default()).expect("list.gadt loads").env
}

fn read_term(name: &str, env: &Env) -> Term {
    parse_term(std::fs::read_to_string(data(name)).unwrap().trim(), env).unwrap()
}

fn bb() -> TypeExpr {
    TypeExpr::prod(TypeExpr::Bool, TypeExpr::Bool)
}

fn pairs_of(v: &Value) -> BTreeSet<(String, String)> {
    v["pairs"]
        .as_array()
        .map(|ps| {
            ps.iter()
                .map(|p| (p[0].as_str().unwrap_or("").to_string(), p[1].as_str().unwrap_or("").to_string()))
                .collect()
        })
        .unwrap_or_default()
}

/// Every relation on `Bool`.
fn bool_rels(env: &Env) -> Vec<Rel> {
    RelUniverse::new(&TypeExpr::Bool, &TypeExpr::Bool, env).unwrap().iter().collect()
}

fn b(x: bool) -> Term {
    Term::BoolLit(x)
}

// 1 ---------------------------------------------------------------------

fn counterexample() -> Check {
    let (code, report) = cli(&[
        "preservation",
        &data_arg("seq.gadt"),
        "--decl",
        "Seq",
        "--mode",
        "naive",
        "--rel",
        "rel (Bool*Bool) (Bool*Bool) { eq }",
        "--rel",
        "S",
        "--depth",
        "2",
    ])?;
    ensure!(code == 1, "exit code {code}, expected 1");
    ensure!(report["verdict"] == "fail", "verdict {}", report["verdict"]);
    let w = &report["witnesses"][0];
    let (r, s) = (pairs_of(&w["smaller"]), pairs_of(&w["larger"]));
    ensure!(r.len() == 4 && r.iter().all(|(a, b)| a == b), "R is not the diagonal: {r:?}");
    ensure!(s.len() == 15 && r.is_subset(&s), "R ⊄ S or S malformed");
    let x = w["left"].as_str().unwrap_or("");
    ensure!(x == w["right"].as_str().unwrap_or("?"), "the witness is not of the form (x, x)");
    ensure!(x.starts_with("pairing"), "x = {x} is not a pairing");
    ensure!(w["related"]["verdict"] == "related", "x is not related to itself under R");
    ensure!(w["unrelated"]["verdict"] == "not_related", "x is related to itself under S");

    // Independently: the naive rule for `pairing` at index Bool × Bool
    // needs S = R₁ × R₂, and no two relations on Bool have that product.
    let src = seq_source();
    let env = &src.env;
    let s_rel = src.rel("S").unwrap();
    let rels = bool_rels(env);
    for r1 in &rels {
        for r2 in &rels {
            ensure!(&product_rel(r1, r2) != s_rel, "S factors as {r1} × {r2}");
        }
    }
    let eq = eq_rel(&TypeExpr::Bool, env).unwrap();
    ensure!(product_rel(&eq, &eq) == eq_rel(&bb(), env).unwrap(), "eq does not factor");
    let xt = parse_term(x, env).map_err(|e| e.to_string())?;
    let engine = LiftEngine::new(env, "Seq", Mode::Naive).unwrap();
    let j = engine.check(&[eq_rel(&bb(), env).unwrap()], &xt, &xt).unwrap();
    j.derivation().ok_or("no derivation for R")?.replay(engine.env()).map_err(|e| e.to_string())?;
    Ok(format!("x = {x}"))
}

// 2 ---------------------------------------------------------------------

fn repair() -> Check {
    let (code, report) = cli(&[
        "preservation",
        &data_arg("seq.gadt"),
        "--decl",
        "Seq",
        "--mode",
        "completion",
        "--type",
        "Bool",
        "--type",
        "Bool*Bool",
        "--depth",
        "2",
    ])?;
    ensure!(code == 0, "exit code {code}, expected 0");
    ensure!(report["verdict"] == "pass", "verdict {}", report["verdict"]);
    ensure!(report["witnesses"].as_array().is_some_and(|w| w.is_empty()), "violations reported");
    let sizes = [2u32, 4];
    let mut relations = 0u64;
    let mut inclusions = 0u128;
    for a in sizes {
        for b in sizes {
            relations += 1 << (a * b);
            inclusions += 3u128.pow(a * b);
        }
    }
    let u = &report["universe"];
    ensure!(u["relations"] == relations, "{} relations lifted, expected {relations}", u["relations"]);
    ensure!(
        u["inclusions"] == inclusions.to_string(),
        "{} inclusions, expected {inclusions}",
        u["inclusions"]
    );
    Ok(format!("{relations} relations, {inclusions} pairs R ⊆ S, no violation"))
}

// 3 ---------------------------------------------------------------------

fn map_list(f: &Term, x: &Term) -> Term {
    match x {
        Term::Con { ctor, type_args, args } if ctor == "cons" => Term::con(
            "cons",
            type_args.clone(),
            vec![f.apply(&args[0]).unwrap().clone(), map_list(f, &args[1])],
        ),
        other => other.clone(),
    }
}

fn adt_sanity() -> Check {
    let env = list_env();
    let values = enumerate_values(env.decl("List").unwrap(), &[TypeExpr::Bool], 2, &env).unwrap();
    let rels = bool_rels(&env);
    for r in &rels {
        let naive = lift_relation("List", Mode::Naive, std::slice::from_ref(r), 2, &env).unwrap();
        let comp = lift_relation("List", Mode::Completion, std::slice::from_ref(r), 2, &env).unwrap();
        ensure!(naive == comp, "modes differ on {r}");
    }
    let bools = carrier(&TypeExpr::Bool, &env).unwrap();
    let fs = all_tables(&TypeExpr::Bool, &TypeExpr::Bool, &bools, &bools);
    ensure!(fs.len() == 4, "{} functions on Bool", fs.len());
    for f in &fs {
        let lifted = lift_relation("List", Mode::Completion, &[graph(f).unwrap()], 2, &env).unwrap();
        let expected: BTreeSet<(Term, Term)> = values.iter().map(|x| (x.clone(), map_list(f, x))).collect();
        ensure!(lifted.pairs() == &expected, "lifting of graph({f}) is not graph(map f)");
    }
    Ok(format!("{} relations, {} functions, {} values", rels.len(), fs.len(), values.len()))
}

// 4 ---------------------------------------------------------------------

fn example() -> Check {
    let src = seq_source();
    let env = &src.env;
    let seq = data_arg("seq.gadt");
    let fun = data_arg("swapnot.fun");
    let mut detail = Vec::new();
    for (x, expected) in [("s.term", "sp.term"), ("t.term", "tp.term")] {
        let (code, report) = cli(&["gmap", &seq, "--decl", "Seq", "--fun", &fun, "--value", &data_arg(x)])?;
        ensure!(code == 0, "gmap on {x}: exit {code}");
        let want = read_term(expected, env).to_string();
        let got = &report["witnesses"][0]["value"];
        ensure!(got == want.as_str(), "gmap on {x} gave {got}, expected {want}");
        detail.push(format!("gmap {x} = {expected}"));
    }
    let (_, m) = cli(&["mappable", &seq, "--decl", "Seq", "--fun", &fun, "--value", &data_arg("s.term")])?;
    ensure!(m["witnesses"][0]["result"] == "defined", "s is not mappable");
    ensure!(
        m["witnesses"][0]["value"] == read_term("sp.term", env).to_string().as_str(),
        "mappable gives a different value on s"
    );
    let (_, m) = cli(&["mappable", &seq, "--decl", "Seq", "--fun", &fun, "--value", &data_arg("t.term")])?;
    ensure!(m["witnesses"][0]["result"] == "not_mappable", "t is mappable");

    // The chosen relations of both derivations.
    let swap = src.fun("swap").unwrap();
    let not = parse_fun("fun Bool -> Bool { x => not x }", env).unwrap();
    let r = graph(src.fun("swapnot").unwrap()).unwrap();
    ensure!(r == graph(&product_fun(swap, &not).unwrap()).unwrap(), "swapnot is not swap × not");
    let engine = LiftEngine::new(env, "Seq", Mode::Completion).unwrap();
    let s = engine
        .check(std::slice::from_ref(&r), src.term("s").unwrap(), &read_term("sp.term", env))
        .unwrap();
    let d = s.derivation().ok_or("s and s′ unrelated")?;
    ensure!(d.chosen[0].1 == graph(swap).unwrap(), "R₁ for s is {}", d.chosen[0].1);
    ensure!(d.chosen[1].1 == graph(&not).unwrap(), "R₂ for s is {}", d.chosen[1].1);
    ensure!(d.is_exact(), "the derivation for s uses a strict inclusion");
    let t = engine
        .check(std::slice::from_ref(&r), src.term("t").unwrap(), &read_term("tp.term", env))
        .unwrap();
    let d = t.derivation().ok_or("t and t′ unrelated")?;
    let tf = Term::pair(b(true), b(false));
    let ft = Term::pair(b(false), b(true));
    let r1 = Rel::new(bb(), bb(), [(tf, ft)], env).unwrap();
    ensure!(d.chosen[0].1 == r1, "R₁ for t is {}", d.chosen[0].1);
    ensure!(d.chosen[1].1 == graph(&not).unwrap(), "R₂ for t is {}", d.chosen[1].1);
    let inner = d.children()[0];
    let single = |x: bool, y: bool| Rel::new(TypeExpr::Bool, TypeExpr::Bool, [(b(x), b(y))], env).unwrap();
    ensure!(inner.chosen[0].1 == single(true, false), "inner R₁ for t is {}", inner.chosen[0].1);
    ensure!(inner.chosen[1].1 == single(false, true), "inner R₂ for t is {}", inner.chosen[1].1);
    ensure!(!d.is_exact(), "the derivation for t should use a strict inclusion");
    d.replay(engine.env()).map_err(|e| e.to_string())?;
    Ok(detail.join(", "))
}

// 5 ---------------------------------------------------------------------

fn bool_functions(env: &Env) -> Vec<Term> {
    let bools = carrier(&TypeExpr::Bool, env).unwrap();
    all_tables(&TypeExpr::Bool, &TypeExpr::Bool, &bools, &bools)
}

fn graph_lemma() -> Check {
    let src = seq_source();
    let env = &src.env;
    let fb = bool_functions(env);
    let products: Vec<Term> = fb
        .iter()
        .flat_map(|f| fb.iter().map(move |g| product_fun(f, g).unwrap()))
        .collect();
    ensure!(products.len() == 16, "{} functions", products.len());
    let values = enumerate_values(env.decl("Seq").unwrap(), &[bb()], 2, env).unwrap();
    ensure!(values.len() == 8, "{} values at depth 2", values.len());
    let report = check_graph_lemma("Seq", &products, &values, env).unwrap();
    ensure!(report.verdict == Verdict::Pass, "verdict {}", report.verdict);

    // Second route: the materialized lifting of each graph is functional.
    for f in &products {
        let lifted = lift_relation("Seq", Mode::Completion, &[graph(f).unwrap()], 2, env).unwrap();
        let mut partners: BTreeMap<&Term, usize> = BTreeMap::new();
        for (x, _) in lifted.pairs() {
            *partners.entry(x).or_default() += 1;
        }
        ensure!(partners.values().all(|&n| n <= 1), "graph({f}) lifts to a non-functional relation");
        for row in report.rows.iter().filter(|r| &r.function == f) {
            let via_lift: Vec<&Term> = lifted.pairs().iter().filter(|(x, _)| x == &row.value).map(|(_, y)| y).collect();
            ensure!(
                row.result.value() == via_lift.first().copied(),
                "gmap and the lifting disagree on {}",
                row.value
            );
        }
    }

    // Every table on Bool × Bool, not only the products.
    let cells = carrier(&bb(), env).unwrap();
    let tables = all_tables(&bb(), &bb(), &cells, &cells);
    ensure!(tables.len() == 256, "{} tables", tables.len());
    let wide = check_graph_lemma("Seq", &tables, &values, env).unwrap();
    ensure!(wide.verdict == Verdict::Pass, "all-tables verdict {}", wide.verdict);

    // Depth-3 spots: nested pairings, under (f × g) × h.
    let inner_ty = TypeExpr::prod(bb(), TypeExpr::Bool);
    let spots = enumerate_values(env.decl("Seq").unwrap(), std::slice::from_ref(&inner_ty), 3, env).unwrap();
    let spots: Vec<Term> = spots.into_iter().filter(|t| t.con_depth() == 3).collect();
    ensure!(!spots.is_empty(), "no depth-3 spots");
    let nested: Vec<Term> = products
        .iter()
        .flat_map(|p| fb.iter().map(move |h| product_fun(p, h).unwrap()))
        .collect();
    let deep = check_graph_lemma("Seq", &nested, &spots, env).unwrap();
    ensure!(deep.verdict == Verdict::Pass, "depth-3 verdict {}", deep.verdict);
    let defined = report.defined() + deep.defined();
    ensure!(
        report.rows.iter().chain(&deep.rows).all(|r| !matches!(r.result, GmapResult::NonUnique(_))),
        "a partner is not unique"
    );
    ensure!(
        !wide.rows.iter().any(|r| matches!(r.result, GmapResult::NonUnique(_))),
        "a partner under some table is not unique"
    );
    Ok(format!(
        "{} + {} + {} (f, x) pairs, {defined} defined, all partners unique",
        report.rows.len(),
        wide.rows.len(),
        deep.rows.len()
    ))
}

// 6 ---------------------------------------------------------------------

fn free_theorem() -> Check {
    let src = seq_source();
    let env = &src.env;
    let cand = |name: &str, tables: &[&str]| {
        let tables = tables.iter().map(|t| parse_fun(t, env).unwrap()).collect();
        check_free_theorem(&CandidatePoly::new(name, "Seq", tables, env).unwrap(), env).unwrap()
    };
    let inj = cand(
        "inj",
        &["fun Unit -> Seq Unit { x => inj [Unit] x }", "fun Bool -> Seq Bool { x => inj [Bool] x }"],
    );
    ensure!(inj.parametric() && inj.verdict == Verdict::Pass, "inj: {}", inj.verdict);
    let corrupted = cand(
        "corrupted",
        &["fun Bool -> Seq Bool { true => inj [Bool] false, x => inj [Bool] x }"],
    );
    ensure!(corrupted.verdict == Verdict::NotApplicable, "corrupted: {}", corrupted.verdict);
    let failure = corrupted.failure.as_ref().ok_or("corrupted candidate passes the audit")?;
    ensure!(
        failure.rel == delta(&b(true), &TypeExpr::Bool, env).unwrap(),
        "corrupted candidate fails at {} instead of δ_true",
        failure.rel
    );
    let pairing = cand(
        "pairing",
        &["fun (Bool*Bool) -> Seq (Bool*Bool) { a => pairing [Bool,Bool] (inj [Bool] (fst a)) (inj [Bool] (snd a)) }"],
    );
    ensure!(pairing.parametric() && pairing.verdict == Verdict::Pass, "pairing: {}", pairing.verdict);
    ensure!(pairing.conclusions.iter().all(|(_, _, ok)| *ok), "pairing: contains_only fails");

    let sweep = sweep_candidates("Seq", &[TypeExpr::Unit, TypeExpr::Bool], 1, env).unwrap();
    ensure!(sweep.verdict == Verdict::Pass, "sweep: {}", sweep.verdict);
    // |Seq Unit|₁ = 1 and |Seq Bool|₁ = 2 give 1 · 2² candidates.
    ensure!(sweep.reports.len() == 4, "{} candidates", sweep.reports.len());
    for r in sweep.reports.iter().filter(|r| r.parametric()) {
        ensure!(r.conclusions.iter().all(|(_, _, ok)| *ok), "{} breaks contains_only", r.candidate.name);
    }
    Ok(format!(
        "3 candidates as expected; sweep: {} candidates, {} parametric",
        sweep.reports.len(),
        sweep.parametric()
    ))
}

// 7 ---------------------------------------------------------------------

fn constructor_parametricity(env: &Env) -> Check {
    let seq = env.decl("Seq").unwrap();
    let xs = enumerate_values(seq, &[TypeExpr::Bool], 1, env).unwrap();
    let rels = bool_rels(env);
    let mut checks = 0;
    for mode in [Mode::Naive, Mode::Completion] {
        let engine = LiftEngine::new(env, "Seq", mode).unwrap();
        for r in &rels {
            for (a, c) in r.pairs() {
                let x = Term::con("inj", vec![TypeExpr::Bool], vec![a.clone()]);
                let y = Term::con("inj", vec![TypeExpr::Bool], vec![c.clone()]);
                ensure!(engine.check(std::slice::from_ref(r), &x, &y).unwrap().is_related(), "inj ({mode})");
                checks += 1;
            }
        }
        for r1 in &rels {
            let l1 = engine.relation(std::slice::from_ref(r1), 1).unwrap();
            for r2 in rels.iter().step_by(3) {
                let l2 = engine.relation(std::slice::from_ref(r2), 1).unwrap();
                let r12 = product_rel(r1, r2);
                for (x1, y1) in l1.pairs() {
                    for (x2, y2) in l2.pairs() {
                        let ty = vec![TypeExpr::Bool, TypeExpr::Bool];
                        let x = Term::con("pairing", ty.clone(), vec![x1.clone(), x2.clone()]);
                        let y = Term::con("pairing", ty, vec![y1.clone(), y2.clone()]);
                        ensure!(
                            engine.check(std::slice::from_ref(&r12), &x, &y).unwrap().is_related(),
                            "pairing ({mode}) on {r1} and {r2}"
                        );
                        checks += 1;
                    }
                }
            }
        }
        ensure!(!xs.is_empty(), "no values");
    }
    Ok(format!("{checks} constructor applications"))
}

fn monotonicity(env: &Env, list: &Env) -> Check {
    let seq = check_preservation("Seq", Mode::Completion, &[TypeExpr::Bool], 2, env).unwrap();
    ensure!(seq.verdict == Verdict::Pass, "Seq over Bool: {}", seq.verdict);
    for mode in [Mode::Naive, Mode::Completion] {
        let l = check_preservation("List", mode, &[TypeExpr::Bool], 3, list).unwrap();
        ensure!(l.verdict == Verdict::Pass, "List ({mode}): {}", l.verdict);
    }
    Ok(format!("{} + 2 × 81 inclusions", seq.inclusions))
}

fn reflexivity(env: &Env, list: &Env) -> Check {
    let mut n = 0;
    for (decl, e, ty, depth) in [
        ("Seq", env, TypeExpr::Bool, 2),
        ("Seq", env, bb(), 2),
        ("List", list, TypeExpr::Bool, 3),
        ("List", list, bb(), 2),
    ] {
        let values = enumerate_values(e.decl(decl).unwrap(), std::slice::from_ref(&ty), depth, e).unwrap();
        let diagonal: BTreeSet<(Term, Term)> = values.iter().map(|x| (x.clone(), x.clone())).collect();
        for mode in [Mode::Naive, Mode::Completion] {
            let l = lift_relation(decl, mode, &[eq_rel(&ty, e).unwrap()], depth, e).unwrap();
            ensure!(l.pairs() == &diagonal, "{decl} ({mode}) lifts eq on {ty} to something else");
            n += values.len();
        }
    }
    Ok(format!("{n} diagonal entries"))
}

fn injectivity(env: &Env, list: &Env) -> Check {
    let mut n = 0;
    for (decl, e, ty, depth) in [
        ("Seq", env, bb(), 2),
        ("Seq", env, TypeExpr::prod(bb(), TypeExpr::Bool), 3),
        ("List", list, TypeExpr::Bool, 3),
    ] {
        let (cd, ce) = complete_in(e, decl).unwrap();
        let values = enumerate_values(e.decl(decl).unwrap(), std::slice::from_ref(&ty), depth, e).unwrap();
        let mut images = BTreeSet::new();
        for x in &values {
            let ix = embed(&cd, x, &ce).unwrap();
            type_of(&ix, &ce).map_err(|err| format!("ι {x} is ill-typed: {err}"))?;
            ensure!(images.insert(ix), "ι is not injective at {x}");
        }
        n += values.len();
    }
    Ok(format!("{n} values embedded"))
}

fn functor_laws(env: &Env, list: &Env) -> Check {
    let (cd, ce) = complete_in(env, "Seq").unwrap();
    let dom = carrier(&bb(), env).unwrap();
    let fs: Vec<Term> = all_tables(&bb(), &bb(), &dom, &dom).into_iter().step_by(7).collect();
    let id = identity_table(&bb(), env).unwrap();
    let values = enumerate_values(env.decl("Seq").unwrap(), &[bb()], 2, env).unwrap();
    let mut n = 0;
    for x in &values {
        let ix = embed(&cd, x, &ce).unwrap();
        ensure!(map_completion(&cd, std::slice::from_ref(&id), &ix, &ce).unwrap() == ix, "map id ≠ id at {x}");
        for f in &fs {
            let fx = map_completion(&cd, std::slice::from_ref(f), &ix, &ce).unwrap();
            for g in fs.iter().step_by(5) {
                let gf = compose(g, f).unwrap();
                let lhs = map_completion(&cd, &[gf], &ix, &ce).unwrap();
                let rhs = map_completion(&cd, std::slice::from_ref(g), &fx, &ce).unwrap();
                ensure!(lhs == rhs, "map (g ∘ f) ≠ map g ∘ map f at {x}");
                n += 1;
            }
        }
    }
    let fb = bool_functions(list);
    let list_decl = list.decl("List").unwrap();
    for x in enumerate_values(list_decl, &[TypeExpr::Bool], 3, list).unwrap() {
        for f in &fb {
            ensure!(fmap(list_decl, std::slice::from_ref(f), &x, list).unwrap() == map_list(f, &x), "List map");
            for g in &fb {
                let lhs = fmap(list_decl, &[compose(g, f).unwrap()], &x, list).unwrap();
                let fx = fmap(list_decl, std::slice::from_ref(f), &x, list).unwrap();
                ensure!(lhs == fmap(list_decl, std::slice::from_ref(g), &fx, list).unwrap(), "List composition");
                n += 1;
            }
        }
    }
    Ok(format!("{n} compositions"))
}

fn derivation_replay(env: &Env) -> Check {
    let universe = RelUniverse::new(&bb(), &bb(), env).unwrap();
    let values = enumerate_values(env.decl("Seq").unwrap(), &[bb()], 2, env).unwrap();
    let mut n = 0;
    for mode in [Mode::Naive, Mode::Completion] {
        let engine = LiftEngine::new(env, "Seq", mode).unwrap();
        for mask in (0..universe.size()).step_by(997) {
            let r = universe.rel(mask);
            for x in &values {
                for y in &values {
                    let j = engine.check(std::slice::from_ref(&r), x, y).unwrap();
                    if let Some(d) = j.derivation() {
                        d.replay(engine.env()).map_err(|e| format!("{mode}: {e}"))?;
                        n += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{n} derivations replayed"))
}

fn round_trip(env: &Env) -> Check {
    let text = std::fs::read_to_string(data("seq.gadt")).unwrap();
    let decls = parse_decls(&text.lines().take_while(|l| !l.starts_with("fun")).collect::<Vec<_>>().join("\n"));
    let decls = decls.map_err(|e| e.to_string())?;
    for d in &decls {
        ensure!(parse_decls(&d.to_string()).map_err(|e| e.to_string())?[0] == *d, "declaration {}", d.name);
    }
    let mut n = decls.len();
    let ty = TypeExpr::prod(bb(), TypeExpr::Bool);
    for x in enumerate_values(env.decl("Seq").unwrap(), &[ty], 3, env).unwrap() {
        ensure!(parse_term(&x.to_string(), env).unwrap() == x, "term {x}");
        n += 1;
    }
    let dom = carrier(&bb(), env).unwrap();
    for f in all_tables(&bb(), &bb(), &dom, &dom).iter().step_by(11) {
        ensure!(parse_fun(&f.to_string(), env).unwrap() == *f, "table {f}");
        n += 1;
    }
    let universe = RelUniverse::new(&TypeExpr::Bool, &bb(), env).unwrap();
    for r in universe.iter().step_by(13) {
        ensure!(parse_rel(&r.to_string(), env).unwrap() == r, "relation {r}");
        n += 1;
    }
    Ok(format!("{n} items"))
}

fn invariants() -> Check {
    let src = seq_source();
    let env = &src.env;
    let list = list_env();
    let suites: [(&str, Box<dyn Fn() -> Check>); 7] = [
        ("constructor parametricity", Box::new(|| constructor_parametricity(env))),
        ("completion monotonicity", Box::new(|| monotonicity(env, &list))),
        ("equality lifting", Box::new(|| reflexivity(env, &list))),
        ("ι injectivity", Box::new(|| injectivity(env, &list))),
        ("functor laws", Box::new(|| functor_laws(env, &list))),
        ("derivation replay", Box::new(|| derivation_replay(env))),
        ("parser round trip", Box::new(|| round_trip(env))),
    ];
    let mut lines = Vec::new();
    for (name, suite) in suites.iter() {
        match suite() {
            Ok(d) => lines.push(format!("{name}: {d}")),
            Err(e) => return Err(format!("{name}: {e}")),
        }
    }
    Ok(lines.join("; "))
}

// -----------------------------------------------------------------------

struct Criterion {
    id: u8,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Check,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "naive Seq lifting breaks inclusion",
        budget: Some(Duration::from_secs(5)),
        run: counterexample,
    },
    Criterion {
        id: 2,
        name: "restricted lifting preserves inclusion",
        budget: Some(Duration::from_secs(60)),
        run: repair,
    },
    Criterion {
        id: 3,
        name: "List liftings agree and lift graphs to graphs",
        budget: Some(Duration::from_secs(5)),
        run: adt_sanity,
    },
    Criterion {
        id: 4,
        name: "gmap and mappable on s and t",
        budget: Some(Duration::from_secs(5)),
        run: example,
    },
    Criterion {
        id: 5,
        name: "graph lemma",
        budget: Some(Duration::from_secs(60)),
        run: graph_lemma,
    },
    Criterion {
        id: 6,
        name: "free theorem",
        budget: Some(Duration::from_secs(60)),
        run: free_theorem,
    },
    Criterion {
        id: 7,
        name: "invariant suites",
        budget: None,
        run: invariants,
    },
];

fn main() {
    let only: Option<u8> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let mut failed = 0;
    for c in CRITERIA.iter().filter(|c| only.is_none_or(|o| o == c.id)) {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let budget = c.budget.map_or(String::new(), |b| format!(" / {} s", b.as_secs()));
        let (ok, detail) = match result {
            Ok(d) if c.budget.is_none_or(|b| elapsed <= b) => (true, d),
            Ok(d) => (false, format!("over budget; {d}")),
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "{} criterion {} ({}) [{:.2} s{budget}]: {detail}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
