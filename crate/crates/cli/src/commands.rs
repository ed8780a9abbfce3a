use std::fmt::Write as _;
use std::time::Instant;

use serde_json::{json, Value};

use gadtparam_core::analyses::{
    check_free_theorem, check_graph_lemma, check_preservation, check_preservation_on, gmap_with, mappable_structural,
    sweep_candidates, CandidatePoly, FreeTheoremReport, GmapResult, GraphLemmaReport, Mappable, PreservationReport,
    SeqShape, Verdict,
};
use gadtparam_core::completion::complete_in;
use gadtparam_core::kernel::{all_tables, carrier, enumerate_values, Term, TypeExpr};
use gadtparam_core::parser::brief_term;
use gadtparam_core::lifting::{derive_rules, Judgment, LiftEngine, Mode, Outcome};
use gadtparam_core::relations::{eq_rel, Rel};
use gadtparam_core::report::{Report, ReportVerdict};

use crate::error::{CliError, EXIT_CAPS, EXIT_OK, EXIT_VIOLATED};
use crate::inputs::Inputs;

/// A finished command: the report, and its rendering for `--format text`.
pub struct Output {
    pub report: Report,
    pub text: String,
}

impl Output {
    fn new(report: Report, mut text: String, start: Instant) -> Output {
        let _ = writeln!(text, "verdict: {}", verdict_word(report.verdict));
        Output {
            report: report.timing("total", start.elapsed()),
            text,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.report.verdict {
            ReportVerdict::Pass | ReportVerdict::Answered | ReportVerdict::NotApplicable => EXIT_OK,
            ReportVerdict::Fail => EXIT_VIOLATED,
            ReportVerdict::Inconclusive => EXIT_CAPS,
        }
    }
}

pub fn verdict_word(v: ReportVerdict) -> &'static str {
    match v {
        ReportVerdict::Pass => "PASS",
        ReportVerdict::Fail => "FAIL",
        ReportVerdict::Inconclusive => "INCONCLUSIVE",
        ReportVerdict::NotApplicable => "NOT APPLICABLE",
        ReportVerdict::Answered => "ANSWERED",
    }
}

fn indent(text: &str, by: usize) -> String {
    let pad = " ".repeat(by);
    text.lines().map(|l| format!("{pad}{l}\n")).collect()
}

fn rel_names(rels: &[Rel]) -> String {
    rels.iter().map(|r| format!("({r})")).collect::<Vec<_>>().join(" ")
}

fn judgment_text(j: &Judgment, witness: bool, out: &mut String) {
    let answer = match &j.outcome {
        Outcome::Related(_) => "related".to_string(),
        Outcome::NotRelated => "not related".to_string(),
        Outcome::Inconclusive(m) => format!("inconclusive ({m})"),
    };
    let _ = writeln!(out, "{} lifting ({}) of {}", j.decl, j.mode, rel_names(&j.rels));
    let _ = writeln!(out, "  left:  {}", j.left);
    let _ = writeln!(out, "  right: {}", j.right);
    if let Some((a, b)) = &j.embedded {
        let _ = writeln!(out, "  embedded left:  {}", brief_term(a));
        let _ = writeln!(out, "  embedded right: {}", brief_term(b));
    }
    let _ = writeln!(out, "  {answer}");
    if witness {
        if let Some(d) = j.derivation() {
            out.push_str(&indent(&d.pretty(), 4));
        }
    }
}

fn outcome_verdict(o: &Outcome) -> ReportVerdict {
    match o {
        Outcome::Inconclusive(_) => ReportVerdict::Inconclusive,
        _ => ReportVerdict::Answered,
    }
}

pub fn check(inputs: &Inputs) -> Result<Output, CliError> {
    let start = Instant::now();
    let src = &inputs.source;
    let mut text = String::new();
    let mut decls = Vec::new();
    let mut report_witnesses = Vec::new();
    for d in &src.decls {
        let checked = inputs.env().require_decl(&d.name)?;
        let kind = if checked.is_adt() { "adt" } else { "gadt" };
        let _ = writeln!(text, "{d}\n-- {}: {}\n", d.name, kind.to_uppercase());
        decls.push(json!({
            "name": d.name,
            "arity": d.arity,
            "kind": kind,
            "ctors": d.ctors.iter().map(|c| c.name.clone()).collect::<Vec<_>>(),
        }));
        report_witnesses.push(json!({"decl": d.name, "source": d.to_string()}));
    }
    for (name, t) in &src.terms {
        let _ = writeln!(text, "term {name} = {t}");
    }
    for (name, f) in &src.funs {
        let _ = writeln!(text, "fun {name} = {f}");
    }
    for (name, r) in &src.rels {
        let _ = writeln!(text, "rel {name} = {r}");
    }
    let universe = json!({
        "file": src.path.display().to_string(),
        "decls": decls,
        "terms": src.terms.keys().collect::<Vec<_>>(),
        "funs": src.funs.keys().collect::<Vec<_>>(),
        "rels": src.rels.keys().collect::<Vec<_>>(),
    });
    let mut report = Report::new("check", Verdict::Pass, universe);
    for w in report_witnesses {
        report = report.witness(w);
    }
    Ok(Output::new(report, text, start))
}

pub fn complete(inputs: &Inputs, decl: &str) -> Result<Output, CliError> {
    let start = Instant::now();
    let (cd, _) = complete_in(inputs.env(), decl)?;
    let mut text = format!("{}\n", cd.completed.decl);
    for m in &cd.ctor_map {
        let how = if m.rewritten { "rewritten" } else { "copied" };
        let _ = writeln!(text, "-- {} ↦ {} ({how})", m.original, m.completed);
    }
    let report = Report::new("complete", ReportVerdict::Answered, json!({"decl": decl}))
        .witness(json!({
            "completed": cd.completed.decl.to_string(),
            "ctor_map": cd.ctor_map.iter().map(|m| json!({
                "original": m.original,
                "completed": m.completed,
                "rewritten": m.rewritten,
            })).collect::<Vec<_>>(),
        }));
    Ok(Output::new(report, text, start))
}

pub fn lift(
    inputs: &Inputs,
    decl: &str,
    mode: Mode,
    print_rules: bool,
    rels: &[Rel],
    depth: usize,
) -> Result<Output, CliError> {
    let start = Instant::now();
    let mut text = String::new();
    let mut report = Report::new(
        "lift",
        ReportVerdict::Answered,
        json!({"decl": decl, "mode": mode, "depth": depth}),
    );
    if print_rules || rels.is_empty() {
        let rules = derive_rules(decl, mode, inputs.env())?;
        let _ = writeln!(text, "{rules}");
        report = report.witness(json!({"rules": rules.to_json()}));
    }
    if !rels.is_empty() {
        let lifted = LiftEngine::new(inputs.env(), decl, mode)?.relation(rels, depth)?;
        let _ = writeln!(
            text,
            "{} lifting ({mode}) of {} at depth {depth}: {} pair(s)",
            decl,
            rel_names(rels),
            lifted.len()
        );
        for (a, b) in lifted.pairs() {
            let _ = writeln!(text, "  {a}  ~  {b}");
        }
        report = report.witness(json!({"relations": rels.iter().map(Rel::to_json).collect::<Vec<_>>(), "lifting": lifted.to_json()}));
    }
    Ok(Output::new(report, text, start))
}

pub fn relate(
    inputs: &Inputs,
    decl: &str,
    mode: Mode,
    rels: &[Rel],
    x: &Term,
    y: &Term,
    witness: bool,
) -> Result<Output, CliError> {
    let start = Instant::now();
    let j = LiftEngine::new(inputs.env(), decl, mode)?.check(rels, x, y)?;
    let mut text = String::new();
    judgment_text(&j, witness, &mut text);
    let report = Report::new(
        "relate",
        outcome_verdict(&j.outcome),
        json!({"decl": decl, "mode": mode}),
    )
    .witness(j.to_json());
    Ok(Output::new(report, text, start))
}

pub fn enumerate(inputs: &Inputs, decl: &str, index: &[TypeExpr], depth: usize) -> Result<Output, CliError> {
    let start = Instant::now();
    let checked = inputs.env().require_decl(decl)?;
    let values = enumerate_values(checked, index, depth, inputs.env())?;
    let instance = TypeExpr::app(decl, index.to_vec());
    let mut text = format!("{} value(s) of {instance} up to depth {depth}\n", values.len());
    for v in &values {
        let _ = writeln!(text, "  {v}");
    }
    let report = Report::new(
        "enumerate",
        ReportVerdict::Answered,
        json!({"decl": decl, "instance": instance.to_string(), "depth": depth, "count": values.len()}),
    )
    .witness(json!({"values": values.iter().map(Term::to_string).collect::<Vec<_>>()}));
    Ok(Output::new(report, text, start))
}

fn preservation_text(r: &PreservationReport, witness: bool, out: &mut String) {
    let _ = writeln!(out, "inclusion preservation of {} ({}) at depth {}", r.decl, r.mode, r.depth);
    for (a, b) in &r.type_pairs {
        let _ = writeln!(out, "  relations between {a} and {b}");
    }
    let _ = writeln!(out, "  liftings computed: {}", r.relations);
    let _ = writeln!(out, "  inclusions R ⊆ S covered: {}", r.inclusions);
    if let Some(m) = &r.inconclusive {
        let _ = writeln!(out, "  inconclusive: {m}");
    }
    if let Some(v) = &r.violation {
        let _ = writeln!(out, "violation:");
        let _ = writeln!(out, "  R = {}", v.smaller);
        let _ = writeln!(out, "  S = {}", v.larger);
        let _ = writeln!(out, "  x = {}", v.left);
        let _ = writeln!(out, "  y = {}", v.right);
        let _ = writeln!(out, "  (x, y) is in the lifting of R but not in the lifting of S");
        if witness {
            if let Some(d) = v.related.derivation() {
                let _ = writeln!(out, "  derivation for R:");
                out.push_str(&indent(&d.pretty(), 4));
            }
        }
    }
}

fn preservation_report(command: &str, r: &PreservationReport) -> Report {
    let mut report = Report::new(command, r.verdict, r.universe_json());
    if let Some(v) = &r.violation {
        report = report.witness(v.to_json());
    }
    if let Some(m) = &r.inconclusive {
        report = report.witness(json!({"inconclusive": m}));
    }
    report
}

pub fn preservation(
    inputs: &Inputs,
    decl: &str,
    mode: Mode,
    types: &[TypeExpr],
    rels: &[Rel],
    depth: usize,
    witness: bool,
) -> Result<Output, CliError> {
    let start = Instant::now();
    let r = match (types.is_empty(), rels.is_empty()) {
        (false, true) => check_preservation(decl, mode, types, depth, inputs.env())?,
        (true, false) => check_preservation_on(decl, mode, rels, depth, inputs.env())?,
        _ => return Err(CliError::Usage("give either --type or --rel".into())),
    };
    let mut text = String::new();
    preservation_text(&r, witness, &mut text);
    Ok(Output::new(preservation_report("preservation", &r), text, start))
}

fn gmap_text(f: &Term, x: &Term, g: &GmapResult, witness: bool, out: &mut String) {
    let _ = writeln!(out, "gmap ({f})");
    let _ = writeln!(out, "  on {x}");
    match g {
        GmapResult::Defined(j) => {
            let _ = writeln!(out, "  = {}", j.right);
            if witness {
                if let Some(d) = j.derivation() {
                    out.push_str(&indent(&d.pretty(), 4));
                }
            }
        }
        GmapResult::Undefined { candidates } => {
            let _ = writeln!(out, "  undefined ({candidates} candidate(s) of the same shape, none related)");
        }
        GmapResult::NonUnique(p) => {
            let _ = writeln!(out, "  not unique: {} and {}", p.0.right, p.1.right);
        }
        GmapResult::Inconclusive(m) => {
            let _ = writeln!(out, "  inconclusive: {m}");
        }
    }
}

pub fn gmap(inputs: &Inputs, decl: &str, f: &Term, x: &Term, witness: bool) -> Result<Output, CliError> {
    let start = Instant::now();
    let engine = LiftEngine::new(inputs.env(), decl, Mode::Completion)?;
    let g = gmap_with(&engine, f, x)?;
    let mut text = String::new();
    gmap_text(f, x, &g, witness, &mut text);
    let verdict = match g {
        GmapResult::Inconclusive(_) => ReportVerdict::Inconclusive,
        _ => ReportVerdict::Answered,
    };
    let report = Report::new(
        "gmap",
        verdict,
        json!({"decl": decl, "function": f.to_string(), "value": x.to_string()}),
    )
    .witness(g.to_json());
    Ok(Output::new(report, text, start))
}

pub fn mappable(inputs: &Inputs, decl: &str, f: &Term, x: &Term) -> Result<Output, CliError> {
    let start = Instant::now();
    let shape = SeqShape::in_env(inputs.env(), decl)?;
    let m = mappable_structural(&shape, f, x)?;
    let (text, w) = match &m {
        Mappable::Defined(y) => (format!("mappable: {y}\n"), json!({"result": "defined", "value": y.to_string()})),
        Mappable::NotMappable(why) => (
            format!("not mappable: {why}\n"),
            json!({"result": "not_mappable", "reason": why}),
        ),
    };
    let report = Report::new(
        "mappable",
        ReportVerdict::Answered,
        json!({"decl": decl, "function": f.to_string(), "value": x.to_string()}),
    )
    .witness(w);
    Ok(Output::new(report, text, start))
}

/// Values for the graph lemma: everything up to `depth` over the domain
/// of the functions, then the extra spot values.
pub fn graphlemma(
    inputs: &Inputs,
    decl: &str,
    functions: &[Term],
    depth: usize,
    spots: &[Term],
) -> Result<Output, CliError> {
    let start = Instant::now();
    let Some(Term::FinFun { dom, .. }) = functions.first() else {
        return Err(CliError::Usage("give at least one function".into()));
    };
    let checked = inputs.env().require_decl(decl)?;
    let mut values = enumerate_values(checked, std::slice::from_ref(dom), depth, inputs.env())?;
    for s in spots {
        if !values.contains(s) {
            values.push(s.clone());
        }
    }
    let r = check_graph_lemma(decl, functions, &values, inputs.env())?;
    let text = graphlemma_text(&r, functions.len(), values.len());
    let mut report = Report::new(
        "graphlemma",
        r.verdict,
        json!({
            "decl": decl,
            "functions": functions.len(),
            "values": values.len(),
            "depth": depth,
            "defined": r.defined(),
        }),
    );
    for row in r.failures() {
        report = report.witness(GraphLemmaReport::row_json(row));
    }
    Ok(Output::new(report, text, start))
}

fn graphlemma_text(r: &GraphLemmaReport, functions: usize, values: usize) -> String {
    let mut text = format!(
        "graph lemma for {}: {functions} function(s) × {values} value(s)\n  gmap defined on {} of {} pair(s)\n",
        r.decl,
        r.defined(),
        r.rows.len()
    );
    for row in r.failures() {
        let _ = writeln!(text, "failure:");
        gmap_text(&row.function, &row.value, &row.result, false, &mut text);
        if let Some(m) = &row.map_value {
            let _ = writeln!(text, "  map gives {m}");
        }
    }
    text
}

/// Every table `ty → ty`.
pub fn all_functions(inputs: &Inputs, ty: &TypeExpr) -> Result<Vec<Term>, CliError> {
    let values = carrier(ty, inputs.env())?;
    let count = (values.len() as f64).powi(values.len() as i32);
    if count > inputs.env().caps.max_rel_enum as f64 {
        return Err(CliError::Core(gadtparam_core::Error::Caps(format!(
            "more than {} functions on {ty}",
            inputs.env().caps.max_rel_enum
        ))));
    }
    Ok(all_tables(ty, ty, &values, &values))
}

fn free_theorem_text(r: &FreeTheoremReport, out: &mut String) {
    let _ = writeln!(out, "{}:", r.candidate.name);
    for ty in r.candidate.types() {
        if let Some(t) = r.candidate.table(ty) {
            let _ = writeln!(out, "  {t}");
        }
    }
    let _ = writeln!(out, "  judgments audited: {}", r.audited);
    if let Some(m) = &r.inconclusive {
        let _ = writeln!(out, "  inconclusive: {m}");
    }
    match &r.failure {
        Some(f) => {
            let _ = writeln!(out, "  not parametric: ({}, {}) ∈ {} but f a and f b are unrelated", f.a, f.b, f.rel);
        }
        None if r.inconclusive.is_none() => {
            let _ = writeln!(out, "  parametric on its universe");
        }
        None => {}
    }
    for (a, j, ok) in &r.conclusions {
        let mark = if *ok { "contains only" } else { "does NOT contain only" };
        let _ = writeln!(out, "  f {a} = {}  {mark} {a}", j.left);
    }
    let _ = writeln!(out, "  verdict: {}", verdict_word(r.verdict.into()));
}

pub fn freetheorem(inputs: &Inputs, decl: &str, name: &str, tables: &[Term]) -> Result<Output, CliError> {
    let start = Instant::now();
    let cand = CandidatePoly::new(name, decl, tables.to_vec(), inputs.env())?;
    let r = check_free_theorem(&cand, inputs.env())?;
    let mut text = String::new();
    free_theorem_text(&r, &mut text);
    let report = Report::new(
        "freetheorem",
        r.verdict,
        json!({"decl": decl, "types": cand.types().map(TypeExpr::to_string).collect::<Vec<_>>()}),
    )
    .witness(r.to_json());
    Ok(Output::new(report, text, start))
}

pub fn freetheorem_sweep(inputs: &Inputs, decl: &str, types: &[TypeExpr], depth: usize) -> Result<Output, CliError> {
    let start = Instant::now();
    let sweep = sweep_candidates(decl, types, depth, inputs.env())?;
    let mut text = format!(
        "{} candidate(s) with results of depth at most {depth}, {} parametric\n",
        sweep.reports.len(),
        sweep.parametric()
    );
    let mut report = Report::new(
        "freetheorem",
        sweep.verdict,
        json!({
            "decl": decl,
            "types": types.iter().map(TypeExpr::to_string).collect::<Vec<_>>(),
            "depth": depth,
            "candidates": sweep.reports.len(),
            "parametric": sweep.parametric(),
        }),
    );
    for r in &sweep.reports {
        if r.parametric() || r.verdict != Verdict::NotApplicable {
            free_theorem_text(r, &mut text);
            report = report.witness(r.to_json());
        }
    }
    Ok(Output::new(report, text, start))
}

pub const DEMO_SOURCE: &str = "data Seq : Set → Set where
  inj : ∀{α} → α → Seq α
  pairing : ∀{α₁ α₂} → Seq α₁ → Seq α₂ → Seq (α₁ × α₂)

rel S = rel (Bool*Bool) (Bool*Bool) { all except ((false,false),(true,true)) }
";

/// The naive lifting of `Seq` against its restricted lifting, on the
/// diagonal of `Bool × Bool` and the relation `S` of [`DEMO_SOURCE`].
pub fn demo_counterexample(inputs: &Inputs, witness: bool) -> Result<Output, CliError> {
    let start = Instant::now();
    let env = inputs.env();
    let bb = TypeExpr::prod(TypeExpr::Bool, TypeExpr::Bool);
    let rels = [eq_rel(&bb, env)?, inputs.source.rel("S")?.clone()];
    let naive = check_preservation_on("Seq", Mode::Naive, &rels, 2, env)?;
    let completion = check_preservation_on("Seq", Mode::Completion, &rels, 2, env)?;
    let mut text = String::from("== naive lifting ==\n");
    preservation_text(&naive, witness, &mut text);
    let _ = writeln!(text, "naive: {}\n", verdict_word(naive.verdict.into()));
    let _ = writeln!(text, "== restricted lifting through the completion ==");
    preservation_text(&completion, witness, &mut text);
    let _ = writeln!(text, "completion: {}", verdict_word(completion.verdict.into()));
    let verdict = if naive.verdict == Verdict::Fail && completion.verdict == Verdict::Pass {
        ReportVerdict::Fail
    } else if naive.verdict == Verdict::Inconclusive || completion.verdict == Verdict::Inconclusive {
        ReportVerdict::Inconclusive
    } else {
        // The contrast did not reproduce; report what was found.
        naive.verdict.into()
    };
    let sections: Vec<Value> = [&naive, &completion]
        .iter()
        .map(|r| {
            json!({
                "mode": r.mode,
                "verdict": ReportVerdict::from(r.verdict),
                "violation": r.violation.as_ref().map(|v| v.to_json()),
            })
        })
        .collect();
    let mut report = Report::new(
        "demo counterexample",
        verdict,
        json!({"naive": naive.universe_json(), "completion": completion.universe_json()}),
    );
    for s in sections {
        report = report.witness(s);
    }
    Ok(Output::new(report, text, start))
}
