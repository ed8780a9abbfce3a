use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::sequences::{contains_only, SeqShape};
use super::Verdict;
use crate::error::{Error, Result};
use crate::kernel::{all_tables, carrier, enumerate_values, type_of, Env, Term, TypeExpr};
use crate::lifting::{self, Judgment, LiftEngine, Mode, Outcome};
use crate::relations::{delta, Rel, RelUniverse};

/// A finite stand-in for `f : ∀α. α → Seq α`: one total table
/// `A → Seq A` per type `A` of its universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidatePoly {
    pub name: String,
    pub decl: String,
    tables: Vec<(TypeExpr, Term)>,
}

impl CandidatePoly {
    pub fn new(name: impl Into<String>, decl: &str, tables: Vec<Term>, env: &Env) -> Result<CandidatePoly> {
        let mut out: Vec<(TypeExpr, Term)> = Vec::new();
        for t in tables {
            type_of(&t, env)?;
            let Term::FinFun { dom, cod, .. } = &t else {
                return Err(Error::ty(format!("{t} is not a function table")));
            };
            if cod != &TypeExpr::app(decl, vec![dom.clone()]) {
                return Err(Error::ty(format!("table over {dom} returns {cod}, expected {decl} {dom}")));
            }
            if out.iter().any(|(a, _)| a == dom) {
                return Err(Error::ty(format!("two tables over {dom}")));
            }
            out.push((dom.clone(), t.clone()));
        }
        Ok(CandidatePoly {
            name: name.into(),
            decl: decl.to_string(),
            tables: out,
        })
    }

    pub fn types(&self) -> impl Iterator<Item = &TypeExpr> {
        self.tables.iter().map(|(a, _)| a)
    }

    pub fn table(&self, ty: &TypeExpr) -> Option<&Term> {
        self.tables.iter().find(|(a, _)| a == ty).map(|(_, t)| t)
    }

    fn at(&self, ty: &TypeExpr, a: &Term) -> &Term {
        self.table(ty)
            .and_then(|t| t.apply(a))
            .expect("tables are total on their universe")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "tables": self.tables.iter().map(|(a, t)| json!({"type": a.to_string(), "table": t.to_string()})).collect::<Vec<_>>(),
        })
    }
}

/// `(a, b) ∈ R` while `f a` and `f b` are not related by `Seq R`.
#[derive(Clone, Debug)]
pub struct PhaseOneFailure {
    pub rel: Rel,
    pub a: Term,
    pub b: Term,
    pub judgment: Judgment,
}

#[derive(Clone, Debug)]
pub struct FreeTheoremReport {
    pub candidate: CandidatePoly,
    /// Judgments checked in the parametricity audit.
    pub audited: u64,
    pub failure: Option<PhaseOneFailure>,
    /// For each `a`, the judgment `Seq δ_a (f a) (f a)` and whether `f a`
    /// contains only `a`.
    pub conclusions: Vec<(Term, Judgment, bool)>,
    pub verdict: Verdict,
    pub inconclusive: Option<String>,
    pub elapsed: Duration,
}

impl FreeTheoremReport {
    pub fn parametric(&self) -> bool {
        self.failure.is_none() && self.inconclusive.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "candidate": self.candidate.to_json(),
            "audited": self.audited,
            "parametric": self.parametric(),
            "phase_one_failure": self.failure.as_ref().map(|f| json!({
                "relation": f.rel.to_json(),
                "a": f.a.to_string(),
                "b": f.b.to_string(),
                "judgment": f.judgment.to_json(),
            })),
            "conclusions": self.conclusions.iter().map(|(a, j, ok)| json!({
                "a": a.to_string(),
                "value": j.left.to_string(),
                "delta_instance": j.to_json(),
                "contains_only": ok,
            })).collect::<Vec<_>>(),
            "inconclusive": self.inconclusive,
        })
    }
}

enum Audit {
    Holds,
    Fails(PhaseOneFailure),
    Inconclusive(String),
}

struct Prepared<'c> {
    cand: &'c CandidatePoly,
    values: BTreeMap<Term, lifting::Prepared>,
}

impl Prepared<'_> {
    fn new<'c>(engine: &LiftEngine, cand: &'c CandidatePoly, env: &Env) -> Result<Prepared<'c>> {
        let mut values = BTreeMap::new();
        for a in cand.types() {
            for x in carrier(a, env)? {
                let fx = cand.at(a, &x);
                values.insert(fx.clone(), engine.prepare(fx)?);
            }
        }
        Ok(Prepared { cand, values })
    }
}

fn audit(engine: &LiftEngine, prep: &Prepared<'_>, rel: &Rel, audited: &mut u64) -> Result<Audit> {
    let cand = prep.cand;
    for (a, b) in rel.pairs() {
        let (x, y) = (cand.at(rel.src(), a), cand.at(rel.tgt(), b));
        *audited += 1;
        match engine.decide_prepared(std::slice::from_ref(rel), &prep.values[x], &prep.values[y])? {
            Outcome::Related(_) => {}
            Outcome::NotRelated => {
                return Ok(Audit::Fails(PhaseOneFailure {
                    rel: rel.clone(),
                    a: a.clone(),
                    b: b.clone(),
                    judgment: engine.check(std::slice::from_ref(rel), x, y)?,
                }))
            }
            Outcome::Inconclusive(m) => return Ok(Audit::Inconclusive(m)),
        }
    }
    Ok(Audit::Holds)
}

/// Phase 1 audits `Seq R (f a) (f b)` for every `(a, b) ∈ R` and every
/// relation between types of the universe, the singletons `δ_a` first.
/// Phase 2, run only for candidates passing phase 1, checks that `f a`
/// contains only `a`.
pub fn check_free_theorem(cand: &CandidatePoly, env: &Env) -> Result<FreeTheoremReport> {
    let start = Instant::now();
    let shape = SeqShape::in_env(env, &cand.decl)?;
    let engine = LiftEngine::new(env, &cand.decl, Mode::Completion)?;
    let types: Vec<TypeExpr> = cand.types().cloned().collect();
    let prep = Prepared::new(&engine, cand, env)?;
    let mut report = FreeTheoremReport {
        candidate: cand.clone(),
        audited: 0,
        failure: None,
        conclusions: Vec::new(),
        verdict: Verdict::Pass,
        inconclusive: None,
        elapsed: Duration::ZERO,
    };
    let mut relations: Vec<Rel> = Vec::new();
    for a in &types {
        for x in carrier(a, env)? {
            relations.push(delta(&x, a, env)?);
        }
    }
    'audit: for rel in relations {
        match audit(&engine, &prep, &rel, &mut report.audited)? {
            Audit::Holds => {}
            Audit::Fails(f) => {
                report.failure = Some(f);
                break 'audit;
            }
            Audit::Inconclusive(m) => {
                report.inconclusive = Some(m);
                break 'audit;
            }
        }
    }
    if report.parametric() {
        'full: for a in &types {
            for b in &types {
                let universe = match RelUniverse::new(a, b, env) {
                    Ok(u) => u,
                    Err(Error::Caps(m)) => {
                        report.inconclusive = Some(m);
                        break 'full;
                    }
                    Err(e) => return Err(e),
                };
                for rel in universe.iter() {
                    match audit(&engine, &prep, &rel, &mut report.audited)? {
                        Audit::Holds => {}
                        Audit::Fails(f) => {
                            report.failure = Some(f);
                            break 'full;
                        }
                        Audit::Inconclusive(m) => {
                            report.inconclusive = Some(m);
                            break 'full;
                        }
                    }
                }
            }
        }
    }
    if report.inconclusive.is_some() {
        report.verdict = Verdict::Inconclusive;
    } else if report.failure.is_some() {
        report.verdict = Verdict::NotApplicable;
    } else {
        for a in &types {
            for x in carrier(a, env)? {
                let fx = cand.at(a, &x);
                let d = delta(&x, a, env)?;
                let j = engine.check(&[d], fx, fx)?;
                let ok = contains_only(&shape, &x, fx);
                report.conclusions.push((x, j, ok));
            }
        }
        if report.conclusions.iter().any(|(_, _, ok)| !ok) {
            report.verdict = Verdict::Fail;
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Every candidate whose tables map into values of depth at most `depth`.
pub fn all_candidates(decl: &str, types: &[TypeExpr], depth: usize, env: &Env) -> Result<Vec<CandidatePoly>> {
    let checked = env.require_decl(decl)?;
    let mut per_type: Vec<Vec<Term>> = Vec::new();
    for a in types {
        let values = enumerate_values(checked, std::slice::from_ref(a), depth, env)?;
        let dom = carrier(a, env)?;
        let count = (values.len() as f64).powi(dom.len() as i32);
        if count > env.caps.max_rel_enum as f64 {
            return Err(Error::caps(format!("more than {} tables over {a}", env.caps.max_rel_enum)));
        }
        per_type.push(all_tables(a, &TypeExpr::app(decl, vec![a.clone()]), &dom, &values));
    }
    let mut families: Vec<Vec<Term>> = vec![Vec::new()];
    for tables in per_type {
        families = families
            .into_iter()
            .flat_map(|prefix| {
                tables.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    families
        .into_iter()
        .enumerate()
        .map(|(i, tables)| CandidatePoly::new(format!("candidate {}", i + 1), decl, tables, env))
        .collect()
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub reports: Vec<FreeTheoremReport>,
    pub verdict: Verdict,
    pub elapsed: Duration,
}

impl SweepReport {
    pub fn parametric(&self) -> usize {
        self.reports.iter().filter(|r| r.parametric()).count()
    }
}

/// Runs [`check_free_theorem`] on every candidate of [`all_candidates`].
/// Passes when every candidate passing phase 1 passes phase 2.
pub fn sweep_candidates(decl: &str, types: &[TypeExpr], depth: usize, env: &Env) -> Result<SweepReport> {
    let start = Instant::now();
    let reports = all_candidates(decl, types, depth, env)?
        .iter()
        .map(|c| check_free_theorem(c, env))
        .collect::<Result<Vec<_>>>()?;
    let verdict = if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        Verdict::Fail
    } else if reports.iter().any(|r| r.verdict == Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    Ok(SweepReport {
        reports,
        verdict,
        elapsed: start.elapsed(),
    })
}
