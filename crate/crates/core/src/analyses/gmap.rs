use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::Verdict;
use crate::completion::fmap;
use crate::error::{Error, Result};
use crate::kernel::{carrier, Env, Subst, Term, TypeExpr};
use crate::lifting::{Judgment, LiftEngine, Mode, Outcome};
use crate::relations::graph;

#[derive(Clone, Debug)]
pub enum GmapResult {
    /// The unique partner, with its derivation.
    Defined(Judgment),
    Undefined { candidates: usize },
    /// Two distinct partners.
    NonUnique(Box<(Judgment, Judgment)>),
    Inconclusive(String),
}

impl GmapResult {
    pub fn value(&self) -> Option<&Term> {
        match self {
            GmapResult::Defined(j) => Some(&j.right),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            GmapResult::Defined(j) => json!({"result": "defined", "value": j.right.to_string(), "judgment": j.to_json()}),
            GmapResult::Undefined { candidates } => json!({"result": "undefined", "candidates": candidates}),
            GmapResult::NonUnique(p) => json!({
                "result": "non_unique",
                "values": [p.0.right.to_string(), p.1.right.to_string()],
                "judgments": [p.0.to_json(), p.1.to_json()],
            }),
            GmapResult::Inconclusive(m) => json!({"result": "inconclusive", "reason": m}),
        }
    }
}

fn cartesian(parts: Vec<Vec<Term>>, cap: usize) -> Result<Vec<Vec<Term>>> {
    let total = parts.iter().try_fold(1usize, |acc, p| acc.checked_mul(p.len()));
    if total.is_none_or(|t| t > cap) {
        return Err(Error::caps(format!("more than {cap} candidate partners")));
    }
    let mut out: Vec<Vec<Term>> = vec![Vec::new()];
    for p in parts {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                p.iter().map(move |t| {
                    let mut v = prefix.clone();
                    v.push(t.clone());
                    v
                })
            })
            .collect();
    }
    Ok(out)
}

/// Values of `ty` built with the same constructors as `x`, with data
/// leaves and stored functions ranging over their carriers.
fn candidates(x: &Term, ty: &TypeExpr, env: &Env) -> Result<Vec<Term>> {
    let cap = env.caps.max_rel_enum;
    match ty {
        _ if !ty.contains_app() => carrier(ty, env),
        TypeExpr::Prod(l, r) => {
            let Some((a, b)) = x.components() else {
                return Ok(Vec::new());
            };
            let parts = vec![candidates(a, l, env)?, candidates(b, r, env)?];
            Ok(cartesian(parts, cap)?
                .into_iter()
                .map(|mut v| {
                    let b = v.pop().expect("two components");
                    Term::pair(v.pop().expect("two components"), b)
                })
                .collect())
        }
        TypeExpr::App(_, idx) => {
            let Term::Con { ctor, type_args, args } = x else {
                return Ok(Vec::new());
            };
            let Some((_, sig)) = env.ctor(ctor) else {
                return Ok(Vec::new());
            };
            let mut subst = Subst::new();
            if !sig.ret_instance.iter().zip(idx).all(|(p, t)| p.match_into(t, &mut subst)) {
                return Ok(Vec::new());
            }
            for (v, t) in sig.quantified.iter().zip(type_args) {
                subst.entry(v.clone()).or_insert_with(|| t.clone());
            }
            let new_args: Vec<TypeExpr> = sig.quantified.iter().map(|v| subst[v].clone()).collect();
            let parts = sig
                .args
                .iter()
                .zip(args)
                .map(|(t, a)| candidates(a, &t.subst(&subst), env))
                .collect::<Result<Vec<_>>>()?;
            Ok(cartesian(parts, cap)?
                .into_iter()
                .map(|v| Term::con(ctor.clone(), new_args.clone(), v))
                .collect())
        }
        _ => Err(Error::unsupported(format!("no candidates for {ty}"))),
    }
}

/// `gmap f x`: the `y` with `Ĝ (graph f) x y` in the restricted lifting,
/// searched among the terms of the same shape as `x`.
pub fn gmap(decl: &str, f: &Term, x: &Term, env: &Env) -> Result<GmapResult> {
    gmap_with(&LiftEngine::new(env, decl, Mode::Completion)?, f, x)
}

pub fn gmap_with(engine: &LiftEngine, f: &Term, x: &Term) -> Result<GmapResult> {
    let Term::FinFun { cod, .. } = f else {
        return Err(Error::ty(format!("{f} is not a function table")));
    };
    let r = graph(f)?;
    let ty = TypeExpr::app(engine.decl().to_string(), vec![cod.clone()]);
    let cands = match candidates(x, &ty, engine.env()) {
        Ok(c) => c,
        Err(Error::Caps(m)) => return Ok(GmapResult::Inconclusive(m)),
        Err(e) => return Err(e),
    };
    let mut found: Vec<Judgment> = Vec::new();
    for y in &cands {
        let j = engine.check(std::slice::from_ref(&r), x, y)?;
        match &j.outcome {
            Outcome::Related(_) => found.push(j),
            Outcome::NotRelated => {}
            Outcome::Inconclusive(m) => return Ok(GmapResult::Inconclusive(m.clone())),
        }
        if found.len() == 2 {
            let second = found.pop().expect("two partners");
            let first = found.pop().expect("two partners");
            return Ok(GmapResult::NonUnique(Box::new((first, second))));
        }
    }
    Ok(match found.pop() {
        Some(j) => GmapResult::Defined(j),
        None => GmapResult::Undefined { candidates: cands.len() },
    })
}

#[derive(Clone, Debug)]
pub struct GraphLemmaRow {
    pub function: Term,
    pub value: Term,
    pub result: GmapResult,
    /// `map f x`, for declarations whose constructors all return `G ᾱ`.
    pub map_value: Option<Term>,
}

impl GraphLemmaRow {
    pub fn unique(&self) -> bool {
        !matches!(self.result, GmapResult::NonUnique(_))
    }

    /// The partner agrees with `map f x` when the latter exists.
    pub fn agrees_with_map(&self) -> bool {
        matches!(self.result, GmapResult::Inconclusive(_))
            || self.map_value.as_ref().is_none_or(|m| self.result.value() == Some(m))
    }
}

#[derive(Clone, Debug)]
pub struct GraphLemmaReport {
    pub decl: String,
    pub rows: Vec<GraphLemmaRow>,
    pub verdict: Verdict,
    pub elapsed: Duration,
}

impl GraphLemmaReport {
    pub fn defined(&self) -> usize {
        self.rows.iter().filter(|r| r.result.value().is_some()).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &GraphLemmaRow> {
        self.rows.iter().filter(|r| !r.unique() || !r.agrees_with_map())
    }

    pub fn row_json(row: &GraphLemmaRow) -> Value {
        json!({
            "function": row.function.to_string(),
            "value": row.value.to_string(),
            "gmap": row.result.to_json(),
            "map": row.map_value.as_ref().map(Term::to_string),
        })
    }
}

/// For every function and value, at most one partner under the graph of
/// the function; for algebraic data types the partner is also `map f x`.
pub fn check_graph_lemma(decl: &str, functions: &[Term], values: &[Term], env: &Env) -> Result<GraphLemmaReport> {
    let start = Instant::now();
    let engine = LiftEngine::new(env, decl, Mode::Completion)?;
    let checked = env.require_decl(decl)?;
    let mut rows = Vec::new();
    let mut inconclusive = false;
    for f in functions {
        for x in values {
            let result = gmap_with(&engine, f, x)?;
            inconclusive |= matches!(result, GmapResult::Inconclusive(_));
            let map_value = if checked.is_adt() {
                Some(fmap(checked, std::slice::from_ref(f), x, env)?)
            } else {
                None
            };
            rows.push(GraphLemmaRow {
                function: f.clone(),
                value: x.clone(),
                result,
                map_value,
            });
        }
    }
    let mut report = GraphLemmaReport {
        decl: decl.to_string(),
        rows,
        verdict: Verdict::Pass,
        elapsed: Duration::ZERO,
    };
    report.verdict = if report.failures().next().is_some() {
        Verdict::Fail
    } else if inconclusive {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    report.elapsed = start.elapsed();
    Ok(report)
}
