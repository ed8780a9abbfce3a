use std::collections::{BTreeMap, BTreeSet};

use super::syntax::{Expr, FunLit, Pattern, RelBody, RelLit};
use crate::error::{Error, Result};
use crate::kernel::{carrier, type_of, Env, Term, TypeExpr};
use crate::relations::{eq_rel, Rel};

pub(crate) type Bindings = BTreeMap<String, Term>;

pub(crate) fn eval(e: &Expr, env: &Env, binds: &Bindings) -> Result<Term> {
    Ok(match e {
        Expr::Var(v) => binds
            .get(v)
            .cloned()
            .ok_or_else(|| Error::ty(format!("unbound name `{v}`")))?,
        Expr::Bool(b) => Term::BoolLit(*b),
        Expr::Unit => Term::UnitLit,
        Expr::Pair(l, r) => Term::pair(eval(l, env, binds)?, eval(r, env, binds)?),
        Expr::Con { ctor, type_args, args } => Term::con(
            ctor.clone(),
            type_args.clone(),
            args.iter().map(|a| eval(a, env, binds)).collect::<Result<_>>()?,
        ),
        Expr::Not(x) => match eval(x, env, binds)? {
            Term::BoolLit(b) => Term::BoolLit(!b),
            other => return Err(Error::ty(format!("`not` applied to non-boolean {other}"))),
        },
        Expr::Fst(x) | Expr::Snd(x) => match eval(x, env, binds)? {
            Term::Pair(l, r) => {
                if matches!(e, Expr::Fst(_)) {
                    *l
                } else {
                    *r
                }
            }
            other => return Err(Error::ty(format!("projection applied to non-pair {other}"))),
        },
        Expr::Fun(f) => fun(f, env, binds)?,
    })
}

fn matches(p: &Pattern, t: &Term, env: &Env, globals: &Bindings, binds: &mut Bindings) -> Result<bool> {
    Ok(match (p, t) {
        (Pattern::Wild, _) => true,
        (Pattern::Var(v), _) => match binds.get(v) {
            Some(prev) => prev == t,
            None => {
                binds.insert(v.clone(), t.clone());
                true
            }
        },
        (Pattern::Bool(b), Term::BoolLit(c)) => b == c,
        (Pattern::Unit, Term::UnitLit) => true,
        (Pattern::Pair(pl, pr), Term::Pair(l, r)) => {
            matches(pl, l, env, globals, binds)? && matches(pr, r, env, globals, binds)?
        }
        (Pattern::Lit(e), _) => &eval(e, env, globals)? == t,
        _ => false,
    })
}

fn literal_key(p: &Pattern, env: &Env, globals: &Bindings) -> Option<Term> {
    match p {
        Pattern::Bool(b) => Some(Term::BoolLit(*b)),
        Pattern::Unit => Some(Term::UnitLit),
        Pattern::Pair(l, r) => Some(Term::pair(
            literal_key(l, env, globals)?,
            literal_key(r, env, globals)?,
        )),
        Pattern::Lit(e) => eval(e, env, globals).ok(),
        Pattern::Wild | Pattern::Var(_) => None,
    }
}

/// Expands a function literal into its table over the domain carrier,
/// using the first matching row for every element.
pub(crate) fn fun(f: &FunLit, env: &Env, globals: &Bindings) -> Result<Term> {
    let mut seen = BTreeSet::new();
    for (p, _) in &f.rows {
        if let Some(k) = literal_key(p, env, globals) {
            if !seen.insert(k.clone()) {
                return Err(Error::ty(format!("duplicate row for {k} in function literal")));
            }
        }
    }
    let mut table = BTreeMap::new();
    for elem in carrier(&f.dom, env)? {
        let mut value = None;
        for (p, rhs) in &f.rows {
            let mut binds = Bindings::new();
            if matches(p, &elem, env, globals, &mut binds)? {
                let mut scope = globals.clone();
                scope.extend(binds);
                value = Some(eval(rhs, env, &scope)?);
                break;
            }
        }
        let value = value.ok_or_else(|| {
            Error::ty(format!("function literal is not total: no row for {elem}"))
        })?;
        table.insert(elem, value);
    }
    let t = Term::fun(f.dom.clone(), f.cod.clone(), table);
    type_of(&t, env)?;
    Ok(t)
}

pub(crate) fn rel(r: &RelLit, env: &Env, globals: &Bindings) -> Result<Rel> {
    let pair_terms = |es: &[Expr]| -> Result<Vec<(Term, Term)>> {
        es.iter()
            .map(|e| match eval(e, env, globals)? {
                Term::Pair(a, b) => Ok((*a, *b)),
                other => Err(Error::ty(format!("relation entry {other} is not a pair"))),
            })
            .collect()
    };
    if let Some(open) = [&r.src, &r.tgt].into_iter().find(|t| !t.is_closed()) {
        return Err(Error::ty(format!("relation over open type {open}")));
    }
    match &r.body {
        RelBody::All => Rel::full(&r.src, &r.tgt, env),
        RelBody::None => Ok(Rel::empty(r.src.clone(), r.tgt.clone())),
        RelBody::Eq => {
            if r.src != r.tgt {
                return Err(Error::ty(format!("`eq` needs equal types, got {} and {}", r.src, r.tgt)));
            }
            eq_rel(&r.src, env)
        }
        RelBody::Pairs(es) => Rel::new(r.src.clone(), r.tgt.clone(), pair_terms(es)?, env),
        RelBody::AllExcept(es) => {
            let removed = Rel::new(r.src.clone(), r.tgt.clone(), pair_terms(es)?, env)?;
            let full = Rel::full(&r.src, &r.tgt, env)?;
            Ok(Rel::from_parts(
                r.src.clone(),
                r.tgt.clone(),
                full.pairs.difference(&removed.pairs).cloned().collect(),
            ))
        }
    }
}

pub(crate) fn closed_term(e: &Expr, env: &Env, globals: &Bindings) -> Result<(Term, TypeExpr)> {
    let t = eval(e, env, globals)?;
    let ty = type_of(&t, env)?;
    Ok((t, ty))
}
