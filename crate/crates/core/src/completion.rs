//! Functorial completion `G_c` of a declaration, the embedding
//! `ι : G → G_c`, and the map function of types whose constructors all
//! return distinct variables.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel::{
    identity_table, instantiation, kind_check, type_of, CheckedDecl, CtorSig, DataDecl, Env, Subst,
    Term, TypeExpr,
};

pub const COMPLETION_SUFFIX: &str = "_c";

/// How one original constructor is represented in the completion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorMapping {
    pub original: String,
    pub completed: String,
    pub rewritten: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletedDecl {
    pub original: CheckedDecl,
    pub completed: CheckedDecl,
    pub ctor_map: Vec<CtorMapping>,
}

/// The return instance is a vector of distinct variables (not
/// necessarily covering the quantified ones).
pub fn returns_distinct_vars(sig: &CtorSig) -> bool {
    let mut seen = Vec::new();
    sig.ret_instance.iter().all(|t| match t {
        TypeExpr::Var(v) if !seen.contains(&v) => {
            seen.push(v);
            true
        }
        _ => false,
    })
}

fn fresh_vars(n: usize, taken: &[String]) -> Vec<String> {
    (1..=n)
        .map(|i| {
            let mut name = format!("β{i}");
            while taken.contains(&name) {
                name.push('\'');
            }
            name
        })
        .collect()
}

/// Replaces every constructor `c : ∀ᾱ. Φ → G Ψ̄` whose return instance is
/// not a vector of distinct variables by
/// `c_c : ∀ᾱβ̄. (Ψ̄ → β̄) → Φ → G_c β̄`; the other constructors are copied.
/// Recursive occurrences of `G` become `G_c`.
pub fn complete(decl: &CheckedDecl) -> CompletedDecl {
    let name = format!("{}{COMPLETION_SUFFIX}", decl.name());
    let mut ctors = Vec::new();
    let mut ctor_map = Vec::new();
    for sig in &decl.decl.ctors {
        let args: Vec<TypeExpr> = sig.args.iter().map(|a| a.rename_con(decl.name(), &name)).collect();
        let cname = format!("{}{COMPLETION_SUFFIX}", sig.name);
        let rewritten = !returns_distinct_vars(sig);
        let completed = if rewritten {
            let betas = fresh_vars(decl.arity(), &sig.quantified);
            let mut quantified = sig.quantified.clone();
            quantified.extend(betas.iter().cloned());
            let mut new_args: Vec<TypeExpr> = sig
                .ret_instance
                .iter()
                .zip(&betas)
                .map(|(psi, b)| TypeExpr::arrow(psi.clone(), TypeExpr::var(b.clone())))
                .collect();
            new_args.extend(args);
            CtorSig {
                name: cname.clone(),
                quantified,
                args: new_args,
                ret_instance: betas.into_iter().map(TypeExpr::Var).collect(),
            }
        } else {
            CtorSig {
                name: cname.clone(),
                quantified: sig.quantified.clone(),
                args,
                ret_instance: sig.ret_instance.clone(),
            }
        };
        ctors.push(completed);
        ctor_map.push(CtorMapping {
            original: sig.name.clone(),
            completed: cname,
            rewritten,
        });
    }
    let data = DataDecl {
        name,
        arity: decl.arity(),
        ctors,
    };
    let completed = CheckedDecl {
        variable_return: data.ctors.iter().map(CtorSig::is_variable_return).collect(),
        decl: data,
    };
    CompletedDecl {
        original: decl.clone(),
        completed,
        ctor_map,
    }
}

impl CompletedDecl {
    pub fn mapping(&self, original_ctor: &str) -> Option<&CtorMapping> {
        self.ctor_map.iter().find(|m| m.original == original_ctor)
    }

    pub fn rewritten_count(&self) -> usize {
        self.ctor_map.iter().filter(|m| m.rewritten).count()
    }
}

/// Completes the named declaration and returns an environment holding
/// both it and its completion.
pub fn complete_in(env: &Env, name: &str) -> Result<(CompletedDecl, Env)> {
    let cd = complete(env.require_decl(name)?);
    let mut out = env.clone();
    match out.decl(cd.completed.name()) {
        Some(existing) if existing.decl == cd.completed.decl => {}
        Some(_) => {
            return Err(Error::ty(format!(
                "`{}` is already declared differently",
                cd.completed.name()
            )))
        }
        None => {
            kind_check(&cd.completed.decl, &out).map_err(|errors| Error::Kind {
                decl: cd.completed.name().to_string(),
                errors,
            })?;
            out.insert_all(vec![cd.completed.decl.clone()])?;
        }
    }
    Ok((cd, out))
}

/// The embedding `ι`: kept constructors are renamed, rewritten ones get
/// identity tables on the concrete return instance. `env` must hold the
/// completion (see [`complete_in`]).
pub fn embed(cd: &CompletedDecl, term: &Term, env: &Env) -> Result<Term> {
    let from = cd.original.name();
    let to = cd.completed.name();
    match term {
        Term::BoolLit(_) | Term::UnitLit | Term::FinFun { .. } => Ok(term.clone()),
        Term::Pair(l, r) => Ok(Term::pair(embed(cd, l, env)?, embed(cd, r, env)?)),
        Term::Con { ctor, type_args, args } => {
            let args: Vec<Term> = args.iter().map(|a| embed(cd, a, env)).collect::<Result<_>>()?;
            let type_args: Vec<TypeExpr> = type_args.iter().map(|t| t.rename_con(from, to)).collect();
            let Some(m) = cd.mapping(ctor) else {
                return Ok(Term::con(ctor.clone(), type_args, args));
            };
            if !m.rewritten {
                return Ok(Term::con(m.completed.clone(), type_args, args));
            }
            let sig = cd
                .original
                .decl
                .ctor(ctor)
                .expect("mapping exists for every constructor");
            let subst = instantiation(&sig.quantified, &type_args);
            let index: Vec<TypeExpr> = sig.ret_instance.iter().map(|t| t.subst(&subst)).collect();
            let mut new_args = Vec::with_capacity(index.len() + args.len());
            for ty in &index {
                new_args.push(identity_table(ty, env)?);
            }
            new_args.extend(args);
            let mut new_types = type_args;
            new_types.extend(index);
            Ok(Term::con(m.completed.clone(), new_types, new_args))
        }
    }
}

/// A functorial action on values of one closed type.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Action {
    Id(TypeExpr),
    Fun(Term),
    Prod(Box<Action>, Box<Action>),
    /// Post-composition on a table with domain the given type.
    Post(TypeExpr, Box<Action>),
    Map(String, Vec<Action>),
}

impl Action {
    fn is_id(&self) -> bool {
        matches!(self, Action::Id(_))
    }

    fn src(&self) -> TypeExpr {
        match self {
            Action::Id(t) => t.clone(),
            Action::Fun(Term::FinFun { dom, .. }) => dom.clone(),
            Action::Fun(_) => unreachable!("actions hold tables"),
            Action::Prod(l, r) => TypeExpr::prod(l.src(), r.src()),
            Action::Post(d, c) => TypeExpr::arrow(d.clone(), c.src()),
            Action::Map(g, acts) => TypeExpr::App(g.clone(), acts.iter().map(Action::src).collect()),
        }
    }

    fn tgt(&self) -> TypeExpr {
        match self {
            Action::Id(t) => t.clone(),
            Action::Fun(Term::FinFun { cod, .. }) => cod.clone(),
            Action::Fun(_) => unreachable!("actions hold tables"),
            Action::Prod(l, r) => TypeExpr::prod(l.tgt(), r.tgt()),
            Action::Post(d, c) => TypeExpr::arrow(d.clone(), c.tgt()),
            Action::Map(g, acts) => TypeExpr::App(g.clone(), acts.iter().map(Action::tgt).collect()),
        }
    }

    fn apply(&self, t: &Term, env: &Env) -> Result<Term> {
        match (self, t) {
            (Action::Id(_), _) => Ok(t.clone()),
            (Action::Fun(f), _) => f
                .apply(t)
                .cloned()
                .ok_or_else(|| Error::ty(format!("{t} is outside the domain of {f}"))),
            (Action::Prod(l, r), Term::Pair(a, b)) => Ok(Term::pair(l.apply(a, env)?, r.apply(b, env)?)),
            (Action::Post(dom, c), Term::FinFun { table, .. }) => {
                let table = table
                    .iter()
                    .map(|(k, v)| Ok((k.clone(), c.apply(v, env)?)))
                    .collect::<Result<BTreeMap<_, _>>>()?;
                Ok(Term::fun(dom.clone(), c.tgt(), table))
            }
            (Action::Map(g, acts), _) => map_actions(env.require_decl(g)?, acts, t, env),
            _ => Err(Error::ty(format!("cannot map over {t}"))),
        }
    }
}

fn action_of(ty: &TypeExpr, subst: &Subst, mapped: &BTreeMap<String, Action>, env: &Env) -> Result<Action> {
    Ok(match ty {
        TypeExpr::Var(v) => match mapped.get(v) {
            Some(a) => a.clone(),
            None => Action::Id(subst.get(v).cloned().unwrap_or_else(|| ty.clone())),
        },
        TypeExpr::Bool | TypeExpr::Unit => Action::Id(ty.clone()),
        TypeExpr::Prod(l, r) => {
            let (la, ra) = (action_of(l, subst, mapped, env)?, action_of(r, subst, mapped, env)?);
            if la.is_id() && ra.is_id() {
                Action::Id(ty.subst(subst))
            } else {
                Action::Prod(Box::new(la), Box::new(ra))
            }
        }
        TypeExpr::Arrow(d, c) => {
            if !action_of(d, subst, mapped, env)?.is_id() {
                return Err(Error::unsupported(format!(
                    "mapped variable in the domain of {ty}"
                )));
            }
            let ca = action_of(c, subst, mapped, env)?;
            if ca.is_id() {
                Action::Id(ty.subst(subst))
            } else {
                Action::Post(d.subst(subst), Box::new(ca))
            }
        }
        TypeExpr::App(g, args) => {
            let acts: Vec<Action> = args
                .iter()
                .map(|a| action_of(a, subst, mapped, env))
                .collect::<Result<_>>()?;
            if acts.iter().all(Action::is_id) {
                Action::Id(ty.subst(subst))
            } else {
                Action::Map(g.clone(), acts)
            }
        }
    })
}

fn map_actions(decl: &CheckedDecl, acts: &[Action], x: &Term, env: &Env) -> Result<Term> {
    let Term::Con { ctor, type_args, args } = x else {
        return Err(Error::ty(format!("{x} is not a value of `{}`", decl.name())));
    };
    let sig = decl
        .decl
        .ctor(ctor)
        .ok_or_else(|| Error::ty(format!("`{ctor}` is not a constructor of `{}`", decl.name())))?;
    if !returns_distinct_vars(sig) {
        return Err(Error::unsupported(format!(
            "`{ctor}` has a constrained return instance; map the completion instead"
        )));
    }
    let subst = instantiation(&sig.quantified, type_args);
    let mut mapped = BTreeMap::new();
    for (ret, act) in sig.ret_instance.iter().zip(acts) {
        let TypeExpr::Var(v) = ret else { unreachable!("checked above") };
        let here = ret.subst(&subst);
        if act.src() != here {
            return Err(Error::ty(format!(
                "function on {} applied at index {here}",
                act.src()
            )));
        }
        mapped.insert(v.clone(), act.clone());
    }
    let new_types = sig
        .quantified
        .iter()
        .zip(type_args)
        .map(|(q, t)| mapped.get(q).map_or_else(|| t.clone(), Action::tgt))
        .collect();
    let new_args = sig
        .args
        .iter()
        .zip(args)
        .map(|(ty, a)| action_of(ty, &subst, &mapped, env)?.apply(a, env))
        .collect::<Result<_>>()?;
    Ok(Term::con(ctor.clone(), new_types, new_args))
}

/// `map_G f̄ x` for a declaration whose constructors all return distinct
/// variables (every ADT, and every completion): one table per index.
pub fn fmap(decl: &CheckedDecl, fs: &[Term], x: &Term, env: &Env) -> Result<Term> {
    if fs.len() != decl.arity() {
        return Err(Error::ty(format!(
            "`{}` has {} index(es), got {} function(s)",
            decl.name(),
            decl.arity(),
            fs.len()
        )));
    }
    let acts: Vec<Action> = fs
        .iter()
        .map(|f| match type_of(f, env)? {
            TypeExpr::Arrow(..) => Ok(Action::Fun(f.clone())),
            other => Err(Error::ty(format!("expected a function table, found {other}"))),
        })
        .collect::<Result<_>>()?;
    map_actions(decl, &acts, x, env)
}

/// `map_{G_c} f̄ x`.
pub fn map_completion(cd: &CompletedDecl, fs: &[Term], x: &Term, env: &Env) -> Result<Term> {
    fmap(&cd.completed, fs, x, env)
}
