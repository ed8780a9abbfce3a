use std::collections::BTreeSet;

use super::enumerate::carrier;
use super::env::Env;
use super::term::Term;
use super::types::{Subst, TypeExpr};
use crate::error::{Error, Result};

/// Computes the unique closed type of a term.
pub fn type_of(term: &Term, env: &Env) -> Result<TypeExpr> {
    match term {
        Term::BoolLit(_) => Ok(TypeExpr::Bool),
        Term::UnitLit => Ok(TypeExpr::Unit),
        Term::Pair(l, r) => Ok(TypeExpr::prod(type_of(l, env)?, type_of(r, env)?)),
        Term::FinFun { dom, cod, table } => {
            if !dom.is_closed() || !cod.is_closed() {
                return Err(Error::ty("function table over an open type"));
            }
            let domain: BTreeSet<Term> = carrier(dom, env)?.into_iter().collect();
            let keys: BTreeSet<&Term> = table.keys().collect();
            if keys.len() != domain.len() || domain.iter().any(|d| !keys.contains(d)) {
                return Err(Error::ty(format!(
                    "function table is not total on its domain ({} of {} rows)",
                    keys.iter().filter(|k| domain.contains(**k)).count(),
                    domain.len()
                )));
            }
            for v in table.values() {
                let found = type_of(v, env)?;
                if &found != cod {
                    return Err(Error::ty(format!(
                        "function table value has type {found}, expected {cod}"
                    )));
                }
            }
            Ok(TypeExpr::arrow(dom.clone(), cod.clone()))
        }
        Term::Con {
            ctor,
            type_args,
            args,
        } => {
            let (decl, sig) = env
                .ctor(ctor)
                .ok_or_else(|| Error::ty(format!("unknown constructor `{ctor}`")))?;
            if type_args.len() != sig.quantified.len() {
                return Err(Error::ty(format!(
                    "`{ctor}` expects {} type argument(s), got {}",
                    sig.quantified.len(),
                    type_args.len()
                )));
            }
            if let Some(open) = type_args.iter().find(|t| !t.is_closed()) {
                return Err(Error::ty(format!("type argument {open} of `{ctor}` is not closed")));
            }
            if args.len() != sig.args.len() {
                return Err(Error::ty(format!(
                    "`{ctor}` expects {} argument(s), got {}",
                    sig.args.len(),
                    args.len()
                )));
            }
            let subst = instantiation(&sig.quantified, type_args);
            for (i, (arg, expected)) in args.iter().zip(&sig.args).enumerate() {
                let expected = expected.subst(&subst);
                let found = type_of(arg, env)?;
                if found != expected {
                    return Err(Error::ty(format!(
                        "argument {} of `{ctor}` has type {found}, expected {expected}",
                        i + 1
                    )));
                }
            }
            Ok(TypeExpr::App(
                decl.name().to_string(),
                sig.ret_instance.iter().map(|t| t.subst(&subst)).collect(),
            ))
        }
    }
}

pub fn instantiation(vars: &[String], types: &[TypeExpr]) -> Subst {
    vars.iter().cloned().zip(types.iter().cloned()).collect()
}

/// The instance `Ā` of a term typed `G Ā`.
pub fn instance_of(term: &Term, env: &Env) -> Result<(String, Vec<TypeExpr>)> {
    match type_of(term, env)? {
        TypeExpr::App(name, args) => Ok((name, args)),
        other => Err(Error::ty(format!("expected a data type, found {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Caps, CtorSig, DataDecl};

    fn seq_env() -> Env {
        let a = |n: &str| TypeExpr::var(n);
        let seq = DataDecl {
            name: "Seq".into(),
            arity: 1,
            ctors: vec![
                CtorSig {
                    name: "inj".into(),
                    quantified: vec!["α".into()],
                    args: vec![a("α")],
                    ret_instance: vec![a("α")],
                },
                CtorSig {
                    name: "pairing".into(),
                    quantified: vec!["α₁".into(), "α₂".into()],
                    args: vec![
                        TypeExpr::app("Seq", vec![a("α₁")]),
                        TypeExpr::app("Seq", vec![a("α₂")]),
                    ],
                    ret_instance: vec![TypeExpr::prod(a("α₁"), a("α₂"))],
                },
            ],
        };
        Env::from_decls(vec![seq], Caps::default()).unwrap()
    }

    fn inj(b: bool) -> Term {
        Term::con("inj", vec![TypeExpr::Bool], vec![Term::BoolLit(b)])
    }

    #[test]
    fn inj_bool_is_seq_bool() {
        let env = seq_env();
        assert_eq!(
            type_of(&inj(true), &env).unwrap(),
            TypeExpr::app("Seq", vec![TypeExpr::Bool])
        );
    }

    #[test]
    fn pairing_is_seq_of_product() {
        let env = seq_env();
        let t = Term::con("pairing", vec![TypeExpr::Bool, TypeExpr::Bool], vec![inj(true), inj(false)]);
        assert_eq!(
            type_of(&t, &env).unwrap(),
            TypeExpr::app("Seq", vec![TypeExpr::prod(TypeExpr::Bool, TypeExpr::Bool)])
        );
    }

    #[test]
    fn pair_of_bool_and_unit() {
        let env = seq_env();
        let t = Term::pair(Term::BoolLit(true), Term::UnitLit);
        assert_eq!(type_of(&t, &env).unwrap(), TypeExpr::prod(TypeExpr::Bool, TypeExpr::Unit));
    }

    #[test]
    fn argument_mismatch_is_reported() {
        let env = seq_env();
        let t = Term::con("pairing", vec![TypeExpr::Bool, TypeExpr::Unit], vec![inj(true), inj(false)]);
        assert!(matches!(type_of(&t, &env), Err(Error::Type(_))));
    }

    #[test]
    fn partial_table_is_rejected() {
        let env = seq_env();
        let mut table = std::collections::BTreeMap::new();
        table.insert(Term::BoolLit(true), Term::BoolLit(true));
        let f = Term::fun(TypeExpr::Bool, TypeExpr::Bool, table);
        let err = type_of(&f, &env).unwrap_err();
        assert!(err.to_string().contains("not total"));
    }
}
