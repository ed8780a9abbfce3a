use std::collections::{BTreeMap, BTreeSet};

use super::env::{CheckedDecl, Env};
use super::term::Term;
use super::types::{Subst, TypeExpr};
use crate::error::{Error, Result};

/// Number of values of a closed, data-free type, saturating.
pub fn carrier_size(ty: &TypeExpr) -> Result<usize> {
    match ty {
        TypeExpr::Bool => Ok(2),
        TypeExpr::Unit => Ok(1),
        TypeExpr::Prod(l, r) => Ok(carrier_size(l)?.saturating_mul(carrier_size(r)?)),
        TypeExpr::Arrow(d, c) => {
            let d = carrier_size(d)?;
            let c = carrier_size(c)?;
            let exp = u32::try_from(d).unwrap_or(u32::MAX);
            Ok(c.checked_pow(exp).unwrap_or(usize::MAX))
        }
        TypeExpr::Var(v) => Err(Error::ty(format!("type variable `{v}` has no carrier"))),
        TypeExpr::App(c, _) => Err(Error::unsupported(format!(
            "data type `{c}` has no finite carrier; use value enumeration"
        ))),
    }
}

/// All values of a closed type without data-type components, in a fixed
/// order: `false < true`, products lexicographic, function tables
/// ordered by their output vectors.
pub fn carrier(ty: &TypeExpr, env: &Env) -> Result<Vec<Term>> {
    let size = carrier_size(ty)?;
    let limit = if ty.contains_arrow() {
        env.caps.max_rel_enum
    } else {
        env.caps.max_carrier
    };
    if size > limit {
        return Err(Error::caps(format!("carrier of {ty} has {size} elements (cap {limit})")));
    }
    Ok(build_carrier(ty))
}

fn build_carrier(ty: &TypeExpr) -> Vec<Term> {
    match ty {
        TypeExpr::Bool => vec![Term::BoolLit(false), Term::BoolLit(true)],
        TypeExpr::Unit => vec![Term::UnitLit],
        TypeExpr::Prod(l, r) => {
            let rs = build_carrier(r);
            build_carrier(l)
                .into_iter()
                .flat_map(|a| rs.iter().map(move |b| Term::pair(a.clone(), b.clone())))
                .collect()
        }
        TypeExpr::Arrow(d, c) => {
            let dom = build_carrier(d);
            let cod = build_carrier(c);
            all_tables(d, c, &dom, &cod)
        }
        TypeExpr::Var(_) | TypeExpr::App(..) => unreachable!("checked by carrier_size"),
    }
}

/// Every total table `dom → cod`, first domain element most significant.
pub fn all_tables(dom_ty: &TypeExpr, cod_ty: &TypeExpr, dom: &[Term], cod: &[Term]) -> Vec<Term> {
    if cod.is_empty() && !dom.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut digits = vec![0usize; dom.len()];
    loop {
        let table: BTreeMap<Term, Term> = dom
            .iter()
            .zip(&digits)
            .map(|(k, &i)| (k.clone(), cod[i].clone()))
            .collect();
        out.push(Term::fun(dom_ty.clone(), cod_ty.clone(), table));
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < cod.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// Identity table on a closed type.
pub fn identity_table(ty: &TypeExpr, env: &Env) -> Result<Term> {
    let elems = carrier(ty, env)?;
    Ok(Term::fun(
        ty.clone(),
        ty.clone(),
        elems.into_iter().map(|e| (e.clone(), e)).collect(),
    ))
}

/// Values of a closed type whose data-type components have constructor
/// depth at most `depth`.
pub fn inhabitants(ty: &TypeExpr, depth: usize, env: &Env) -> Result<Vec<Term>> {
    if !ty.contains_app() {
        return carrier(ty, env);
    }
    match ty {
        TypeExpr::Prod(l, r) => {
            let ls = inhabitants(l, depth, env)?;
            let rs = inhabitants(r, depth, env)?;
            check_count(ls.len().saturating_mul(rs.len()), ty, env)?;
            Ok(ls
                .iter()
                .flat_map(|a| rs.iter().map(move |b| Term::pair(a.clone(), b.clone())))
                .collect())
        }
        TypeExpr::App(name, args) => {
            let decl = env.require_decl(name)?;
            enumerate_values(decl, args, depth, env)
        }
        _ => Err(Error::unsupported(format!("cannot enumerate values of {ty}"))),
    }
}

fn check_count(n: usize, ty: &TypeExpr, env: &Env) -> Result<()> {
    if n > env.caps.max_rel_enum {
        Err(Error::caps(format!("more than {} values of {ty}", env.caps.max_rel_enum)))
    } else {
        Ok(())
    }
}

/// Constructor instantiations able to produce a value at `instance`.
/// Variables fixed by the return instance come from matching; the others
/// range over the environment's witness types.
pub fn instantiations(
    quantified: &[String],
    ret_instance: &[TypeExpr],
    instance: &[TypeExpr],
    env: &Env,
) -> Vec<Vec<TypeExpr>> {
    let mut subst = Subst::new();
    if ret_instance.len() != instance.len()
        || !ret_instance
            .iter()
            .zip(instance)
            .all(|(p, t)| p.match_into(t, &mut subst))
    {
        return Vec::new();
    }
    let witnesses: Vec<TypeExpr> = {
        let mut seen = BTreeSet::new();
        env.witness_types
            .iter()
            .filter(|t| seen.insert((*t).clone()))
            .cloned()
            .collect()
    };
    let mut out: Vec<Vec<TypeExpr>> = vec![Vec::new()];
    for v in quantified {
        let choices: Vec<TypeExpr> = match subst.get(v) {
            Some(t) => vec![t.clone()],
            None => witnesses.clone(),
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// All constructor-rooted values of `decl` at `instance` whose
/// constructor-nesting depth is at most `depth`.
pub fn enumerate_values(
    decl: &CheckedDecl,
    instance: &[TypeExpr],
    depth: usize,
    env: &Env,
) -> Result<Vec<Term>> {
    if depth > env.caps.max_depth {
        return Err(Error::caps(format!(
            "depth {depth} exceeds max_depth {}",
            env.caps.max_depth
        )));
    }
    if instance.len() != decl.arity() {
        return Err(Error::ty(format!(
            "`{}` expects {} index type(s), got {}",
            decl.name(),
            decl.arity(),
            instance.len()
        )));
    }
    if let Some(open) = instance.iter().find(|t| !t.is_closed()) {
        return Err(Error::ty(format!("instance {open} is not closed")));
    }
    let mut out = Vec::new();
    if depth == 0 {
        return Ok(out);
    }
    for sig in &decl.decl.ctors {
        for type_args in instantiations(&sig.quantified, &sig.ret_instance, instance, env) {
            let subst: Subst = sig.quantified.iter().cloned().zip(type_args.iter().cloned()).collect();
            let mut arg_lists: Vec<Vec<Term>> = vec![Vec::new()];
            for arg in &sig.args {
                let vals = inhabitants(&arg.subst(&subst), depth - 1, env)?;
                check_count(arg_lists.len().saturating_mul(vals.len()), &arg.subst(&subst), env)?;
                arg_lists = arg_lists
                    .into_iter()
                    .flat_map(|prefix| {
                        vals.iter().map(move |v| {
                            let mut p = prefix.clone();
                            p.push(v.clone());
                            p
                        })
                    })
                    .collect();
            }
            for args in arg_lists {
                out.push(Term::con(sig.name.clone(), type_args.clone(), args));
            }
            check_count(out.len(), &TypeExpr::App(decl.name().into(), instance.to_vec()), env)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn carrier_sizes() {
        let env = Env::default();
        assert_eq!(carrier(&TypeExpr::Bool, &env).unwrap().len(), 2);
        let bb = TypeExpr::prod(TypeExpr::Bool, TypeExpr::Bool);
        assert_eq!(carrier(&bb, &env).unwrap().len(), 4);
        let arrow = TypeExpr::arrow(TypeExpr::Bool, TypeExpr::Bool);
        assert_eq!(carrier(&arrow, &env).unwrap().len(), 4);
        assert_eq!(carrier(&TypeExpr::Unit, &env).unwrap(), vec![Term::UnitLit]);
    }

    #[test]
    fn carrier_order_is_fixed() {
        let env = Env::default();
        let bb = TypeExpr::prod(TypeExpr::Bool, TypeExpr::Bool);
        let c = carrier(&bb, &env).unwrap();
        let b = Term::BoolLit;
        assert_eq!(
            c,
            vec![
                Term::pair(b(false), b(false)),
                Term::pair(b(false), b(true)),
                Term::pair(b(true), b(false)),
                Term::pair(b(true), b(true)),
            ]
        );
    }

    #[test]
    fn oversize_carrier_hits_cap() {
        let env = Env::default();
        let b3 = TypeExpr::prod(TypeExpr::Bool, TypeExpr::prod(TypeExpr::Bool, TypeExpr::Bool));
        let b5 = TypeExpr::prod(b3.clone(), TypeExpr::prod(TypeExpr::Bool, TypeExpr::Bool));
        assert!(matches!(carrier(&b5, &env), Err(Error::Caps(_))));
        assert!(matches!(carrier(&TypeExpr::var("a"), &env), Err(Error::Type(_))));
    }

    #[test]
    fn tables_enumerate_all_functions() {
        let env = Env::default();
        let t = carrier(&TypeExpr::arrow(TypeExpr::Bool, TypeExpr::Unit), &env).unwrap();
        assert_eq!(t.len(), 1);
        let t = carrier(&TypeExpr::arrow(TypeExpr::Unit, TypeExpr::Bool), &env).unwrap();
        assert_eq!(t.len(), 2);
    }
}
