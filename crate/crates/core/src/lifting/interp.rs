//! Relational interpretation of constructor argument types under an
//! assignment of relations to type variables.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::kernel::{carrier, Env, Term, TypeExpr};
use crate::relations::{arrow_related, eq_rel, product_rel, Rel};

/// Relations chosen for the quantified variables of a constructor.
pub type Assign = BTreeMap<String, Rel>;

/// `T̂(ρ)` for a type without data-type components.
pub fn materialize(ty: &TypeExpr, rho: &Assign, env: &Env) -> Result<Rel> {
    match ty {
        TypeExpr::Var(v) => rho
            .get(v)
            .cloned()
            .ok_or_else(|| Error::ty(format!("no relation chosen for `{v}`"))),
        TypeExpr::Bool | TypeExpr::Unit => eq_rel(ty, env),
        TypeExpr::Prod(l, r) => Ok(product_rel(&materialize(l, rho, env)?, &materialize(r, rho, env)?)),
        TypeExpr::Arrow(d, c) => {
            let (dr, cr) = (materialize(d, rho, env)?, materialize(c, rho, env)?);
            let src = TypeExpr::arrow(dr.src().clone(), cr.src().clone());
            let tgt = TypeExpr::arrow(dr.tgt().clone(), cr.tgt().clone());
            let gs = carrier(&tgt, env)?;
            let mut pairs = BTreeSet::new();
            for f in carrier(&src, env)? {
                for g in &gs {
                    if arrow_related(&dr, &cr, &f, g) {
                        pairs.insert((f.clone(), g.clone()));
                    }
                }
            }
            Ok(Rel::from_parts(src, tgt, pairs))
        }
        TypeExpr::App(..) => Err(Error::unsupported(format!(
            "data type {ty} has no materialized relational interpretation"
        ))),
    }
}

/// How a variable occurs in a type.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Absent,
    Pos,
    Neg,
    Mixed,
}

impl Polarity {
    fn join(self, other: Polarity) -> Polarity {
        match (self, other) {
            (Polarity::Absent, p) | (p, Polarity::Absent) => p,
            (a, b) if a == b => a,
            _ => Polarity::Mixed,
        }
    }

    fn flip(self) -> Polarity {
        match self {
            Polarity::Pos => Polarity::Neg,
            Polarity::Neg => Polarity::Pos,
            p => p,
        }
    }
}

/// Data-type arguments count as covariant positions.
pub fn polarity(ty: &TypeExpr, var: &str) -> Polarity {
    match ty {
        TypeExpr::Var(v) if v == var => Polarity::Pos,
        TypeExpr::Var(_) | TypeExpr::Bool | TypeExpr::Unit => Polarity::Absent,
        TypeExpr::Prod(l, r) => polarity(l, var).join(polarity(r, var)),
        TypeExpr::Arrow(d, c) => polarity(d, var).flip().join(polarity(c, var)),
        TypeExpr::App(_, args) => args
            .iter()
            .fold(Polarity::Absent, |acc, a| acc.join(polarity(a, var))),
    }
}

/// Renders `T̂` with each variable replaced by the name of its relation.
pub fn lifted_type(ty: &TypeExpr, name: &dyn Fn(&str) -> String) -> String {
    fn go(ty: &TypeExpr, name: &dyn Fn(&str) -> String, level: u8) -> String {
        let (s, own) = match ty {
            TypeExpr::Var(v) => (name(v), 3),
            TypeExpr::Bool => ("eq_Bool".to_string(), 3),
            TypeExpr::Unit => ("eq_Unit".to_string(), 3),
            TypeExpr::Prod(l, r) => (format!("{} ×̂ {}", go(l, name, 2), go(r, name, 2)), 1),
            TypeExpr::Arrow(d, c) => (format!("{} →̂ {}", go(d, name, 1), go(c, name, 0)), 0),
            TypeExpr::App(g, args) => {
                let mut s = format!("{g}lift");
                for a in args {
                    s.push(' ');
                    s.push_str(&go(a, name, 3));
                }
                (s, 2)
            }
        };
        if own < level {
            format!("({s})")
        } else {
            s
        }
    }
    go(ty, name, 0)
}

/// `{(h a, h' b) | (a, b) ∈ r}`.
pub fn image(r: &Rel, f: &Term, g: &Term) -> Option<BTreeSet<(Term, Term)>> {
    r.pairs()
        .iter()
        .map(|(a, b)| Some((f.apply(a)?.clone(), g.apply(b)?.clone())))
        .collect()
}
