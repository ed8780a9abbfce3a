use std::collections::BTreeMap;
use std::sync::Arc;

use super::types::TypeExpr;

/// Closed object-language values.
///
/// Constructor applications carry their type instantiation explicitly.
/// Function values are total finite tables, so the derived structural
/// equality on `FinFun` is extensional equality of graphs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    BoolLit(bool),
    UnitLit,
    Pair(Box<Term>, Box<Term>),
    FinFun {
        dom: TypeExpr,
        cod: TypeExpr,
        table: Arc<BTreeMap<Term, Term>>,
    },
    Con {
        ctor: String,
        type_args: Vec<TypeExpr>,
        args: Vec<Term>,
    },
}

impl Term {
    pub fn pair(left: Term, right: Term) -> Self {
        Term::Pair(Box::new(left), Box::new(right))
    }

    pub fn con(ctor: impl Into<String>, type_args: Vec<TypeExpr>, args: Vec<Term>) -> Self {
        Term::Con {
            ctor: ctor.into(),
            type_args,
            args,
        }
    }

    pub fn fun(dom: TypeExpr, cod: TypeExpr, table: BTreeMap<Term, Term>) -> Self {
        Term::FinFun {
            dom,
            cod,
            table: Arc::new(table),
        }
    }

    /// Applies a finite function; `None` when `self` is not a table or
    /// the argument is outside its domain.
    pub fn apply(&self, arg: &Term) -> Option<&Term> {
        match self {
            Term::FinFun { table, .. } => table.get(arg),
            _ => None,
        }
    }

    pub fn head(&self) -> Option<&str> {
        match self {
            Term::Con { ctor, .. } => Some(ctor),
            _ => None,
        }
    }

    /// Constructor-nesting depth: `inj a` has depth 1.
    pub fn con_depth(&self) -> usize {
        match self {
            Term::BoolLit(_) | Term::UnitLit | Term::FinFun { .. } => 0,
            Term::Pair(l, r) => l.con_depth().max(r.con_depth()),
            Term::Con { args, .. } => 1 + args.iter().map(Term::con_depth).max().unwrap_or(0),
        }
    }

    pub fn components(&self) -> Option<(&Term, &Term)> {
        match self {
            Term::Pair(l, r) => Some((l, r)),
            _ => None,
        }
    }
}

/// Composition `outer ∘ inner` of two tables.
pub fn compose(outer: &Term, inner: &Term) -> Option<Term> {
    let (Term::FinFun { dom, table, .. }, Term::FinFun { cod, .. }) = (inner, outer) else {
        return None;
    };
    let mut out = BTreeMap::new();
    for (k, v) in table.iter() {
        out.insert(k.clone(), outer.apply(v)?.clone());
    }
    Some(Term::fun(dom.clone(), cod.clone(), out))
}

/// Componentwise product `f × g` of two tables over a product domain.
pub fn product_fun(f: &Term, g: &Term) -> Option<Term> {
    let (
        Term::FinFun { dom: d1, cod: c1, table: t1 },
        Term::FinFun { dom: d2, cod: c2, table: t2 },
    ) = (f, g)
    else {
        return None;
    };
    let mut out = BTreeMap::new();
    for (a1, b1) in t1.iter() {
        for (a2, b2) in t2.iter() {
            out.insert(
                Term::pair(a1.clone(), a2.clone()),
                Term::pair(b1.clone(), b2.clone()),
            );
        }
    }
    Some(Term::fun(
        TypeExpr::prod(d1.clone(), d2.clone()),
        TypeExpr::prod(c1.clone(), c2.clone()),
        out,
    ))
}
