use std::collections::{BTreeMap, BTreeSet};

/// Object-language type expressions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeExpr {
    Var(String),
    Bool,
    Unit,
    Prod(Box<TypeExpr>, Box<TypeExpr>),
    Arrow(Box<TypeExpr>, Box<TypeExpr>),
    App(String, Vec<TypeExpr>),
}

/// Variable-to-type substitution.
pub type Subst = BTreeMap<String, TypeExpr>;

impl TypeExpr {
    pub fn var(name: impl Into<String>) -> Self {
        TypeExpr::Var(name.into())
    }

    pub fn prod(left: TypeExpr, right: TypeExpr) -> Self {
        TypeExpr::Prod(Box::new(left), Box::new(right))
    }

    pub fn arrow(dom: TypeExpr, cod: TypeExpr) -> Self {
        TypeExpr::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn app(con: impl Into<String>, args: Vec<TypeExpr>) -> Self {
        TypeExpr::App(con.into(), args)
    }

    pub fn is_closed(&self) -> bool {
        match self {
            TypeExpr::Var(_) => false,
            TypeExpr::Bool | TypeExpr::Unit => true,
            TypeExpr::Prod(l, r) | TypeExpr::Arrow(l, r) => l.is_closed() && r.is_closed(),
            TypeExpr::App(_, args) => args.iter().all(TypeExpr::is_closed),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            TypeExpr::Var(v) => {
                out.insert(v.clone());
            }
            TypeExpr::Bool | TypeExpr::Unit => {}
            TypeExpr::Prod(l, r) | TypeExpr::Arrow(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
            TypeExpr::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// True when some `App` node occurs anywhere inside.
    pub fn contains_app(&self) -> bool {
        match self {
            TypeExpr::Var(_) | TypeExpr::Bool | TypeExpr::Unit => false,
            TypeExpr::Prod(l, r) | TypeExpr::Arrow(l, r) => l.contains_app() || r.contains_app(),
            TypeExpr::App(..) => true,
        }
    }

    /// True when an `App` of the named constructor occurs inside.
    pub fn mentions(&self, con: &str) -> bool {
        match self {
            TypeExpr::Var(_) | TypeExpr::Bool | TypeExpr::Unit => false,
            TypeExpr::Prod(l, r) | TypeExpr::Arrow(l, r) => l.mentions(con) || r.mentions(con),
            TypeExpr::App(c, args) => c == con || args.iter().any(|a| a.mentions(con)),
        }
    }

    pub fn contains_arrow(&self) -> bool {
        match self {
            TypeExpr::Var(_) | TypeExpr::Bool | TypeExpr::Unit => false,
            TypeExpr::Prod(l, r) => l.contains_arrow() || r.contains_arrow(),
            TypeExpr::Arrow(..) => true,
            TypeExpr::App(_, args) => args.iter().any(TypeExpr::contains_arrow),
        }
    }

    /// Variables bound by `subst` are replaced; the rest are left alone.
    pub fn subst(&self, subst: &Subst) -> TypeExpr {
        match self {
            TypeExpr::Var(v) => subst.get(v).cloned().unwrap_or_else(|| self.clone()),
            TypeExpr::Bool | TypeExpr::Unit => self.clone(),
            TypeExpr::Prod(l, r) => TypeExpr::prod(l.subst(subst), r.subst(subst)),
            TypeExpr::Arrow(l, r) => TypeExpr::arrow(l.subst(subst), r.subst(subst)),
            TypeExpr::App(c, args) => {
                TypeExpr::App(c.clone(), args.iter().map(|a| a.subst(subst)).collect())
            }
        }
    }

    /// Renames every `App` head `from` to `to`.
    pub fn rename_con(&self, from: &str, to: &str) -> TypeExpr {
        match self {
            TypeExpr::Var(_) | TypeExpr::Bool | TypeExpr::Unit => self.clone(),
            TypeExpr::Prod(l, r) => TypeExpr::prod(l.rename_con(from, to), r.rename_con(from, to)),
            TypeExpr::Arrow(l, r) => {
                TypeExpr::arrow(l.rename_con(from, to), r.rename_con(from, to))
            }
            TypeExpr::App(c, args) => TypeExpr::App(
                if c == from { to.to_string() } else { c.clone() },
                args.iter().map(|a| a.rename_con(from, to)).collect(),
            ),
        }
    }

    /// Syntactic one-way matching of a pattern against a closed type,
    /// extending `subst`. Fails on a clash with an existing binding.
    pub fn match_into(&self, target: &TypeExpr, subst: &mut Subst) -> bool {
        match (self, target) {
            (TypeExpr::Var(v), _) => match subst.get(v) {
                Some(bound) => bound == target,
                None => {
                    subst.insert(v.clone(), target.clone());
                    true
                }
            },
            (TypeExpr::Bool, TypeExpr::Bool) | (TypeExpr::Unit, TypeExpr::Unit) => true,
            (TypeExpr::Prod(a, b), TypeExpr::Prod(c, d))
            | (TypeExpr::Arrow(a, b), TypeExpr::Arrow(c, d)) => {
                a.match_into(c, subst) && b.match_into(d, subst)
            }
            (TypeExpr::App(f, xs), TypeExpr::App(g, ys)) => {
                f == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| x.match_into(y, subst))
            }
            _ => false,
        }
    }

    /// Whether every occurrence of `var` is in a covariant position.
    pub fn var_positive(&self, var: &str) -> bool {
        self.polarity_ok(var, true)
    }

    fn polarity_ok(&self, var: &str, positive: bool) -> bool {
        match self {
            TypeExpr::Var(v) => v != var || positive,
            TypeExpr::Bool | TypeExpr::Unit => true,
            TypeExpr::Prod(l, r) => l.polarity_ok(var, positive) && r.polarity_ok(var, positive),
            TypeExpr::Arrow(l, r) => l.polarity_ok(var, !positive) && r.polarity_ok(var, positive),
            TypeExpr::App(_, args) => args.iter().all(|a| a.polarity_ok(var, positive)),
        }
    }
}

/// A constructor signature `c : ∀ ᾱ. Φ → G Ψ̄`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CtorSig {
    pub name: String,
    pub quantified: Vec<String>,
    pub args: Vec<TypeExpr>,
    pub ret_instance: Vec<TypeExpr>,
}

impl CtorSig {
    /// The return instance is a permutation of the quantified variables.
    pub fn is_variable_return(&self) -> bool {
        if self.ret_instance.len() != self.quantified.len() {
            return false;
        }
        let mut seen = BTreeSet::new();
        for ty in &self.ret_instance {
            match ty {
                TypeExpr::Var(v) if self.quantified.contains(v) && seen.insert(v.clone()) => {}
                _ => return false,
            }
        }
        true
    }

    pub fn recursive_args(&self, decl: &str) -> impl Iterator<Item = (usize, &TypeExpr)> + '_ {
        let decl = decl.to_string();
        self.args.iter().enumerate().filter(move |(_, a)| a.mentions(&decl))
    }
}

/// A declared (G)ADT.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DataDecl {
    pub name: String,
    pub arity: usize,
    pub ctors: Vec<CtorSig>,
}

impl DataDecl {
    pub fn ctor(&self, name: &str) -> Option<&CtorSig> {
        self.ctors.iter().find(|c| c.name == name)
    }
}
