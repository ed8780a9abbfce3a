use std::collections::{BTreeMap, BTreeSet};

use super::types::{CtorSig, DataDecl, TypeExpr};
use crate::error::{Error, KindError, Result};

const RESERVED: &[&str] = &["Bool", "Unit", "Set", "data", "where", "forall", "true", "false", "unit", "fun", "rel"];

/// Resource caps for every enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Caps {
    pub max_carrier: usize,
    pub max_depth: usize,
    pub max_rel_enum: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_carrier: 16,
            max_depth: 3,
            max_rel_enum: 65536,
        }
    }
}

impl Caps {
    pub fn validate(&self) -> Result<()> {
        if self.max_carrier == 0 || self.max_depth == 0 || self.max_rel_enum == 0 {
            return Err(Error::caps("caps must be strictly positive"));
        }
        Ok(())
    }

    /// Largest `|A|·|B|` for which all relations can be enumerated.
    pub fn max_rel_bits(&self) -> usize {
        (usize::BITS - 1 - self.max_rel_enum.leading_zeros()) as usize
    }
}

/// A kind-checked declaration, with the per-constructor ADT/GADT flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckedDecl {
    pub decl: DataDecl,
    /// `variable_return[i]` holds when constructor `i` returns a
    /// permutation of its quantified variables.
    pub variable_return: Vec<bool>,
}

impl CheckedDecl {
    pub fn name(&self) -> &str {
        &self.decl.name
    }

    pub fn arity(&self) -> usize {
        self.decl.arity
    }

    pub fn is_adt(&self) -> bool {
        self.variable_return.iter().all(|&b| b)
    }

    pub fn ctor_index(&self, name: &str) -> Option<usize> {
        self.decl.ctors.iter().position(|c| c.name == name)
    }
}

/// Declarations in scope plus resource caps.
#[derive(Clone, Debug)]
pub struct Env {
    decls: BTreeMap<String, CheckedDecl>,
    ctor_owner: BTreeMap<String, String>,
    pub caps: Caps,
    /// Closed types tried for quantified variables that a constructor's
    /// return instance does not determine.
    pub witness_types: Vec<TypeExpr>,
}

impl Default for Env {
    fn default() -> Self {
        Env {
            decls: BTreeMap::new(),
            ctor_owner: BTreeMap::new(),
            caps: Caps::default(),
            witness_types: vec![TypeExpr::Unit, TypeExpr::Bool],
        }
    }
}

impl Env {
    pub fn new(caps: Caps) -> Result<Self> {
        caps.validate()?;
        Ok(Env {
            caps,
            ..Env::default()
        })
    }

    pub fn from_decls(decls: Vec<DataDecl>, caps: Caps) -> Result<Self> {
        let mut env = Env::new(caps)?;
        env.insert_all(decls)?;
        Ok(env)
    }

    /// Kind-checks and adds a batch of declarations, which may refer to
    /// one another and to declarations already in scope.
    pub fn insert_all(&mut self, decls: Vec<DataDecl>) -> Result<()> {
        let mut arities: BTreeMap<String, usize> =
            self.decls.iter().map(|(k, d)| (k.clone(), d.arity())).collect();
        for d in &decls {
            if arities.insert(d.name.clone(), d.arity).is_some() {
                return Err(Error::Kind {
                    decl: d.name.clone(),
                    errors: vec![KindError::DuplicateDeclaration(d.name.clone())],
                });
            }
        }
        let mut owners = self.ctor_owner.clone();
        let mut checked = Vec::new();
        for d in decls {
            let mut errors = match check_with(&d, &arities) {
                Ok(c) => {
                    checked.push(c);
                    Vec::new()
                }
                Err(e) => e,
            };
            for c in &d.ctors {
                if owners.insert(c.name.clone(), d.name.clone()).is_some()
                    && !errors.contains(&KindError::DuplicateConstructor(c.name.clone()))
                {
                    errors.push(KindError::DuplicateConstructor(c.name.clone()));
                }
            }
            if !errors.is_empty() {
                return Err(Error::Kind {
                    decl: d.name.clone(),
                    errors,
                });
            }
        }
        self.ctor_owner = owners;
        for c in checked {
            self.decls.insert(c.decl.name.clone(), c);
        }
        Ok(())
    }

    pub fn decl(&self, name: &str) -> Option<&CheckedDecl> {
        self.decls.get(name)
    }

    pub fn decls(&self) -> impl Iterator<Item = &CheckedDecl> {
        self.decls.values()
    }

    pub fn ctor(&self, name: &str) -> Option<(&CheckedDecl, &CtorSig)> {
        let owner = self.decls.get(self.ctor_owner.get(name)?)?;
        Some((owner, owner.decl.ctor(name)?))
    }

    pub fn require_decl(&self, name: &str) -> Result<&CheckedDecl> {
        self.decl(name)
            .ok_or_else(|| Error::ty(format!("unknown declaration `{name}`")))
    }
}

/// Checks one declaration against the declarations of `env` (and itself).
pub fn kind_check(decl: &DataDecl, env: &Env) -> Result<CheckedDecl, Vec<KindError>> {
    let mut arities: BTreeMap<String, usize> =
        env.decls.iter().map(|(k, d)| (k.clone(), d.arity())).collect();
    arities.insert(decl.name.clone(), decl.arity);
    check_with(decl, &arities)
}

fn check_with(
    decl: &DataDecl,
    arities: &BTreeMap<String, usize>,
) -> Result<CheckedDecl, Vec<KindError>> {
    let mut errors = Vec::new();
    if RESERVED.contains(&decl.name.as_str()) {
        errors.push(KindError::ReservedName(decl.name.clone()));
    }
    if decl.arity == 0 {
        errors.push(KindError::ZeroArity(decl.name.clone()));
    }
    let mut seen = BTreeSet::new();
    for ctor in &decl.ctors {
        if !seen.insert(ctor.name.as_str()) {
            errors.push(KindError::DuplicateConstructor(ctor.name.clone()));
        }
        if RESERVED.contains(&ctor.name.as_str()) {
            errors.push(KindError::ReservedName(ctor.name.clone()));
        }
        check_ctor(decl, ctor, arities, &mut errors);
    }
    if errors.is_empty() {
        Ok(CheckedDecl {
            variable_return: decl.ctors.iter().map(CtorSig::is_variable_return).collect(),
            decl: decl.clone(),
        })
    } else {
        Err(errors)
    }
}

fn check_ctor(
    decl: &DataDecl,
    ctor: &CtorSig,
    arities: &BTreeMap<String, usize>,
    errors: &mut Vec<KindError>,
) {
    let mut vars = BTreeSet::new();
    for v in &ctor.quantified {
        if !vars.insert(v.as_str()) {
            errors.push(KindError::DuplicateVariable {
                ctor: ctor.name.clone(),
                var: v.clone(),
            });
        }
    }
    if ctor.ret_instance.len() != decl.arity {
        errors.push(KindError::ArityMismatch {
            con: decl.name.clone(),
            expected: decl.arity,
            found: ctor.ret_instance.len(),
        });
    }
    for ty in ctor.args.iter().chain(&ctor.ret_instance) {
        check_type(ty, arities, errors);
        for v in ty.free_vars() {
            if !vars.contains(v.as_str()) {
                let e = KindError::UnquantifiedVariable {
                    ctor: ctor.name.clone(),
                    var: v,
                };
                if !errors.contains(&e) {
                    errors.push(e);
                }
            }
        }
    }
    let unsupported = |reason: &str| KindError::UnsupportedRecursion {
        ctor: ctor.name.clone(),
        reason: reason.to_string(),
    };
    for ty in &ctor.ret_instance {
        if ty.mentions(&decl.name) {
            errors.push(unsupported("return instance mentions the declared type"));
        }
    }
    for ty in &ctor.args {
        if nested_recursion(ty, &decl.name) {
            errors.push(unsupported("recursive occurrence applied to an argument that is itself recursive"));
        }
        if app_under_arrow(ty, false) {
            errors.push(unsupported("data type occurring inside a function type"));
        }
    }
}

fn check_type(ty: &TypeExpr, arities: &BTreeMap<String, usize>, errors: &mut Vec<KindError>) {
    match ty {
        TypeExpr::Var(_) | TypeExpr::Bool | TypeExpr::Unit => {}
        TypeExpr::Prod(l, r) | TypeExpr::Arrow(l, r) => {
            check_type(l, arities, errors);
            check_type(r, arities, errors);
        }
        TypeExpr::App(con, args) => {
            match arities.get(con) {
                None => errors.push(KindError::UnknownTypeConstructor(con.clone())),
                Some(&n) if n != args.len() => errors.push(KindError::ArityMismatch {
                    con: con.clone(),
                    expected: n,
                    found: args.len(),
                }),
                Some(_) => {}
            }
            args.iter().for_each(|a| check_type(a, arities, errors));
        }
    }
}

fn nested_recursion(ty: &TypeExpr, name: &str) -> bool {
    match ty {
        TypeExpr::Var(_) | TypeExpr::Bool | TypeExpr::Unit => false,
        TypeExpr::Prod(l, r) | TypeExpr::Arrow(l, r) => {
            nested_recursion(l, name) || nested_recursion(r, name)
        }
        TypeExpr::App(con, args) => {
            (con == name && args.iter().any(|a| a.mentions(name)))
                || args.iter().any(|a| nested_recursion(a, name))
        }
    }
}

fn app_under_arrow(ty: &TypeExpr, under: bool) -> bool {
    match ty {
        TypeExpr::Var(_) | TypeExpr::Bool | TypeExpr::Unit => false,
        TypeExpr::Prod(l, r) => app_under_arrow(l, under) || app_under_arrow(r, under),
        TypeExpr::Arrow(l, r) => app_under_arrow(l, true) || app_under_arrow(r, true),
        TypeExpr::App(_, args) => under || args.iter().any(|a| app_under_arrow(a, under)),
    }
}
