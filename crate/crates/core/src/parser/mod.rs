//! Surface syntax: declarations, terms, relation and function literals.
//!
//! ```text
//! data Seq : Set → Set where
//!   inj     : ∀{α} → α → Seq α
//!   pairing : ∀{α₁ α₂} → Seq α₁ → Seq α₂ → Seq (α₁ × α₂)
//!
//! term s  = pairing [Bool, Bool] (inj [Bool] true) (inj [Bool] false)
//! rel  S  = rel (Bool*Bool) (Bool*Bool) { all except ((false,false),(true,true)) }
//! fun  sw = fun (Bool*Bool) -> (Bool*Bool) { (x, y) => (y, x) }
//! ```
//!
//! ASCII `forall`, `->` and `*` may replace `∀`, `→` and `×`; `--` starts
//! a line comment.

mod elab;
mod lexer;
mod print;
mod syntax;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use thiserror::Error;

use crate::error::{Error, Result};
use crate::kernel::{Caps, DataDecl, Env, Term, TypeExpr};
use crate::relations::Rel;
use elab::Bindings;
use lexer::Pos;
pub use print::{atom_term, atom_type, brief_term};
use syntax::{resolve_expr, resolve_fun, resolve_rel, resolve_type, Item, Parser};

/// A syntax error with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(pos: Pos, message: impl Into<String>) -> Self {
        ParseError {
            line: pos.line,
            col: pos.col,
            message: message.into(),
        }
    }
}

fn decl_names(env: &Env) -> BTreeSet<String> {
    env.decls().map(|d| d.name().to_string()).collect()
}

/// Parses a file consisting only of `data` declarations.
pub fn parse_decls(text: &str) -> Result<Vec<DataDecl>, ParseError> {
    let mut out = Vec::new();
    for item in Parser::new(text)?.items()? {
        match item {
            Item::Decl(d) => out.push(d),
            _ => {
                return Err(ParseError {
                    line: 1,
                    col: 1,
                    message: "expected only `data` declarations".into(),
                })
            }
        }
    }
    Ok(out)
}

/// Parses a type; names of declarations in `env` resolve to data types.
pub fn parse_type(text: &str, env: &Env) -> Result<TypeExpr> {
    let mut p = Parser::new(text)?;
    let ty = p.ty()?;
    p.expect_eof()?;
    Ok(resolve_type(&ty, &decl_names(env)))
}

/// Parses and type-checks a closed term.
pub fn parse_term(text: &str, env: &Env) -> Result<Term> {
    let mut p = Parser::new(text)?;
    let mut e = p.expr()?;
    p.expect_eof()?;
    resolve_expr(&mut e, &decl_names(env));
    Ok(elab::closed_term(&e, env, &Bindings::new())?.0)
}

/// Parses a relation literal `rel A B { … }`.
pub fn parse_rel(text: &str, env: &Env) -> Result<Rel> {
    let mut p = Parser::new(text)?;
    let mut r = p.rel_lit()?;
    p.expect_eof()?;
    resolve_rel(&mut r, &decl_names(env));
    elab::rel(&r, env, &Bindings::new())
}

/// Parses a function literal `fun A → B { pattern => term, … }` into its
/// total table.
pub fn parse_fun(text: &str, env: &Env) -> Result<Term> {
    let mut p = Parser::new(text)?;
    let mut f = p.fun_lit()?;
    p.expect_eof()?;
    resolve_fun(&mut f, &decl_names(env));
    elab::fun(&f, env, &Bindings::new())
}

/// A loaded source file: its declarations (kind-checked into `env`) and
/// its named terms, relations and functions. Later items may refer to
/// earlier named terms and functions by name.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub path: PathBuf,
    pub text: String,
    pub env: Env,
    pub decls: Vec<DataDecl>,
    pub terms: BTreeMap<String, Term>,
    pub rels: BTreeMap<String, Rel>,
    pub funs: BTreeMap<String, Term>,
}

impl SourceFile {
    pub fn term(&self, name: &str) -> Result<&Term> {
        self.terms
            .get(name)
            .ok_or_else(|| Error::ty(format!("no term named `{name}`")))
    }

    pub fn rel(&self, name: &str) -> Result<&Rel> {
        self.rels
            .get(name)
            .ok_or_else(|| Error::ty(format!("no relation named `{name}`")))
    }

    pub fn fun(&self, name: &str) -> Result<&Term> {
        self.funs
            .get(name)
            .ok_or_else(|| Error::ty(format!("no function named `{name}`")))
    }
}

/// Parses a whole file on top of `base`, whose declarations stay in scope.
pub fn load_source(path: impl Into<PathBuf>, text: &str, base: &Env) -> Result<SourceFile> {
    let items = Parser::new(text)?.items()?;
    let mut env = base.clone();
    let decls: Vec<DataDecl> = items
        .iter()
        .filter_map(|i| match i {
            Item::Decl(d) => Some(d.clone()),
            _ => None,
        })
        .collect();
    env.insert_all(decls.clone())?;
    let names = decl_names(&env);
    let mut globals = Bindings::new();
    let (mut terms, mut rels, mut funs) = (BTreeMap::new(), BTreeMap::new(), BTreeMap::new());
    for item in items {
        match item {
            Item::Decl(_) => {}
            Item::Term { name, mut expr } => {
                resolve_expr(&mut expr, &names);
                let (t, _) = elab::closed_term(&expr, &env, &globals)?;
                globals.insert(name.clone(), t.clone());
                terms.insert(name, t);
            }
            Item::Fun { name, mut fun } => {
                resolve_fun(&mut fun, &names);
                let t = elab::fun(&fun, &env, &globals)?;
                globals.insert(name.clone(), t.clone());
                funs.insert(name, t);
            }
            Item::Rel { name, mut rel } => {
                resolve_rel(&mut rel, &names);
                rels.insert(name, elab::rel(&rel, &env, &globals)?);
            }
        }
    }
    Ok(SourceFile {
        path: path.into(),
        text: text.to_string(),
        env,
        decls,
        terms,
        rels,
        funs,
    })
}

/// An environment holding the declarations of `text`.
pub fn env_from_source(text: &str, caps: Caps) -> Result<Env> {
    Env::from_decls(parse_decls(text)?, caps)
}
