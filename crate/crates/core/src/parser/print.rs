use std::collections::BTreeMap;
use std::fmt::{self, Display, Formatter, Write};

use crate::kernel::{DataDecl, Term, TypeExpr};
use crate::relations::Rel;

const ARROW: u8 = 0;
const PROD: u8 = 1;
const APP: u8 = 2;
const ATOM: u8 = 3;

fn write_type(f: &mut impl Write, ty: &TypeExpr, level: u8) -> fmt::Result {
    let needs = match ty {
        TypeExpr::Arrow(..) => level > ARROW,
        TypeExpr::Prod(..) => level > PROD,
        TypeExpr::App(_, args) if !args.is_empty() => level > APP,
        _ => false,
    };
    if needs {
        f.write_char('(')?;
    }
    match ty {
        TypeExpr::Var(v) => f.write_str(v)?,
        TypeExpr::Bool => f.write_str("Bool")?,
        TypeExpr::Unit => f.write_str("Unit")?,
        TypeExpr::Prod(l, r) => {
            write_type(f, l, APP)?;
            f.write_str(" × ")?;
            write_type(f, r, APP)?;
        }
        TypeExpr::Arrow(d, c) => {
            write_type(f, d, PROD)?;
            f.write_str(" → ")?;
            write_type(f, c, ARROW)?;
        }
        TypeExpr::App(c, args) => {
            f.write_str(c)?;
            for a in args {
                f.write_char(' ')?;
                write_type(f, a, ATOM)?;
            }
        }
    }
    if needs {
        f.write_char(')')?;
    }
    Ok(())
}

impl Display for TypeExpr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_type(f, self, ARROW)
    }
}

/// Type printed so that it can appear as a single atom.
pub fn atom_type(ty: &TypeExpr) -> String {
    let mut s = String::new();
    write_type(&mut s, ty, ATOM).expect("writing to a String");
    s
}

fn is_identity(table: &BTreeMap<Term, Term>) -> bool {
    table.iter().all(|(k, v)| k == v)
}

/// With `brief`, identity tables print as `id` and type arguments are
/// dropped; the result is for reading, not for parsing back.
fn write_term(f: &mut impl Write, t: &Term, atom: bool, brief: bool) -> fmt::Result {
    match t {
        Term::BoolLit(b) => write!(f, "{b}"),
        Term::UnitLit => f.write_str("unit"),
        Term::Pair(l, r) => {
            f.write_char('(')?;
            write_term(f, l, false, brief)?;
            f.write_str(", ")?;
            write_term(f, r, false, brief)?;
            f.write_char(')')
        }
        Term::FinFun { table, .. } if brief && is_identity(table) => f.write_str("id"),
        Term::FinFun { dom, cod, table } => {
            f.write_str("fun ")?;
            write_type(f, &TypeExpr::arrow(dom.clone(), cod.clone()), ARROW)?;
            f.write_str(" {")?;
            for (i, (k, v)) in table.iter().enumerate() {
                f.write_str(if i == 0 { " " } else { ", " })?;
                write_term(f, k, false, brief)?;
                f.write_str(" => ")?;
                write_term(f, v, false, brief)?;
            }
            f.write_str(" }")
        }
        Term::Con { ctor, type_args, args } => {
            let parens = atom && !args.is_empty();
            if parens {
                f.write_char('(')?;
            }
            f.write_str(ctor)?;
            if !brief {
                f.write_str(" [")?;
                for (i, ty) in type_args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_type(f, ty, ARROW)?;
                }
                f.write_char(']')?;
            }
            for a in args {
                f.write_char(' ')?;
                write_term(f, a, true, brief)?;
            }
            if parens {
                f.write_char(')')?;
            }
            Ok(())
        }
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_term(f, self, false, false)
    }
}

/// Term printed so that it can appear as a constructor argument.
pub fn atom_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t, true, false).expect("writing to a String");
    s
}

/// [`atom_term`] with identity tables shown as `id` and no type arguments.
pub fn brief_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(&mut s, t, true, true).expect("writing to a String");
    s
}

impl Display for DataDecl {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "data {} : Set", self.name)?;
        for _ in 0..self.arity {
            f.write_str(" → Set")?;
        }
        f.write_str(" where")?;
        for c in &self.ctors {
            write!(f, "\n  {} : ∀{{{}}} →", c.name, c.quantified.join(" "))?;
            for a in &c.args {
                f.write_char(' ')?;
                write_type(f, a, PROD)?;
                f.write_str(" →")?;
            }
            f.write_char(' ')?;
            write_type(f, &TypeExpr::App(self.name.clone(), c.ret_instance.clone()), ARROW)?;
        }
        Ok(())
    }
}

impl Display for Rel {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "rel {} {} {{", atom_type(&self.src), atom_type(&self.tgt))?;
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            write!(f, "({a}, {b})")?;
        }
        f.write_str(" }")
    }
}
