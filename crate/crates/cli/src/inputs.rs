//! Operands of the subcommands. A term, relation or function operand is
//! a path to a `.term`, `.rel` or `.fun` file, the name of an item of the
//! loaded `.gadt` file, or an inline literal, tried in that order.

use std::path::Path;

use gadtparam_core::kernel::{Caps, Env, Term, TypeExpr};
use gadtparam_core::parser::{load_source, parse_fun, parse_rel, parse_term, parse_type, SourceFile};
use gadtparam_core::relations::Rel;
use gadtparam_core::Result;

use crate::error::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub struct Inputs {
    pub source: SourceFile,
}

impl Inputs {
    pub fn load(path: &Path, caps: Caps) -> Result<Inputs, CliError> {
        let text = read(path)?;
        Inputs::from_text(path, &text, caps)
    }

    pub fn from_text(path: &Path, text: &str, caps: Caps) -> Result<Inputs, CliError> {
        let base = Env::new(caps)?;
        let source = load_source(path, text, &base).map_err(|error| CliError::InFile {
            path: path.display().to_string(),
            error,
        })?;
        Ok(Inputs { source })
    }

    pub fn env(&self) -> &Env {
        &self.source.env
    }

    /// The named declaration, or the only one of the file.
    pub fn decl(&self, name: Option<&str>) -> Result<String, CliError> {
        match name {
            Some(n) => {
                self.env().require_decl(n)?;
                Ok(n.to_string())
            }
            None => match self.source.decls.as_slice() {
                [d] => Ok(d.name.clone()),
                [] => Err(CliError::Usage(format!("{} declares no data type", self.source.path.display()))),
                _ => Err(CliError::Usage(format!(
                    "{} declares several data types; pick one with --decl",
                    self.source.path.display()
                ))),
            },
        }
    }

    fn operand<T>(
        &self,
        arg: &str,
        named: Option<&T>,
        parse: impl Fn(&str, &Env) -> Result<T>,
    ) -> Result<T, CliError>
    where
        T: Clone,
    {
        let path = Path::new(arg);
        if path.is_file() {
            let text = read(path)?;
            return parse(text.trim(), self.env()).map_err(|error| CliError::InFile {
                path: arg.to_string(),
                error,
            });
        }
        if let Some(t) = named {
            return Ok(t.clone());
        }
        Ok(parse(arg, self.env())?)
    }

    pub fn term(&self, arg: &str) -> Result<Term, CliError> {
        self.operand(arg, self.source.terms.get(arg), parse_term)
    }

    pub fn rel(&self, arg: &str) -> Result<Rel, CliError> {
        self.operand(arg, self.source.rels.get(arg), parse_rel)
    }

    pub fn fun(&self, arg: &str) -> Result<Term, CliError> {
        self.operand(arg, self.source.funs.get(arg), parse_fun)
    }

    pub fn ty(&self, arg: &str) -> Result<TypeExpr, CliError> {
        Ok(parse_type(arg, self.env())?)
    }

    pub fn terms(&self, args: &[String]) -> Result<Vec<Term>, CliError> {
        args.iter().map(|a| self.term(a)).collect()
    }

    pub fn rels(&self, args: &[String]) -> Result<Vec<Rel>, CliError> {
        args.iter().map(|a| self.rel(a)).collect()
    }

    pub fn funs(&self, args: &[String]) -> Result<Vec<Term>, CliError> {
        args.iter().map(|a| self.fun(a)).collect()
    }

    pub fn types(&self, args: &[String]) -> Result<Vec<TypeExpr>, CliError> {
        args.iter().map(|a| self.ty(a)).collect()
    }
}
