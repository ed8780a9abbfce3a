//! Printable rule schemas: one rule `ĉlift` per constructor.

use std::fmt;

use serde_json::{json, Value};

use super::derivation::rule_name;
use super::interp::lifted_type;
use super::Mode;
use crate::completion::complete_in;
use crate::error::Result;
use crate::kernel::{CheckedDecl, CtorSig, Env, TypeExpr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftRule {
    pub ctor: String,
    pub name: String,
    /// One relation variable per quantified type variable.
    pub relations: Vec<String>,
    pub premises: Vec<String>,
    pub conclusion: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftRuleSet {
    pub decl: String,
    pub mode: Mode,
    /// The declaration whose constructors the rules follow.
    pub rules_of: String,
    pub rules: Vec<LiftRule>,
    /// In completion mode, the definition of `Ĝ` through `ι`.
    pub restriction: Option<String>,
}

fn rel_var(v: &str) -> String {
    format!("R{v}")
}

fn atom(s: String) -> String {
    if s.contains(' ') {
        format!("({s})")
    } else {
        s
    }
}

fn rule_for(decl: &str, sig: &CtorSig) -> LiftRule {
    let name = |v: &str| rel_var(v);
    let n = sig.args.len();
    let xs: Vec<String> = (1..=n).map(|k| format!("x{k}")).collect();
    let ys: Vec<String> = (1..=n).map(|k| format!("y{k}")).collect();
    let premises = sig
        .args
        .iter()
        .enumerate()
        .map(|(k, ty)| {
            let l = lifted_type(ty, &name);
            let head = if matches!(ty, TypeExpr::App(..)) { l } else { atom(l) };
            format!("{head} {} {}", xs[k], ys[k])
        })
        .collect();
    let apply = |args: &[String]| {
        if args.is_empty() {
            sig.name.clone()
        } else {
            format!("({} {})", sig.name, args.join(" "))
        }
    };
    let mut conclusion = format!("{decl}lift");
    for psi in &sig.ret_instance {
        conclusion.push(' ');
        conclusion.push_str(&atom(lifted_type(psi, &name)));
    }
    conclusion.push_str(&format!(" {} {}", apply(&xs), apply(&ys)));
    LiftRule {
        ctor: sig.name.clone(),
        name: rule_name(&sig.name),
        relations: sig.quantified.iter().map(|v| rel_var(v)).collect(),
        premises,
        conclusion,
    }
}

fn rules_for(decl: &CheckedDecl) -> Vec<LiftRule> {
    decl.decl.ctors.iter().map(|c| rule_for(decl.name(), c)).collect()
}

/// The rule set of `decl` in `mode`; completion mode reads the rules of
/// the completion.
pub fn derive_rules(decl: &str, mode: Mode, env: &Env) -> Result<LiftRuleSet> {
    let checked = env.require_decl(decl)?;
    Ok(match mode {
        Mode::Naive => LiftRuleSet {
            decl: decl.to_string(),
            mode,
            rules_of: decl.to_string(),
            rules: rules_for(checked),
            restriction: None,
        },
        Mode::Completion => {
            let (cd, _) = complete_in(env, decl)?;
            let c = cd.completed.name();
            let rels: String = (1..=checked.arity()).map(|i| format!(" R{i}")).collect();
            LiftRuleSet {
                decl: decl.to_string(),
                mode,
                rules_of: c.to_string(),
                rules: rules_for(&cd.completed),
                restriction: Some(format!("{decl}lift{rels} x y := {c}lift{rels} (ι x) (ι y)")),
            }
        }
    })
}

impl LiftRule {
    pub fn to_json(&self) -> Value {
        json!({
            "ctor": self.ctor,
            "rule": self.name,
            "relations": self.relations,
            "premises": self.premises,
            "conclusion": self.conclusion,
        })
    }
}

impl LiftRuleSet {
    pub fn rule(&self, ctor: &str) -> Option<&LiftRule> {
        self.rules.iter().find(|r| r.ctor == ctor)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "decl": self.decl,
            "mode": self.mode,
            "rules_of": self.rules_of,
            "rules": self.rules.iter().map(LiftRule::to_json).collect::<Vec<_>>(),
            "restriction": self.restriction,
        })
    }
}

impl fmt::Display for LiftRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let top = self.premises.join("    ");
        let width = top.chars().count().max(self.conclusion.chars().count());
        if !self.relations.is_empty() {
            writeln!(f, "  ∀ {}", self.relations.join(" "))?;
        }
        writeln!(f, "  {top}")?;
        writeln!(f, "  {} {}", "─".repeat(width), self.name)?;
        writeln!(f, "  {}", self.conclusion)
    }
}

impl fmt::Display for LiftRuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "-- {} lifting of {}", self.mode, self.decl)?;
        for (i, r) in self.rules.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{r}")?;
        }
        if let Some(r) = &self.restriction {
            writeln!(f)?;
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}
