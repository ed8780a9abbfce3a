//! Relational liftings `Ĝ R̄` of declared data types, decided by search
//! with replayable derivations.
//!
//! Naive mode applies one rule per constructor of `G` directly. Completion
//! mode embeds both terms into `G_c` with `ι` and uses the rules of the
//! completion, so that `Ĝ R̄ x y` holds iff `Ĝ_c R̄ (ι x) (ι y)` does.

mod derivation;
mod interp;
mod rules;
mod search;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

pub use derivation::{rule_name, Derivation, Premise};
pub use interp::{materialize, polarity, Assign, Polarity};
pub use rules::{derive_rules, LiftRule, LiftRuleSet};
pub use search::Outcome;

use crate::completion::{complete_in, embed, CompletedDecl};
use crate::error::{Error, Result};
use crate::kernel::{enumerate_values, instance_of, Env, Term, TypeExpr};
use crate::relations::Rel;
use search::Lifter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Naive,
    Completion,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Naive => "naive",
            Mode::Completion => "completion",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "naive" => Ok(Mode::Naive),
            "completion" => Ok(Mode::Completion),
            _ => Err(Error::ty(format!("unknown mode `{s}` (expected naive or completion)"))),
        }
    }
}

/// The answer to one `Ĝ R̄ x y` query.
#[derive(Clone, Debug)]
pub struct Judgment {
    pub mode: Mode,
    pub decl: String,
    pub rels: Vec<Rel>,
    pub left: Term,
    pub right: Term,
    /// `(ι x, ι y)` in completion mode.
    pub embedded: Option<(Term, Term)>,
    pub outcome: Outcome,
}

impl Judgment {
    pub fn is_related(&self) -> bool {
        self.outcome.is_related()
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        match &self.outcome {
            Outcome::Related(d) => Some(d),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let (verdict, detail) = match &self.outcome {
            Outcome::Related(d) => ("related", d.to_json()),
            Outcome::NotRelated => ("not_related", Value::Null),
            Outcome::Inconclusive(why) => ("inconclusive", Value::String(why.clone())),
        };
        json!({
            "mode": self.mode,
            "decl": self.decl,
            "relations": self.rels.iter().map(Rel::to_json).collect::<Vec<_>>(),
            "left": self.left.to_string(),
            "right": self.right.to_string(),
            "embedded": self.embedded.as_ref().map(|(a, b)| json!([a.to_string(), b.to_string()])),
            "verdict": verdict,
            "derivation": detail,
        })
    }
}

/// A value checked against the engine's declaration, with its embedding.
#[derive(Clone, Debug)]
pub struct Prepared {
    instance: Vec<TypeExpr>,
    run: Term,
}

/// Enumerated values on both sides of a lifting, with their embeddings.
#[derive(Clone, Debug)]
pub struct Cells {
    pub src: Vec<TypeExpr>,
    pub tgt: Vec<TypeExpr>,
    pub left: Vec<Term>,
    pub right: Vec<Term>,
    left_run: Vec<Term>,
    right_run: Vec<Term>,
}

impl Cells {
    pub fn len(&self) -> usize {
        self.left.len() * self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pair(&self, cell: usize) -> (&Term, &Term) {
        let n = self.right.len();
        (&self.left[cell / n], &self.right[cell % n])
    }
}

/// A set of cells of a [`Cells`] grid.
pub type CellSet = Vec<u64>;

pub fn cell_set_contains(set: &CellSet, cell: usize) -> bool {
    set[cell / 64] >> (cell % 64) & 1 == 1
}

/// `a ⊆ b`.
pub fn cell_set_includes(a: &CellSet, b: &CellSet) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Decides liftings of one declaration in one mode. Holds the
/// environment extended with the completion and a memo of sub-judgments.
pub struct LiftEngine {
    mode: Mode,
    decl: String,
    completion: Option<CompletedDecl>,
    lifter: Lifter,
}

impl LiftEngine {
    pub fn new(env: &Env, decl: &str, mode: Mode) -> Result<LiftEngine> {
        env.require_decl(decl)?;
        let (completion, env) = match mode {
            Mode::Naive => (None, env.clone()),
            Mode::Completion => {
                let (cd, env) = complete_in(env, decl)?;
                (Some(cd), env)
            }
        };
        Ok(LiftEngine {
            mode,
            decl: decl.to_string(),
            completion,
            lifter: Lifter::new(Arc::new(env)),
        })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn decl(&self) -> &str {
        &self.decl
    }

    /// The environment the rules are read from.
    pub fn env(&self) -> &Env {
        self.lifter.env()
    }

    pub fn completion(&self) -> Option<&CompletedDecl> {
        self.completion.as_ref()
    }

    fn target(&self) -> &str {
        match &self.completion {
            Some(cd) => cd.completed.name(),
            None => &self.decl,
        }
    }

    fn run_term(&self, t: &Term) -> Result<Term> {
        match &self.completion {
            Some(cd) => embed(cd, t, self.env()),
            None => Ok(t.clone()),
        }
    }

    fn instance(&self, t: &Term) -> Result<Vec<TypeExpr>> {
        let (name, args) = instance_of(t, self.env())?;
        if name != self.decl {
            return Err(Error::ty(format!("{t} is a value of `{name}`, not of `{}`", self.decl)));
        }
        Ok(args)
    }

    fn check_rels(&self, rels: &[Rel], src: &[TypeExpr], tgt: &[TypeExpr]) -> Result<()> {
        if rels.len() != src.len() {
            return Err(Error::ty(format!(
                "`{}` takes {} relations, got {}",
                self.decl,
                src.len(),
                rels.len()
            )));
        }
        for (i, r) in rels.iter().enumerate() {
            if r.src() != &src[i] || r.tgt() != &tgt[i] {
                return Err(Error::ty(format!(
                    "relation {} is between {} and {}, expected {} and {}",
                    i + 1,
                    r.src(),
                    r.tgt(),
                    src[i],
                    tgt[i]
                )));
            }
        }
        Ok(())
    }

    /// Decides `Ĝ rels x y`.
    pub fn check(&self, rels: &[Rel], x: &Term, y: &Term) -> Result<Judgment> {
        let (src, tgt) = (self.instance(x)?, self.instance(y)?);
        self.check_rels(rels, &src, &tgt)?;
        let (ex, ey) = (self.run_term(x)?, self.run_term(y)?);
        let outcome = self.lifter.check(self.target(), rels, &ex, &ey);
        Ok(Judgment {
            mode: self.mode,
            decl: self.decl.clone(),
            rels: rels.to_vec(),
            left: x.clone(),
            right: y.clone(),
            embedded: self.completion.as_ref().map(|_| (ex, ey)),
            outcome,
        })
    }

    /// The verdict of `Ĝ rels x y`; a related answer may carry a less
    /// informative derivation than [`LiftEngine::check`] gives.
    pub fn decide(&self, rels: &[Rel], x: &Term, y: &Term) -> Result<Outcome> {
        self.decide_prepared(rels, &self.prepare(x)?, &self.prepare(y)?)
    }

    /// Type-checks and embeds a value once for repeated queries.
    pub fn prepare(&self, x: &Term) -> Result<Prepared> {
        Ok(Prepared {
            instance: self.instance(x)?,
            run: self.run_term(x)?,
        })
    }

    pub fn decide_prepared(&self, rels: &[Rel], x: &Prepared, y: &Prepared) -> Result<Outcome> {
        self.check_rels(rels, &x.instance, &y.instance)?;
        Ok(self.lifter.decide(self.target(), rels, &x.run, &y.run))
    }

    /// Values of `G src` and `G tgt` up to `depth`.
    pub fn cells(&self, src: &[TypeExpr], tgt: &[TypeExpr], depth: usize) -> Result<Cells> {
        let decl = self.env().require_decl(&self.decl)?;
        let left = enumerate_values(decl, src, depth, self.env())?;
        let right = enumerate_values(decl, tgt, depth, self.env())?;
        let left_run = left.iter().map(|t| self.run_term(t)).collect::<Result<_>>()?;
        let right_run = right.iter().map(|t| self.run_term(t)).collect::<Result<_>>()?;
        Ok(Cells {
            src: src.to_vec(),
            tgt: tgt.to_vec(),
            left,
            right,
            left_run,
            right_run,
        })
    }

    /// The cells of `cells` related by `Ĝ rels`. Any inconclusive cell is
    /// an error.
    pub fn relate_cells(&self, rels: &[Rel], cells: &Cells) -> Result<CellSet> {
        self.check_rels(rels, &cells.src, &cells.tgt)?;
        let mut out = vec![0u64; cells.len().div_ceil(64)];
        let n = cells.right.len();
        for (i, x) in cells.left_run.iter().enumerate() {
            for (j, y) in cells.right_run.iter().enumerate() {
                if x.head() != y.head() {
                    continue;
                }
                match self.lifter.decide(self.target(), rels, x, y) {
                    Outcome::Related(_) => {
                        let c = i * n + j;
                        out[c / 64] |= 1 << (c % 64);
                    }
                    Outcome::NotRelated => {}
                    Outcome::Inconclusive(why) => {
                        return Err(Error::caps(format!(
                            "lifting of {} and {} is inconclusive: {why}",
                            cells.left[i], cells.right[j]
                        )))
                    }
                }
            }
        }
        Ok(out)
    }

    /// `Ĝ rels` restricted to values of depth at most `depth`.
    pub fn relation(&self, rels: &[Rel], depth: usize) -> Result<Rel> {
        let src: Vec<TypeExpr> = rels.iter().map(|r| r.src().clone()).collect();
        let tgt: Vec<TypeExpr> = rels.iter().map(|r| r.tgt().clone()).collect();
        let cells = self.cells(&src, &tgt, depth)?;
        let set = self.relate_cells(rels, &cells)?;
        let pairs = (0..cells.len())
            .filter(|&c| cell_set_contains(&set, c))
            .map(|c| {
                let (a, b) = cells.pair(c);
                (a.clone(), b.clone())
            })
            .collect();
        Ok(Rel::from_parts(
            TypeExpr::app(self.decl.clone(), src),
            TypeExpr::app(self.decl.clone(), tgt),
            pairs,
        ))
    }
}

/// One-shot `Ĝ rels x y`.
pub fn lift_check(decl: &str, mode: Mode, rels: &[Rel], x: &Term, y: &Term, env: &Env) -> Result<Judgment> {
    LiftEngine::new(env, decl, mode)?.check(rels, x, y)
}

/// One-shot materialization of `Ĝ rels` over values up to `depth`.
pub fn lift_relation(decl: &str, mode: Mode, rels: &[Rel], depth: usize, env: &Env) -> Result<Rel> {
    LiftEngine::new(env, decl, mode)?.relation(rels, depth)
}
