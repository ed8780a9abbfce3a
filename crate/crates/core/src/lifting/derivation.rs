use std::fmt::Write as _;
use std::sync::Arc;

use serde_json::{json, Value};

use super::interp::{image, lifted_type, materialize, Assign};
use crate::error::{Error, Result};
use crate::kernel::{instantiation, type_of, Env, Term, TypeExpr};
use crate::relations::{arrow_related, Rel};

/// One application of a derived lifting rule `ĉ`: the relations chosen
/// for the constructor's quantified variables and one premise per
/// constructor argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub decl: String,
    pub ctor: String,
    /// The relations being lifted, one per index of `decl`.
    pub rels: Vec<Rel>,
    pub left: Term,
    pub right: Term,
    /// Every quantified variable of `ctor`, in declaration order.
    pub chosen: Vec<(String, Rel)>,
    pub premises: Vec<Premise>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Premise {
    /// `(left, right) ∈ T̂(ρ)` for an argument type without data or arrows.
    Fact { ty: TypeExpr, rel: Rel, left: Term, right: Term },
    /// `(dom →̂ cod) left right`.
    Arrow { ty: TypeExpr, dom: Rel, cod: Rel, left: Term, right: Term },
    Pair(Box<Premise>, Box<Premise>),
    Lift(Arc<Derivation>),
}

/// The rule name `ĉlift` for constructor `c`.
pub fn rule_name(ctor: &str) -> String {
    let mut chars = ctor.chars();
    match chars.next() {
        Some(c) => format!("{c}\u{302}{}lift", chars.as_str()),
        None => "lift".into(),
    }
}

impl Derivation {
    pub fn rule(&self) -> String {
        rule_name(&self.ctor)
    }

    pub fn assignment(&self) -> Assign {
        self.chosen.iter().cloned().collect()
    }

    pub fn chosen_rel(&self, var: &str) -> Option<&Rel> {
        self.chosen.iter().find(|(v, _)| v == var).map(|(_, r)| r)
    }

    /// Sub-derivations in argument order.
    pub fn children(&self) -> Vec<&Derivation> {
        fn collect<'a>(p: &'a Premise, out: &mut Vec<&'a Derivation>) {
            match p {
                Premise::Lift(d) => out.push(d),
                Premise::Pair(l, r) => {
                    collect(l, out);
                    collect(r, out);
                }
                _ => {}
            }
        }
        let mut out = Vec::new();
        self.premises.iter().for_each(|p| collect(p, &mut out));
        out
    }

    /// Every arrow premise pushes its domain relation onto exactly its
    /// codomain relation, here and in all sub-derivations.
    pub fn is_exact(&self) -> bool {
        fn premise_exact(p: &Premise) -> bool {
            match p {
                Premise::Fact { .. } => true,
                Premise::Arrow { dom, cod, left, right, .. } => {
                    image(dom, left, right).as_ref() == Some(cod.pairs())
                }
                Premise::Pair(l, r) => premise_exact(l) && premise_exact(r),
                Premise::Lift(d) => d.is_exact(),
            }
        }
        self.premises.iter().all(premise_exact)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|d| d.size()).sum::<usize>()
    }

    /// Re-validates every rule application and leaf fact against `env`,
    /// without any search.
    pub fn replay(&self, env: &Env) -> Result<()> {
        let fail = |msg: String| Err(Error::ty(format!("replay of {}: {msg}", self.rule())));
        let Some((owner, sig)) = env.ctor(&self.ctor) else {
            return fail("unknown constructor".into());
        };
        if owner.name() != self.decl {
            return fail(format!("constructor belongs to `{}`", owner.name()));
        }
        let (
            Term::Con { ctor: lc, type_args: lt, args: la },
            Term::Con { ctor: rc, type_args: rt, args: ra },
        ) = (&self.left, &self.right)
        else {
            return fail("terms are not constructor applications".into());
        };
        if lc != &self.ctor || rc != &self.ctor {
            return fail(format!("heads {lc} and {rc} differ from the rule"));
        }
        type_of(&self.left, env)?;
        type_of(&self.right, env)?;
        let vars: Vec<&String> = self.chosen.iter().map(|(v, _)| v).collect();
        if vars.len() != sig.quantified.len() || vars.iter().zip(&sig.quantified).any(|(a, b)| *a != b) {
            return fail("chosen relations do not match the quantified variables".into());
        }
        let (ls, rs) = (instantiation(&sig.quantified, lt), instantiation(&sig.quantified, rt));
        for (v, r) in &self.chosen {
            if r.src() != &ls[v] || r.tgt() != &rs[v] {
                return fail(format!("relation for `{v}` is not between {} and {}", ls[v], rs[v]));
            }
            for (a, b) in r.pairs() {
                if &type_of(a, env)? != r.src() || &type_of(b, env)? != r.tgt() {
                    return fail(format!("ill-typed pair in the relation for `{v}`"));
                }
            }
        }
        let rho = self.assignment();
        if self.rels.len() != sig.ret_instance.len() {
            return fail("wrong number of index relations".into());
        }
        for (psi, r) in sig.ret_instance.iter().zip(&self.rels) {
            if &materialize(psi, &rho, env)? != r {
                return fail(format!("conclusion relation differs from {}", lifted_type(psi, &|v| v.to_string())));
            }
        }
        if self.premises.len() != sig.args.len() {
            return fail("wrong number of premises".into());
        }
        for (((ty, p), a), b) in sig.args.iter().zip(&self.premises).zip(la).zip(ra) {
            replay_premise(ty, &rho, a, b, p, env)?;
        }
        Ok(())
    }

    /// Nested notation: the rule, the relations chosen for its quantified
    /// variables, then its premises, with a legend naming the relations.
    pub fn pretty(&self) -> String {
        let mut names = Names::default();
        for r in &self.rels {
            names.name(r);
        }
        let mut out = String::new();
        write_node(self, 0, &mut names, &mut out);
        out.push_str("where\n");
        for (n, r) in &names.list {
            let _ = writeln!(out, "  {n} = {r}");
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule(),
            "decl": self.decl,
            "ctor": self.ctor,
            "left": self.left.to_string(),
            "right": self.right.to_string(),
            "relations": self.rels.iter().map(Rel::to_json).collect::<Vec<_>>(),
            "chosen": self.chosen.iter().map(|(v, r)| json!({"var": v, "relation": r.to_json()})).collect::<Vec<_>>(),
            "exact": self.is_exact(),
            "premises": self.premises.iter().map(premise_json).collect::<Vec<_>>(),
        })
    }
}

fn replay_premise(ty: &TypeExpr, rho: &Assign, a: &Term, b: &Term, p: &Premise, env: &Env) -> Result<()> {
    let fail = |msg: &str| Err(Error::ty(format!("replay of premise {ty}: {msg}")));
    match (ty, p) {
        (TypeExpr::App(g, idx), Premise::Lift(d)) => {
            if &d.decl != g || &d.left != a || &d.right != b {
                return fail("sub-derivation is about other terms");
            }
            let expected: Vec<Rel> = idx.iter().map(|t| materialize(t, rho, env)).collect::<Result<_>>()?;
            if d.rels != expected {
                return fail("sub-derivation lifts other relations");
            }
            d.replay(env)
        }
        (TypeExpr::Prod(l, r), Premise::Pair(pl, pr)) if ty.contains_app() => {
            let (Some((a1, a2)), Some((b1, b2))) = (a.components(), b.components()) else {
                return fail("arguments are not pairs");
            };
            replay_premise(l, rho, a1, b1, pl, env)?;
            replay_premise(r, rho, a2, b2, pr, env)
        }
        (TypeExpr::Arrow(d, c), Premise::Arrow { dom, cod, left, right, .. }) => {
            if left != a || right != b {
                return fail("arrow premise is about other functions");
            }
            if dom != &materialize(d, rho, env)? || cod != &materialize(c, rho, env)? {
                return fail("arrow premise uses other relations");
            }
            if !arrow_related(dom, cod, a, b) {
                return fail("functions are not related");
            }
            Ok(())
        }
        (_, Premise::Fact { rel, left, right, .. }) if !ty.contains_app() => {
            if left != a || right != b {
                return fail("fact is about other values");
            }
            if rel != &materialize(ty, rho, env)? {
                return fail("fact uses another relation");
            }
            if !rel.contains(a, b) {
                return fail("pair is not in the relation");
            }
            Ok(())
        }
        _ => fail("premise has the wrong shape"),
    }
}

#[derive(Default)]
struct Names {
    list: Vec<(String, Rel)>,
}

impl Names {
    /// The first relation is `R`; later ones are `R₁`, `R₂`, … in order
    /// of appearance.
    fn name(&mut self, r: &Rel) -> String {
        if let Some((n, _)) = self.list.iter().find(|(_, x)| x == r) {
            return n.clone();
        }
        let n = if self.list.is_empty() {
            "R".to_string()
        } else {
            format!("R{}", subscript(self.list.len()))
        };
        self.list.push((n.clone(), r.clone()));
        n
    }
}

fn subscript(k: usize) -> String {
    k.to_string()
        .chars()
        .map(|c| char::from_u32(0x2080 + c.to_digit(10).unwrap_or(0)).unwrap_or(c))
        .collect()
}

fn show_fun(t: &Term) -> String {
    if let Term::FinFun { dom, cod, table } = t {
        if dom == cod && table.iter().all(|(k, v)| k == v) {
            return "id".into();
        }
    }
    crate::parser::atom_term(t)
}

fn write_node(d: &Derivation, indent: usize, names: &mut Names, out: &mut String) {
    let pad = "  ".repeat(indent);
    let chosen: Vec<String> = d.chosen.iter().map(|(_, r)| names.name(r)).collect();
    let _ = writeln!(
        out,
        "{pad}{} {}  ⊢ {}lift {} {} {}",
        d.rule(),
        chosen.join(" "),
        d.decl,
        d.rels.iter().map(|r| names.name(r)).collect::<Vec<_>>().join(" "),
        crate::parser::brief_term(&d.left),
        crate::parser::brief_term(&d.right),
    );
    let rho: Vec<(String, String)> = d
        .chosen
        .iter()
        .map(|(v, r)| (v.clone(), names.name(r)))
        .collect();
    let lookup = |v: &str| {
        rho.iter()
            .find(|(x, _)| x == v)
            .map_or_else(|| v.to_string(), |(_, n)| n.clone())
    };
    for p in &d.premises {
        write_premise(p, indent + 1, names, &lookup, out);
    }
}

fn write_premise(p: &Premise, indent: usize, names: &mut Names, lookup: &dyn Fn(&str) -> String, out: &mut String) {
    let pad = "  ".repeat(indent);
    match p {
        Premise::Fact { ty, left, right, .. } => {
            let _ = writeln!(out, "{pad}{} {} {}", paren(&lifted_type(ty, lookup)), crate::parser::atom_term(left), crate::parser::atom_term(right));
        }
        Premise::Arrow { ty, dom, cod, left, right } => {
            let verdict = if image(dom, left, right).as_ref() == Some(cod.pairs()) {
                "equality"
            } else {
                "strict inclusion"
            };
            let _ = writeln!(
                out,
                "{pad}{} {} {}  [{verdict}]",
                paren(&lifted_type(ty, lookup)),
                show_fun(left),
                show_fun(right)
            );
        }
        Premise::Pair(l, r) => {
            write_premise(l, indent, names, lookup, out);
            write_premise(r, indent, names, lookup, out);
        }
        Premise::Lift(d) => write_node(d, indent, names, out),
    }
}

fn paren(s: &str) -> String {
    if s.contains(' ') {
        format!("({s})")
    } else {
        s.to_string()
    }
}

fn premise_json(p: &Premise) -> Value {
    match p {
        Premise::Fact { ty, rel, left, right } => json!({
            "kind": "fact", "type": ty.to_string(), "relation": rel.to_json(),
            "left": left.to_string(), "right": right.to_string(),
        }),
        Premise::Arrow { ty, dom, cod, left, right } => json!({
            "kind": "arrow", "type": ty.to_string(), "domain": dom.to_json(), "codomain": cod.to_json(),
            "left": left.to_string(), "right": right.to_string(),
            "equality": image(dom, left, right).as_ref() == Some(cod.pairs()),
        }),
        Premise::Pair(l, r) => json!({"kind": "pair", "left": premise_json(l), "right": premise_json(r)}),
        Premise::Lift(d) => json!({"kind": "lift", "derivation": d.to_json()}),
    }
}
