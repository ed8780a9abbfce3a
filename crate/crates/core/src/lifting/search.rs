//! Deciding `Ĝ R̄ x y` by searching for the relations a rule quantifies
//! over.
//!
//! A rule for `c : ∀ᾱ. Φ → G Ψ̄` holds of `c x̄` and `c ȳ` when some
//! assignment `ρ` of relations to `ᾱ` makes every `Φ̂ₖ(ρ) xₖ yₖ` hold and
//! `Ψ̂ⱼ(ρ) = Rⱼ`. Variables fixed by inverting `Ψ̂` are taken from there;
//! the remaining ones are searched:
//!
//! 1. a preferred candidate, which for each variable takes the factor of
//!    the relation its arrow premise pulls back from the conclusion when
//!    that yields exact sub-derivations, and the least workable relation
//!    otherwise;
//! 2. the least candidate, when every premise is monotone or antitone in
//!    each searched variable and the data types involved have monotone
//!    liftings. Any solution then contains it, so its failure is final;
//! 3. otherwise every assignment, smallest first, within `max_rel_enum`.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use super::derivation::{Derivation, Premise};
use super::interp::{image, materialize, polarity, Assign, Polarity};
use crate::completion::returns_distinct_vars;
use crate::error::Error;
use crate::kernel::{carrier, instantiation, CtorSig, Env, Subst, Term, TypeExpr};
use crate::relations::{arrow_related, eq_rel, Rel, RelUniverse};

#[derive(Clone, Debug)]
pub enum Outcome {
    Related(Arc<Derivation>),
    NotRelated,
    /// The search would exceed a resource cap.
    Inconclusive(String),
}

impl Outcome {
    pub fn is_related(&self) -> bool {
        matches!(self, Outcome::Related(_))
    }

    fn from_error(e: Error) -> Outcome {
        Outcome::Inconclusive(e.to_string())
    }
}

enum Least {
    Found(Assign),
    Impossible,
    Unknown,
}

enum Check {
    Holds(Premise),
    Fails,
    Inconclusive(String),
}

type Bucket<V> = Vec<(Vec<Rel>, Term, Term, V)>;

pub(crate) struct Lifter {
    env: Arc<Env>,
    monotone: BTreeMap<String, bool>,
    memo: Mutex<HashMap<u64, Bucket<Outcome>>>,
    least_memo: Mutex<HashMap<u64, Bucket<Option<Vec<Rel>>>>>,
}

fn key(decl: &str, rels: &[Rel], x: &Term, y: &Term) -> u64 {
    let mut h = DefaultHasher::new();
    (decl, rels, x, y).hash(&mut h);
    h.finish()
}

fn rel_of(set: &BTreeSet<(Term, Term)>, v: &str, ls: &Subst, rs: &Subst) -> Rel {
    Rel::from_parts(ls[v].clone(), rs[v].clone(), set.clone())
}

fn merge(a: &Assign, b: &Assign) -> Option<Assign> {
    let mut out = a.clone();
    for (k, v) in b {
        match out.get(k) {
            Some(existing) if existing != v => return None,
            _ => {
                out.insert(k.clone(), v.clone());
            }
        }
    }
    Some(out)
}

impl Lifter {
    pub(crate) fn new(env: Arc<Env>) -> Self {
        let mut monotone = BTreeMap::new();
        for d in env.decls() {
            let m = is_monotone(&env, d.name(), &mut BTreeSet::new());
            monotone.insert(d.name().to_string(), m);
        }
        Lifter {
            env,
            monotone,
            memo: Mutex::new(HashMap::new()),
            least_memo: Mutex::new(HashMap::new()),
        }
    }

    pub(crate) fn env(&self) -> &Env {
        &self.env
    }

    /// Decides `Ĝ rels x y` without consulting or filling the memo at
    /// this level (sub-judgments are memoized).
    pub(crate) fn check(&self, decl: &str, rels: &[Rel], x: &Term, y: &Term) -> Outcome {
        self.lift_uncached(decl, rels, x, y, true)
    }

    /// Like [`Lifter::check`], but at this level settles for the least
    /// candidate when there is one instead of looking for exact
    /// sub-derivations. Same verdict, plainer witness.
    pub(crate) fn decide(&self, decl: &str, rels: &[Rel], x: &Term, y: &Term) -> Outcome {
        self.lift_uncached(decl, rels, x, y, false)
    }

    fn lift(&self, decl: &str, rels: &[Rel], x: &Term, y: &Term) -> Outcome {
        let k = key(decl, rels, x, y);
        if let Some(bucket) = self.memo.lock().expect("memo lock").get(&k) {
            if let Some((.., o)) = bucket.iter().find(|(r, a, b, _)| r == rels && a == x && b == y) {
                return o.clone();
            }
        }
        let out = self.lift_uncached(decl, rels, x, y, true);
        self.memo
            .lock()
            .expect("memo lock")
            .entry(k)
            .or_default()
            .push((rels.to_vec(), x.clone(), y.clone(), out.clone()));
        out
    }

    fn lift_uncached(&self, decl: &str, rels: &[Rel], x: &Term, y: &Term, prefer: bool) -> Outcome {
        let (
            Term::Con { ctor: lc, type_args: lt, args: la },
            Term::Con { ctor: rc, type_args: rt, args: ra },
        ) = (x, y)
        else {
            return Outcome::NotRelated;
        };
        if lc != rc {
            return Outcome::NotRelated;
        }
        let Some((owner, sig)) = self.env.ctor(lc) else {
            return Outcome::NotRelated;
        };
        if owner.name() != decl || sig.ret_instance.len() != rels.len() {
            return Outcome::NotRelated;
        }
        let ls = instantiation(&sig.quantified, lt);
        let rs = instantiation(&sig.quantified, rt);
        for (psi, r) in sig.ret_instance.iter().zip(rels) {
            if r.src() != &psi.subst(&ls) || r.tgt() != &psi.subst(&rs) {
                return Outcome::NotRelated;
            }
        }
        let mut alternatives = vec![Assign::new()];
        for (psi, r) in sig.ret_instance.iter().zip(rels) {
            let alts = match self.invert(psi, r) {
                Ok(a) => a,
                Err(e) => return Outcome::from_error(e),
            };
            alternatives = alternatives
                .iter()
                .flat_map(|a| alts.iter().filter_map(move |b| merge(a, b)))
                .collect();
        }
        let ctx = Ctx { decl, sig, rels, x, y, la, ra, ls: &ls, rs: &rs, prefer };
        let mut inconclusive = None;
        for rho0 in alternatives {
            match self.solve(&ctx, rho0) {
                Outcome::Related(d) => return Outcome::Related(d),
                Outcome::NotRelated => {}
                Outcome::Inconclusive(m) => inconclusive = Some(m),
            }
        }
        inconclusive.map_or(Outcome::NotRelated, Outcome::Inconclusive)
    }

    /// Assignments making `pat̂(ρ) = r` for invertible patterns; a
    /// non-invertible pattern yields the empty assignment and is checked
    /// once all variables are chosen.
    fn invert(&self, pat: &TypeExpr, r: &Rel) -> Result<Vec<Assign>, Error> {
        Ok(match pat {
            TypeExpr::Var(v) => vec![Assign::from([(v.clone(), r.clone())])],
            TypeExpr::Bool | TypeExpr::Unit => {
                if r == &eq_rel(pat, &self.env)? {
                    vec![Assign::new()]
                } else {
                    Vec::new()
                }
            }
            TypeExpr::Prod(p1, p2) => {
                let (TypeExpr::Prod(a1, a2), TypeExpr::Prod(b1, b2)) = (r.src(), r.tgt()) else {
                    return Ok(Vec::new());
                };
                if r.is_empty() {
                    let mut out = self.invert(p1, &Rel::empty((**a1).clone(), (**b1).clone()))?;
                    out.extend(self.invert(p2, &Rel::empty((**a2).clone(), (**b2).clone()))?);
                    out
                } else if let Some((r1, r2)) = r.product_factors() {
                    let (x1, x2) = (self.invert(p1, &r1)?, self.invert(p2, &r2)?);
                    x1.iter()
                        .flat_map(|a| x2.iter().filter_map(move |b| merge(a, b)))
                        .collect()
                } else {
                    Vec::new()
                }
            }
            TypeExpr::Arrow(..) | TypeExpr::App(..) => vec![Assign::new()],
        })
    }

    fn solve(&self, ctx: &Ctx<'_>, rho0: Assign) -> Outcome {
        let sig = ctx.sig;
        let free: Vec<String> = sig
            .quantified
            .iter()
            .filter(|v| !rho0.contains_key(*v))
            .cloned()
            .collect();
        let mentions_free = |ty: &TypeExpr| free.iter().any(|v| polarity(ty, v) != Polarity::Absent);
        for (k, ty) in sig.args.iter().enumerate() {
            if !mentions_free(ty) {
                match self.premise(ty, &rho0, &ctx.la[k], &ctx.ra[k]) {
                    Check::Holds(_) => {}
                    Check::Fails => return Outcome::NotRelated,
                    Check::Inconclusive(m) => return Outcome::Inconclusive(m),
                }
            }
        }
        if free.is_empty() {
            return self.finish(ctx, &rho0);
        }
        let in_conclusion = sig.ret_instance.iter().any(&mentions_free);
        let pending: Vec<usize> = (0..sig.args.len()).filter(|&k| mentions_free(&sig.args[k])).collect();
        let least = if in_conclusion {
            Least::Unknown
        } else {
            self.least(sig, &free, &rho0, ctx.ls, ctx.rs, ctx.la, ctx.ra, &pending)
        };
        let least = match least {
            Least::Impossible => return Outcome::NotRelated,
            Least::Found(a) => Some(a),
            Least::Unknown => None,
        };
        let prefer = ctx.prefer || least.is_none();
        if let Some(cand) = prefer.then(|| self.preferred(ctx, &free, &rho0, least.as_ref())).flatten() {
            if let o @ Outcome::Related(_) = self.finish(ctx, &cand) {
                return o;
            }
        }
        if let Some(l) = least {
            let rho = merge(&rho0, &l).expect("disjoint variables");
            return self.finish(ctx, &rho);
        }
        self.exhaustive(ctx, &free, &rho0)
    }

    fn finish(&self, ctx: &Ctx<'_>, rho: &Assign) -> Outcome {
        let sig = ctx.sig;
        for (psi, r) in sig.ret_instance.iter().zip(ctx.rels) {
            let ok = match psi {
                TypeExpr::Var(v) => rho.get(v) == Some(r),
                _ => match materialize(psi, rho, &self.env) {
                    Ok(m) => &m == r,
                    Err(e) => return Outcome::from_error(e),
                },
            };
            if !ok {
                return Outcome::NotRelated;
            }
        }
        let mut premises = Vec::with_capacity(sig.args.len());
        for (k, ty) in sig.args.iter().enumerate() {
            match self.premise(ty, rho, &ctx.la[k], &ctx.ra[k]) {
                Check::Holds(p) => premises.push(p),
                Check::Fails => return Outcome::NotRelated,
                Check::Inconclusive(m) => return Outcome::Inconclusive(m),
            }
        }
        Outcome::Related(Arc::new(Derivation {
            decl: ctx.decl.to_string(),
            ctor: sig.name.clone(),
            rels: ctx.rels.to_vec(),
            left: ctx.x.clone(),
            right: ctx.y.clone(),
            chosen: sig.quantified.iter().map(|v| (v.clone(), rho[v].clone())).collect(),
            premises,
        }))
    }

    fn premise(&self, ty: &TypeExpr, rho: &Assign, a: &Term, b: &Term) -> Check {
        match ty {
            TypeExpr::App(g, idx) => {
                let rels: Result<Vec<Rel>, Error> = idx.iter().map(|t| materialize(t, rho, &self.env)).collect();
                match rels {
                    Err(e) => Check::Inconclusive(e.to_string()),
                    Ok(rels) => match self.lift(g, &rels, a, b) {
                        Outcome::Related(d) => Check::Holds(Premise::Lift(d)),
                        Outcome::NotRelated => Check::Fails,
                        Outcome::Inconclusive(m) => Check::Inconclusive(m),
                    },
                }
            }
            TypeExpr::Prod(l, r) if ty.contains_app() => {
                let (Some((a1, a2)), Some((b1, b2))) = (a.components(), b.components()) else {
                    return Check::Fails;
                };
                let pl = match self.premise(l, rho, a1, b1) {
                    Check::Holds(p) => p,
                    other => return other,
                };
                match self.premise(r, rho, a2, b2) {
                    Check::Holds(pr) => Check::Holds(Premise::Pair(Box::new(pl), Box::new(pr))),
                    other => other,
                }
            }
            TypeExpr::Arrow(d, c) => {
                let (dom, cod) = match (materialize(d, rho, &self.env), materialize(c, rho, &self.env)) {
                    (Ok(d), Ok(c)) => (d, c),
                    (Err(e), _) | (_, Err(e)) => return Check::Inconclusive(e.to_string()),
                };
                if arrow_related(&dom, &cod, a, b) {
                    Check::Holds(Premise::Arrow { ty: ty.clone(), dom, cod, left: a.clone(), right: b.clone() })
                } else {
                    Check::Fails
                }
            }
            _ => {
                let holds = match ty {
                    TypeExpr::Var(v) => rho.get(v).is_some_and(|r| r.contains(a, b)),
                    TypeExpr::Bool | TypeExpr::Unit => a == b,
                    _ => match materialize(ty, rho, &self.env) {
                        Ok(r) => r.contains(a, b),
                        Err(e) => return Check::Inconclusive(e.to_string()),
                    },
                };
                if !holds {
                    return Check::Fails;
                }
                match materialize(ty, rho, &self.env) {
                    Ok(rel) => Check::Holds(Premise::Fact { ty: ty.clone(), rel, left: a.clone(), right: b.clone() }),
                    Err(e) => Check::Inconclusive(e.to_string()),
                }
            }
        }
    }

    /// The least assignment to `free` satisfying the premises in
    /// `pending`, processed so that every variable occurring negatively
    /// in a premise is settled before that premise is used.
    #[allow(clippy::too_many_arguments)]
    fn least(
        &self,
        sig: &CtorSig,
        free: &[String],
        rho0: &Assign,
        ls: &Subst,
        rs: &Subst,
        la: &[Term],
        ra: &[Term],
        pending: &[usize],
    ) -> Least {
        let mut pol: Vec<BTreeMap<&str, Polarity>> = Vec::new();
        for ty in &sig.args {
            let mut m = BTreeMap::new();
            for v in free {
                match polarity(ty, v) {
                    Polarity::Mixed => return Least::Unknown,
                    Polarity::Absent => {}
                    p => {
                        m.insert(v.as_str(), p);
                    }
                }
            }
            pol.push(m);
        }
        let mut st = LeastState {
            free: free.iter().map(String::as_str).collect(),
            settled: BTreeSet::new(),
            req: free.iter().map(|v| (v.clone(), BTreeSet::new())).collect(),
            rho0,
            ls,
            rs,
        };
        let mut pending: Vec<usize> = pending.to_vec();
        while !pending.is_empty() {
            let positive_somewhere = |v: &str, pending: &[usize]| {
                pending.iter().any(|&k| pol[k].get(v) == Some(&Polarity::Pos))
            };
            let ready = pending.iter().position(|&k| {
                pol[k]
                    .iter()
                    .filter(|(_, p)| **p == Polarity::Neg)
                    .all(|(v, _)| !positive_somewhere(v, &pending))
            });
            let Some(i) = ready else {
                return Least::Unknown;
            };
            let k = pending.remove(i);
            for v in free {
                if !positive_somewhere(v, &pending) {
                    st.settled.insert(v.as_str());
                }
            }
            match self.require(&sig.args[k], &la[k], &ra[k], &mut st) {
                Ok(()) => {}
                Err(l) => return l,
            }
        }
        Least::Found(free.iter().map(|v| (v.clone(), rel_of(&st.req[v], v, ls, rs))).collect())
    }

    fn require(&self, ty: &TypeExpr, a: &Term, b: &Term, st: &mut LeastState<'_>) -> Result<(), Least> {
        match ty {
            TypeExpr::Var(v) if st.free.contains(v.as_str()) => {
                st.req.get_mut(v).expect("free variable").insert((a.clone(), b.clone()));
                Ok(())
            }
            TypeExpr::Var(v) => match st.rho0.get(v) {
                Some(r) if r.contains(a, b) => Ok(()),
                Some(_) => Err(Least::Impossible),
                None => Err(Least::Unknown),
            },
            TypeExpr::Bool | TypeExpr::Unit => {
                if a == b {
                    Ok(())
                } else {
                    Err(Least::Impossible)
                }
            }
            TypeExpr::Prod(l, r) => {
                let (Some((a1, a2)), Some((b1, b2))) = (a.components(), b.components()) else {
                    return Err(Least::Impossible);
                };
                self.require(l, a1, b1, st)?;
                self.require(r, a2, b2, st)
            }
            TypeExpr::Arrow(d, c) => {
                if d.free_vars().iter().any(|v| st.free.contains(v.as_str()) && !st.settled.contains(v.as_str())) {
                    return Err(Least::Unknown);
                }
                let dr = materialize(d, &st.current(), &self.env).map_err(|_| Least::Unknown)?;
                for (x, y) in dr.pairs() {
                    let (Some(fx), Some(gy)) = (a.apply(x), b.apply(y)) else {
                        return Err(Least::Impossible);
                    };
                    self.require(c, fx, gy, st)?;
                }
                Ok(())
            }
            TypeExpr::App(g, idx) => {
                if !idx.iter().any(|t| t.free_vars().iter().any(|v| st.free.contains(v.as_str()))) {
                    let rels: Vec<Rel> = idx
                        .iter()
                        .map(|t| materialize(t, &st.current(), &self.env))
                        .collect::<Result<_, _>>()
                        .map_err(|_| Least::Unknown)?;
                    return match self.lift(g, &rels, a, b) {
                        Outcome::Related(_) => Ok(()),
                        Outcome::NotRelated => Err(Least::Impossible),
                        Outcome::Inconclusive(_) => Err(Least::Unknown),
                    };
                }
                if !self.monotone.get(g).copied().unwrap_or(false) {
                    return Err(Least::Unknown);
                }
                match self.least_vec(g, a, b) {
                    Some(Some(ls)) => {
                        for (t, l) in idx.iter().zip(ls) {
                            self.require_rel(t, l.pairs(), st)?;
                        }
                        Ok(())
                    }
                    Some(None) => Err(Least::Impossible),
                    None => Err(Least::Unknown),
                }
            }
        }
    }

    fn require_rel(&self, ty: &TypeExpr, set: &BTreeSet<(Term, Term)>, st: &mut LeastState<'_>) -> Result<(), Least> {
        match ty {
            TypeExpr::Var(v) if st.free.contains(v.as_str()) => {
                st.req.get_mut(v).expect("free variable").extend(set.iter().cloned());
                Ok(())
            }
            TypeExpr::Prod(l, r) if !set.is_empty() => {
                let mut left = BTreeSet::new();
                let mut right = BTreeSet::new();
                for (a, b) in set {
                    let (Some((a1, a2)), Some((b1, b2))) = (a.components(), b.components()) else {
                        return Err(Least::Impossible);
                    };
                    left.insert((a1.clone(), b1.clone()));
                    right.insert((a2.clone(), b2.clone()));
                }
                self.require_rel(l, &left, st)?;
                self.require_rel(r, &right, st)
            }
            _ if ty.free_vars().iter().all(|v| !st.free.contains(v.as_str())) => {
                let r = materialize(ty, &st.current(), &self.env).map_err(|_| Least::Unknown)?;
                if set.is_subset(r.pairs()) {
                    Ok(())
                } else {
                    Err(Least::Impossible)
                }
            }
            _ => Err(Least::Unknown),
        }
    }

    /// The least index relations lifting to a relation between `x` and
    /// `y` in a monotone data type: `Some(None)` when none do, `None`
    /// when this cannot be computed.
    fn least_vec(&self, g: &str, x: &Term, y: &Term) -> Option<Option<Vec<Rel>>> {
        let k = key(g, &[], x, y);
        if let Some(bucket) = self.least_memo.lock().expect("memo lock").get(&k) {
            if let Some((.., v)) = bucket.iter().find(|(_, a, b, _)| a == x && b == y) {
                return Some(v.clone());
            }
        }
        let out = self.least_vec_uncached(g, x, y)?;
        self.least_memo
            .lock()
            .expect("memo lock")
            .entry(k)
            .or_default()
            .push((Vec::new(), x.clone(), y.clone(), out.clone()));
        Some(out)
    }

    fn least_vec_uncached(&self, g: &str, x: &Term, y: &Term) -> Option<Option<Vec<Rel>>> {
        let (
            Term::Con { ctor: lc, type_args: lt, args: la },
            Term::Con { ctor: rc, type_args: rt, args: ra },
        ) = (x, y)
        else {
            return Some(None);
        };
        if lc != rc {
            return Some(None);
        }
        let (owner, sig) = self.env.ctor(lc)?;
        if owner.name() != g || !returns_distinct_vars(sig) {
            return None;
        }
        let ls = instantiation(&sig.quantified, lt);
        let rs = instantiation(&sig.quantified, rt);
        let all: Vec<usize> = (0..sig.args.len()).collect();
        match self.least(sig, &sig.quantified, &Assign::new(), &ls, &rs, la, ra, &all) {
            Least::Found(a) => Some(Some(
                sig.ret_instance
                    .iter()
                    .map(|t| match t {
                        TypeExpr::Var(v) => a[v].clone(),
                        _ => unreachable!("distinct variables"),
                    })
                    .collect(),
            )),
            Least::Impossible => Some(None),
            Least::Unknown => None,
        }
    }

    /// For each searched variable bound by the domain of an arrow premise
    /// whose codomain relation is already known, the corresponding factor
    /// of the pulled-back relation, kept when the premises using the
    /// variable then have exact derivations; otherwise the least relation.
    fn preferred(&self, ctx: &Ctx<'_>, free: &[String], rho0: &Assign, least: Option<&Assign>) -> Option<Assign> {
        let sig = ctx.sig;
        let mut maximal: BTreeMap<String, Option<Rel>> = BTreeMap::new();
        for (k, ty) in sig.args.iter().enumerate() {
            let TypeExpr::Arrow(d, c) = ty else { continue };
            let dvars = d.free_vars();
            if dvars.is_empty() || !dvars.iter().all(|v| free.contains(v)) || !var_pattern(d) {
                continue;
            }
            let factor = if c.free_vars().iter().all(|v| rho0.contains_key(v)) {
                self.pullback(d, c, rho0, ctx.ls, ctx.rs, &ctx.la[k], &ctx.ra[k])
            } else {
                None
            };
            for v in dvars {
                let entry = maximal.entry(v.clone()).or_insert_with(|| factor.as_ref().and_then(|f| f.get(&v).cloned()));
                if factor.is_none() {
                    *entry = None;
                }
            }
        }
        let mut cand = rho0.clone();
        if let Some(l) = least {
            cand.extend(l.iter().map(|(k, v)| (k.clone(), v.clone())));
        }
        for v in free {
            let Some(Some(m)) = maximal.get(v) else {
                if least.is_none() {
                    return None;
                }
                continue;
            };
            let mut trial = cand.clone();
            trial.insert(v.clone(), m.clone());
            let uses: Vec<usize> = (0..sig.args.len())
                .filter(|&k| polarity(&sig.args[k], v) == Polarity::Pos)
                .collect();
            let mut exact = true;
            for k in uses {
                if sig.args[k].free_vars().iter().any(|w| w != v && free.contains(w) && !trial.contains_key(w)) {
                    exact = false;
                    break;
                }
                match self.premise(&sig.args[k], &trial, &ctx.la[k], &ctx.ra[k]) {
                    Check::Holds(p) if premise_exact(&p) => {}
                    _ => {
                        exact = false;
                        break;
                    }
                }
            }
            if exact {
                cand.insert(v.clone(), m.clone());
            } else if least.is_none() {
                return None;
            }
        }
        free.iter().all(|v| cand.contains_key(v)).then_some(cand)
    }

    #[allow(clippy::too_many_arguments)]
    fn pullback(
        &self,
        d: &TypeExpr,
        c: &TypeExpr,
        rho0: &Assign,
        ls: &Subst,
        rs: &Subst,
        f: &Term,
        g: &Term,
    ) -> Option<Assign> {
        let cod = materialize(c, rho0, &self.env).ok()?;
        let (src, tgt) = (d.subst(ls), d.subst(rs));
        let bs = carrier(&tgt, &self.env).ok()?;
        let mut pairs = BTreeSet::new();
        for a in carrier(&src, &self.env).ok()? {
            let fa = f.apply(&a)?;
            for b in &bs {
                if cod.contains(fa, g.apply(b)?) {
                    pairs.insert((a.clone(), b.clone()));
                }
            }
        }
        let p = Rel::from_parts(src, tgt, pairs);
        let mut alts = self.invert(d, &p).ok()?;
        (alts.len() == 1).then(|| alts.pop().expect("one alternative"))
    }

    fn exhaustive(&self, ctx: &Ctx<'_>, free: &[String], rho0: &Assign) -> Outcome {
        let mut universes = Vec::new();
        let mut total: usize = 1;
        for v in free {
            let u = match RelUniverse::new(&ctx.ls[v], &ctx.rs[v], &self.env) {
                Ok(u) => u,
                Err(e) => return Outcome::from_error(e),
            };
            total = match usize::try_from(u.size()).ok().and_then(|s| total.checked_mul(s)) {
                Some(t) if t <= self.env.caps.max_rel_enum => t,
                _ => {
                    return Outcome::Inconclusive(format!(
                        "choosing relations for {} needs more than max_rel_enum = {} candidates",
                        free.join(", "),
                        self.env.caps.max_rel_enum
                    ))
                }
            };
            universes.push(u);
        }
        let mut combos: Vec<Vec<u64>> = vec![Vec::new()];
        for u in &universes {
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    (0..u.size()).map(move |m| {
                        let mut p = prefix.clone();
                        p.push(m);
                        p
                    })
                })
                .collect();
        }
        combos.sort_by_key(|c| (c.iter().map(|m| m.count_ones()).sum::<u32>(), c.clone()));
        let mut inconclusive = None;
        for combo in combos {
            let mut rho = rho0.clone();
            for ((v, u), m) in free.iter().zip(&universes).zip(combo) {
                rho.insert(v.clone(), u.rel(m));
            }
            match self.finish(ctx, &rho) {
                o @ Outcome::Related(_) => return o,
                Outcome::NotRelated => {}
                Outcome::Inconclusive(m) => inconclusive = Some(m),
            }
        }
        inconclusive.map_or(Outcome::NotRelated, Outcome::Inconclusive)
    }
}

struct Ctx<'a> {
    decl: &'a str,
    sig: &'a CtorSig,
    rels: &'a [Rel],
    x: &'a Term,
    y: &'a Term,
    la: &'a [Term],
    ra: &'a [Term],
    ls: &'a Subst,
    rs: &'a Subst,
    prefer: bool,
}

struct LeastState<'a> {
    free: BTreeSet<&'a str>,
    settled: BTreeSet<&'a str>,
    req: BTreeMap<String, BTreeSet<(Term, Term)>>,
    rho0: &'a Assign,
    ls: &'a Subst,
    rs: &'a Subst,
}

impl LeastState<'_> {
    /// Fixed relations plus the settled searched ones.
    fn current(&self) -> Assign {
        let mut out = self.rho0.clone();
        for v in &self.settled {
            out.insert(v.to_string(), rel_of(&self.req[*v], v, self.ls, self.rs));
        }
        out
    }
}

fn premise_exact(p: &Premise) -> bool {
    match p {
        Premise::Fact { .. } => true,
        Premise::Arrow { dom, cod, left, right, .. } => image(dom, left, right).as_ref() == Some(cod.pairs()),
        Premise::Pair(l, r) => premise_exact(l) && premise_exact(r),
        Premise::Lift(d) => d.is_exact(),
    }
}

/// Products of distinct variables.
fn var_pattern(ty: &TypeExpr) -> bool {
    fn go(ty: &TypeExpr, seen: &mut BTreeSet<String>) -> bool {
        match ty {
            TypeExpr::Var(v) => seen.insert(v.clone()),
            TypeExpr::Prod(l, r) => go(l, seen) && go(r, seen),
            _ => false,
        }
    }
    go(ty, &mut BTreeSet::new())
}

/// Every constructor returns distinct variables, each occurring only
/// covariantly in the arguments, and the other data types used are
/// monotone too.
fn is_monotone(env: &Env, name: &str, visiting: &mut BTreeSet<String>) -> bool {
    if !visiting.insert(name.to_string()) {
        return true;
    }
    let Some(decl) = env.decl(name) else { return false };
    decl.decl.ctors.iter().all(|sig| {
        returns_distinct_vars(sig)
            && sig.ret_instance.iter().all(|t| {
                let TypeExpr::Var(v) = t else { return false };
                sig.args
                    .iter()
                    .all(|a| matches!(polarity(a, v), Polarity::Absent | Polarity::Pos))
            })
            && sig.args.iter().all(|a| apps(a).iter().all(|g| is_monotone(env, g, visiting)))
    })
}

fn apps(ty: &TypeExpr) -> Vec<String> {
    match ty {
        TypeExpr::Var(_) | TypeExpr::Bool | TypeExpr::Unit => Vec::new(),
        TypeExpr::Prod(l, r) | TypeExpr::Arrow(l, r) => {
            let mut v = apps(l);
            v.extend(apps(r));
            v
        }
        TypeExpr::App(g, args) => {
            let mut v = vec![g.clone()];
            args.iter().for_each(|a| v.extend(apps(a)));
            v
        }
    }
}
