//! Finite proof-irrelevant relations and the primitive relational
//! actions: equality, singletons, graphs, products and function spaces.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::kernel::{carrier, type_of, Env, Term, TypeExpr};

/// A relation between two closed types, as a set of pairs. Two relations
/// are equal exactly when they relate the same elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rel {
    pub(crate) src: TypeExpr,
    pub(crate) tgt: TypeExpr,
    pub(crate) pairs: Arc<BTreeSet<(Term, Term)>>,
}

impl Rel {
    /// Builds a relation after checking every pair against `src × tgt`.
    pub fn new(
        src: TypeExpr,
        tgt: TypeExpr,
        pairs: impl IntoIterator<Item = (Term, Term)>,
        env: &Env,
    ) -> Result<Self> {
        let pairs: BTreeSet<(Term, Term)> = pairs.into_iter().collect();
        for (a, b) in &pairs {
            let (ta, tb) = (type_of(a, env)?, type_of(b, env)?);
            if ta != src || tb != tgt {
                return Err(Error::ty(format!(
                    "pair ({a}, {b}) has type {ta} × {tb}, expected {src} × {tgt}"
                )));
            }
        }
        Ok(Rel::from_parts(src, tgt, pairs))
    }

    pub(crate) fn from_parts(src: TypeExpr, tgt: TypeExpr, pairs: BTreeSet<(Term, Term)>) -> Self {
        Rel { src, tgt, pairs: Arc::new(pairs) }
    }

    pub fn empty(src: TypeExpr, tgt: TypeExpr) -> Self {
        Rel::from_parts(src, tgt, BTreeSet::new())
    }

    pub fn full(src: &TypeExpr, tgt: &TypeExpr, env: &Env) -> Result<Self> {
        let bs = carrier(tgt, env)?;
        let pairs = carrier(src, env)?
            .into_iter()
            .flat_map(|a| bs.iter().map(move |b| (a.clone(), b.clone())))
            .collect();
        Ok(Rel::from_parts(src.clone(), tgt.clone(), pairs))
    }

    pub fn src(&self) -> &TypeExpr {
        &self.src
    }

    pub fn tgt(&self) -> &TypeExpr {
        &self.tgt
    }

    pub fn pairs(&self) -> &BTreeSet<(Term, Term)> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, a: &Term, b: &Term) -> bool {
        if self.pairs.len() <= 32 {
            return self.pairs.iter().any(|(x, y)| x == a && y == b);
        }
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn without(&self, a: &Term, b: &Term) -> Rel {
        let mut pairs = (*self.pairs).clone();
        pairs.remove(&(a.clone(), b.clone()));
        Rel::from_parts(self.src.clone(), self.tgt.clone(), pairs)
    }

    /// Factors `R₁ ×̂ R₂ = self` read off from the projections. Only
    /// meaningful for a non-empty relation between product types.
    pub fn product_factors(&self) -> Option<(Rel, Rel)> {
        let (TypeExpr::Prod(a1, a2), TypeExpr::Prod(b1, b2)) = (&self.src, &self.tgt) else {
            return None;
        };
        if self.is_empty() {
            return None;
        }
        let mut left = BTreeSet::new();
        let mut right = BTreeSet::new();
        for (a, b) in self.pairs.iter() {
            let ((x1, x2), (y1, y2)) = (a.components()?, b.components()?);
            left.insert((x1.clone(), y1.clone()));
            right.insert((x2.clone(), y2.clone()));
        }
        let r1 = Rel::from_parts((**a1).clone(), (**b1).clone(), left);
        let r2 = Rel::from_parts((**a2).clone(), (**b2).clone(), right);
        (product_rel(&r1, &r2) == *self).then_some((r1, r2))
    }

    /// `{"src", "tgt", "pairs": [[left, right], ...]}` with pairs sorted.
    pub fn to_json(&self) -> Value {
        json!({
            "src": self.src.to_string(),
            "tgt": self.tgt.to_string(),
            "pairs": self.pairs.iter().map(|(a, b)| json!([a.to_string(), b.to_string()])).collect::<Vec<_>>(),
        })
    }
}

/// The diagonal on a type.
pub fn eq_rel(ty: &TypeExpr, env: &Env) -> Result<Rel> {
    let pairs = carrier(ty, env)?.into_iter().map(|a| (a.clone(), a)).collect();
    Ok(Rel::from_parts(ty.clone(), ty.clone(), pairs))
}

/// The singleton relation relating `a` to itself only.
pub fn delta(a: &Term, ty: &TypeExpr, env: &Env) -> Result<Rel> {
    let found = type_of(a, env)?;
    if &found != ty {
        return Err(Error::ty(format!("{a} has type {found}, not {ty}")));
    }
    Ok(Rel::from_parts(ty.clone(), ty.clone(), [(a.clone(), a.clone())].into()))
}

/// `{(a, f a)}` for a finite function table.
pub fn graph(f: &Term) -> Result<Rel> {
    match f {
        Term::FinFun { dom, cod, table } => Ok(Rel::from_parts(
            dom.clone(),
            cod.clone(),
            table.iter().map(|(a, b)| (a.clone(), b.clone())).collect(),
        )),
        other => Err(Error::ty(format!("{other} is not a function table"))),
    }
}

/// `R₁ ×̂ R₂`.
pub fn product_rel(r1: &Rel, r2: &Rel) -> Rel {
    let mut pairs = BTreeSet::new();
    for (a1, b1) in r1.pairs.iter() {
        for (a2, b2) in r2.pairs.iter() {
            pairs.insert((Term::pair(a1.clone(), a2.clone()), Term::pair(b1.clone(), b2.clone())));
        }
    }
    Rel::from_parts(
        TypeExpr::prod(r1.src.clone(), r2.src.clone()),
        TypeExpr::prod(r1.tgt.clone(), r2.tgt.clone()),
        pairs,
    )
}

/// Membership of `(f, g)` in `R →̂ S`.
pub fn arrow_related(r: &Rel, s: &Rel, f: &Term, g: &Term) -> bool {
    r.pairs.iter().all(|(a, b)| match (f.apply(a), g.apply(b)) {
        (Some(fa), Some(gb)) => s.contains(fa, gb),
        _ => false,
    })
}

/// `R ⊆ S` (relations between different types are never included).
pub fn includes(r: &Rel, s: &Rel) -> bool {
    r.src == s.src && r.tgt == s.tgt && r.pairs.is_subset(&s.pairs)
}

/// All relations between two carriers, addressed by bit masks: bit `k`
/// stands for the `k`-th pair in carrier order (source-major).
#[derive(Clone, Debug)]
pub struct RelUniverse {
    src: TypeExpr,
    tgt: TypeExpr,
    cells: Vec<(Term, Term)>,
}

impl RelUniverse {
    pub fn new(src: &TypeExpr, tgt: &TypeExpr, env: &Env) -> Result<Self> {
        let full = Rel::full(src, tgt, env)?;
        let bits = env.caps.max_rel_bits();
        if full.len() > bits || full.len() >= u64::BITS as usize {
            return Err(Error::caps(format!(
                "{} pairs between {src} and {tgt}: 2^{} relations exceed max_rel_enum {}",
                full.len(),
                full.len(),
                env.caps.max_rel_enum
            )));
        }
        Ok(RelUniverse {
            src: src.clone(),
            tgt: tgt.clone(),
            cells: full.pairs.iter().cloned().collect(),
        })
    }

    pub fn src(&self) -> &TypeExpr {
        &self.src
    }

    pub fn tgt(&self) -> &TypeExpr {
        &self.tgt
    }

    pub fn cells(&self) -> usize {
        self.cells.len()
    }

    /// Number of relations, `2^cells`.
    pub fn size(&self) -> u64 {
        1u64 << self.cells.len()
    }

    pub fn rel(&self, mask: u64) -> Rel {
        let pairs = self
            .cells
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect();
        Rel::from_parts(self.src.clone(), self.tgt.clone(), pairs)
    }

    pub fn mask(&self, rel: &Rel) -> Option<u64> {
        let mut m = 0u64;
        for p in rel.pairs.iter() {
            let k = self.cells.iter().position(|c| c == p)?;
            m |= 1 << k;
        }
        Some(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = Rel> + '_ {
        (0..self.size()).map(move |m| self.rel(m))
    }

    /// Masks ordered by number of pairs, then numerically.
    pub fn masks_by_size(&self) -> Vec<u64> {
        let mut masks: Vec<u64> = (0..self.size()).collect();
        masks.sort_by_key(|m| (m.count_ones(), *m));
        masks
    }
}

/// Every relation between `a` and `b`, in mask order.
pub fn enumerate_rels(a: &TypeExpr, b: &TypeExpr, env: &Env) -> Result<impl Iterator<Item = Rel>> {
    let universe = RelUniverse::new(a, b, env)?;
    Ok((0..universe.size()).map(move |m| universe.rel(m)))
}
