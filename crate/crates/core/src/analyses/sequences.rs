use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernel::{CheckedDecl, Env, Term, TypeExpr};

/// The constructors of a declaration shaped like
/// `Seq`: `inj : ∀{α} → α → Seq α` and
/// `pairing : ∀{α₁ α₂} → Seq α₁ → Seq α₂ → Seq (α₁ × α₂)`, under any
/// names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqShape {
    pub decl: String,
    pub inj: String,
    pub pairing: String,
}

impl SeqShape {
    pub fn of(decl: &CheckedDecl) -> Result<SeqShape> {
        let name = decl.name();
        let (mut inj, mut pairing) = (None, None);
        for c in &decl.decl.ctors {
            let var = |i: usize| TypeExpr::var(c.quantified.get(i).cloned().unwrap_or_default());
            if c.quantified.len() == 1 && c.args == [var(0)] && c.ret_instance == [var(0)] {
                inj = Some(c.name.clone());
            } else if c.quantified.len() == 2
                && c.args == [TypeExpr::app(name, vec![var(0)]), TypeExpr::app(name, vec![var(1)])]
                && c.ret_instance == [TypeExpr::prod(var(0), var(1))]
            {
                pairing = Some(c.name.clone());
            }
        }
        match (inj, pairing) {
            (Some(inj), Some(pairing)) if decl.decl.ctors.len() == 2 => Ok(SeqShape {
                decl: name.to_string(),
                inj,
                pairing,
            }),
            _ => Err(Error::unsupported(format!(
                "`{name}` does not have the shape of Seq (one injection and one pairing constructor)"
            ))),
        }
    }

    pub fn in_env(env: &Env, decl: &str) -> Result<SeqShape> {
        SeqShape::of(env.require_decl(decl)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Mappable {
    Defined(Term),
    NotMappable(String),
}

/// Splits `f : A₁ × A₂ → B₁ × B₂` into `f₁ × f₂` when its table has that
/// form.
fn split(f: &Term) -> std::result::Result<(Term, Term), String> {
    let Term::FinFun { dom, cod, table } = f else {
        return Err(format!("{f} is not a function table"));
    };
    let (TypeExpr::Prod(d1, d2), TypeExpr::Prod(c1, c2)) = (dom, cod) else {
        return Err(format!("{dom} → {cod} is not a map between products"));
    };
    let (mut t1, mut t2) = (BTreeMap::new(), BTreeMap::new());
    for (a, b) in table.iter() {
        let (Some((a1, a2)), Some((b1, b2))) = (a.components(), b.components()) else {
            return Err(format!("{a} ↦ {b} is not between pairs"));
        };
        for (t, k, v, side) in [(&mut t1, a1, b1, "first"), (&mut t2, a2, b2, "second")] {
            if let Some(prev) = t.insert(k.clone(), v.clone()) {
                if &prev != v {
                    return Err(format!(
                        "the {side} component of the result for {k} is both {prev} and {v}, so the function is not a product"
                    ));
                }
            }
        }
    }
    Ok((
        Term::fun((**d1).clone(), (**c1).clone(), t1),
        Term::fun((**d2).clone(), (**c2).clone(), t2),
    ))
}

/// Structural mappability: any `f` maps over `inj a`, and `f` maps over
/// `pairing s₁ s₂` when it is `f₁ × f₂` with `fᵢ` mappable over `sᵢ`.
pub fn mappable_structural(shape: &SeqShape, f: &Term, s: &Term) -> Result<Mappable> {
    let Term::FinFun { cod, .. } = f else {
        return Err(Error::ty(format!("{f} is not a function table")));
    };
    let Term::Con { ctor, args, .. } = s else {
        return Err(Error::ty(format!("{s} is not a value of `{}`", shape.decl)));
    };
    if ctor == &shape.inj {
        let b = f
            .apply(&args[0])
            .ok_or_else(|| Error::ty(format!("{} is outside the domain of the function", args[0])))?;
        return Ok(Mappable::Defined(Term::con(ctor.clone(), vec![cod.clone()], vec![b.clone()])));
    }
    if ctor != &shape.pairing {
        return Err(Error::ty(format!("{s} is not a value of `{}`", shape.decl)));
    }
    let (f1, f2) = match split(f) {
        Ok(p) => p,
        Err(why) => return Ok(Mappable::NotMappable(why)),
    };
    let r1 = match mappable_structural(shape, &f1, &args[0])? {
        Mappable::Defined(t) => t,
        no => return Ok(no),
    };
    let r2 = match mappable_structural(shape, &f2, &args[1])? {
        Mappable::Defined(t) => t,
        no => return Ok(no),
    };
    let (Term::FinFun { cod: c1, .. }, Term::FinFun { cod: c2, .. }) = (&f1, &f2) else {
        unreachable!("split returns tables");
    };
    Ok(Mappable::Defined(Term::con(
        ctor.clone(),
        vec![c1.clone(), c2.clone()],
        vec![r1, r2],
    )))
}

/// `s` holds no data but `a`: `s = inj a`, or `s = pairing s₁ s₂` with
/// `a = (a₁, a₂)` and each `sᵢ` holding only `aᵢ`.
pub fn contains_only(shape: &SeqShape, a: &Term, s: &Term) -> bool {
    match s {
        Term::Con { ctor, args, .. } if ctor == &shape.inj => &args[0] == a,
        Term::Con { ctor, args, .. } if ctor == &shape.pairing => match a.components() {
            Some((a1, a2)) => contains_only(shape, a1, &args[0]) && contains_only(shape, a2, &args[1]),
            None => false,
        },
        _ => false,
    }
}
