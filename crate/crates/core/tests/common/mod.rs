#![allow(dead_code)]

use gadtparam_core::kernel::{product_fun, Caps, Env, Term, TypeExpr};
use gadtparam_core::parser::{env_from_source, parse_fun, parse_rel, parse_term};
use gadtparam_core::relations::{graph, Rel};

pub const SEQ: &str = "data Seq : Set → Set where
  inj : ∀{α} → α → Seq α
  pairing : ∀{α₁ α₂} → Seq α₁ → Seq α₂ → Seq (α₁ × α₂)
";

pub const LIST: &str = "data List : Set -> Set where
  nil : forall {a} -> List a
  cons : forall {a} -> a -> List a -> List a
";

pub fn seq_env() -> Env {
    env_from_source(SEQ, Caps::default()).unwrap()
}

pub fn list_env() -> Env {
    env_from_source(LIST, Caps::default()).unwrap()
}

pub fn term(s: &str, env: &Env) -> Term {
    parse_term(s, env).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn rel(s: &str, env: &Env) -> Rel {
    parse_rel(s, env).unwrap_or_else(|e| panic!("{s}: {e}"))
}

pub fn bb() -> TypeExpr {
    TypeExpr::prod(TypeExpr::Bool, TypeExpr::Bool)
}

pub fn swap(env: &Env) -> Term {
    parse_fun("fun (Bool*Bool) -> (Bool*Bool) { (x,y) => (y,x) }", env).unwrap()
}

pub fn not(env: &Env) -> Term {
    parse_fun("fun Bool -> Bool { x => not x }", env).unwrap()
}

/// `graph(f × g)` for the swap and negation tables.
pub fn example_rel(env: &Env) -> Rel {
    graph(&product_fun(&swap(env), &not(env)).unwrap()).unwrap()
}

pub fn s_pair() -> (&'static str, &'static str) {
    (
        "pairing [Bool*Bool, Bool] (inj [Bool*Bool] (true,false)) (inj [Bool] true)",
        "pairing [Bool*Bool, Bool] (inj [Bool*Bool] (false,true)) (inj [Bool] false)",
    )
}

pub fn t_pair() -> (&'static str, &'static str) {
    (
        "pairing [Bool*Bool, Bool] (pairing [Bool, Bool] (inj [Bool] true) (inj [Bool] false)) (inj [Bool] true)",
        "pairing [Bool*Bool, Bool] (pairing [Bool, Bool] (inj [Bool] false) (inj [Bool] true)) (inj [Bool] false)",
    )
}

pub const S_REL: &str = "rel (Bool*Bool) (Bool*Bool) { all except ((false,false),(true,true)) }";
