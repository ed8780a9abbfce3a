//! Object-language syntax, kinding and typing, and finite enumeration.

mod enumerate;
mod env;
mod term;
mod types;
mod typing;

pub use enumerate::{
    all_tables, carrier, carrier_size, enumerate_values, identity_table, inhabitants,
    instantiations,
};
pub use env::{kind_check, Caps, CheckedDecl, Env};
pub use term::{compose, product_fun, Term};
pub use types::{CtorSig, DataDecl, Subst, TypeExpr};
pub use typing::{instance_of, instantiation, type_of};
