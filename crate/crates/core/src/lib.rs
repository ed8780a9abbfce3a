//! Relational liftings of generalized algebraic data types.
//!
//! The crate derives a relational interpretation for every declared data
//! type, in two flavours: the direct one-rule-per-constructor lifting, and
//! the lifting obtained by restricting the lifting of the type's
//! functorial completion along its embedding. Everything is decided by
//! exhaustive search over finite carriers, and every positive answer comes
//! with a derivation that can be replayed independently.

pub mod analyses;
pub mod completion;
pub mod error;
pub mod kernel;
pub mod lifting;
pub mod parser;
pub mod relations;
pub mod report;

pub use error::{Error, KindError, Result};
