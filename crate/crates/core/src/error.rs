use thiserror::Error;

use crate::parser::ParseError;

/// Problems found while kind-checking a declaration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KindError {
    #[error("unknown type constructor `{0}`")]
    UnknownTypeConstructor(String),
    #[error("arity mismatch: `{con}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        con: String,
        expected: usize,
        found: usize,
    },
    #[error("unquantified variable `{var}` in constructor `{ctor}`")]
    UnquantifiedVariable { ctor: String, var: String },
    #[error("constructor `{ctor}`: {reason}")]
    UnsupportedRecursion { ctor: String, reason: String },
    #[error("duplicate constructor `{0}`")]
    DuplicateConstructor(String),
    #[error("duplicate declaration `{0}`")]
    DuplicateDeclaration(String),
    #[error("constructor `{ctor}` quantifies `{var}` twice")]
    DuplicateVariable { ctor: String, var: String },
    #[error("`{0}` is reserved")]
    ReservedName(String),
    #[error("declaration `{0}` must have positive arity")]
    ZeroArity(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("kind error in `{decl}`: {}", .errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Kind { decl: String, errors: Vec<KindError> },
    #[error("type error: {0}")]
    Type(String),
    #[error("resource cap exceeded: {0}")]
    Caps(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn ty(msg: impl Into<String>) -> Self {
        Error::Type(msg.into())
    }

    pub(crate) fn caps(msg: impl Into<String>) -> Self {
        Error::Caps(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
