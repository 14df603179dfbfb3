use thiserror::Error;

use crate::dsl::ParseError;
use crate::functor::ShapeError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("set `{0}` must not be empty")]
    EmptySet(String),
    #[error("set `{set}` lists `{member}` twice")]
    DuplicateMember { set: String, member: String },
    #[error("state `{0}` is declared twice")]
    DuplicateState(String),
    #[error("state `{0}` is not in the universe")]
    NotInUniverse(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("relation is not symmetric: ({0}, {1}) present without its mirror")]
    NotSymmetric(String, String),
    #[error("relations and partitions live over different universes")]
    UniverseMismatch,
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("operation needs a complete system, but {0} boundary state(s) have no successor structure")]
    Fragment(usize),
    #[error("state `{0}` is a boundary state; its successor structure is not available")]
    Boundary(String),
    #[error("expected a system over `{expected}`, found `{found}`")]
    WrongFunctor { expected: String, found: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("proof document: {0}")]
    ProofFormat(String),
}
