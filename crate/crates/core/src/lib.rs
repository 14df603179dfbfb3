//! Behavioural apartness for coalgebras of polynomial-style functors over
//! finite state spaces: the apartness relation itself, the n-step tower,
//! proof synthesis and checking for the basic and covering rule systems,
//! and a coupling-based cross-check for subdistributions.
//!
//! Everything is generic over an exact [`Weight`]; the aliases below fix it
//! to arbitrary-precision rationals.

pub mod coalgebra;
pub mod cobisim;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod functor;
pub mod proof;
pub mod random;
pub mod relation;
pub mod state;
pub mod weight;

pub use coalgebra::{Coalgebra, Presentation};
pub use dsl::{parse_system, parse_value, print_system, print_value, system_hash, ParseError};
pub use engine::{
    apartness_tower, behavioural_apartness, behavioural_equivalence, check_covering, one_step_covering,
    ApartnessTower, Covering, CoveringError, CoveringMode,
};
pub use error::Error;
pub use functor::{reca_direct, reca_inductive, BValue, FunctorExpr, NormalForm, ShapeError, ShapeErrorKind};
pub use relation::{ApartnessCheck, ApartnessViolation, Partition, Relation};
pub use state::{StateId, Symbol, SymbolSet, Universe};
pub use weight::{parse_fraction, Weight};

/// Exact rationals of unbounded size.
pub type Rational = num_rational::BigRational;
pub type Value = BValue<Rational>;
pub type System = Coalgebra<Rational>;
