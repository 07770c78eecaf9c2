//! Exact scalar and multivariate polynomial arithmetic over ℚ and ℚ(i).

mod gcd;
mod groebner;
pub mod matrix;
mod parse;
mod poly;
mod scalar;
pub mod univariate;
mod universe;

pub use gcd::{content_in, gcd, gcd_all, primitive_part_in, resultant};
pub use groebner::{ideal_contains_one, GroebnerBudget, UnitMembership};
pub use matrix::{bareiss_rank, determinant, RankWitness};
pub use parse::parse_polynomial;
pub use poly::{Monomial, Polynomial};
pub use scalar::{Field, Scalar};
pub use universe::VarUniverse;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("operands live in different variable universes")]
    UniverseMismatch,
    #[error("invalid variable universe: {0}")]
    InvalidUniverse(String),
}
