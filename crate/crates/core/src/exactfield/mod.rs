//! Exact arithmetic: Gaussian rationals, sparse polynomials and rational
//! functions over them.

mod field;
mod gaussian;
mod poly;
mod rational;
mod sample;
mod symbol;
mod univariate;

pub use field::Field;
pub use gaussian::GaussianRational;
pub use poly::{Monomial, Polynomial};
pub use rational::RationalExpr;
pub use sample::ExactSampler;
pub use symbol::Symbol;
pub use univariate::UniPoly;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("substitution makes a denominator vanish identically")]
    SubstitutionSingular,
    #[error("denominator contains the symbol `{0}`")]
    DenominatorContainsSymbol(String),
    #[error("no value bound for symbol `{0}`")]
    UnboundSymbol(String),
    #[error("malformed exact literal `{0}`")]
    Literal(String),
}

/// True iff the expression is identically zero.
///
/// Zero is decided only by the expanded numerator.
pub fn is_zero(e: &RationalExpr) -> bool {
    e.is_zero()
}
