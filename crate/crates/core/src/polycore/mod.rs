//! Exact polynomial arithmetic over ℚ and ℚ(i), the `*`-involution and the
//! translation between complex and real coordinates.

pub mod coeff;
pub mod linalg;
pub mod monomial;
pub mod parse;
pub mod polynomial;
pub mod star;
pub mod univariate;
pub mod vars;

pub use coeff::{
    format_rational, height, limit_denominator, rat, ratio, rational_approx, rational_to_f64,
    simplest_between, Coeff, GaussianRational, Rational,
};
pub use monomial::Monomial;
pub use parse::{parse_complex, parse_real, parse_real_infer, parse_star_infer, ParseError};
pub use polynomial::{ComplexStarPolynomial, Degree, Polynomial, RealPolynomial};
pub use star::{ab_split, hermitean_split, realify, star};
pub use vars::{Layout, VarSet, Vars};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("negative exponents are not supported here")]
    LaurentNotSupported,
    #[error("substituted image is not invertible")]
    NotInvertible,
    #[error("operation needs a star variable set")]
    NotStarVariables,
}
