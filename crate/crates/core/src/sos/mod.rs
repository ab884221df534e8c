//! Sum-of-squares certification: Gram matrices solved numerically, rounded
//! to exact rationals and verified by re-expansion.

mod certificate;
mod cylinder;
mod gram;
mod newton;
mod sdp;
mod search;
mod univariate;

pub use certificate::{vars_from_names, SosCertificate, WeightedSquare};
pub use cylinder::{circle_grid, cylinder_sos, cylinder_vars};
pub use gram::{extract_squares, gram_solve, DualWitness, GramOutcome, GramProblem, Ideal, PsdRationalMatrix};
pub use newton::{in_convex_hull, newton_basis};
pub use search::{
    dehomogenize, divide_out_squares, find_negative_point, fraction_sos, homogenize, multiplier_search,
    rational_grid, value_list,
};
pub use univariate::univariate_sos;

use thiserror::Error;

use crate::fracalg::FracError;
use crate::polycore::{ParseError, PolyError, Rational};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SosError {
    #[error("the zero polynomial has no Newton polytope")]
    ZeroPolynomial,
    #[error("matrix is not positive semidefinite")]
    NotPsd,
    #[error("expected a polynomial in one variable")]
    NotUnivariate,
    #[error("multiplier must be nonzero")]
    ZeroMultiplier,
    #[error("{0} is not divisible by the given factor")]
    NotDivisible(String),
    #[error("sign witnesses do not satisfy p(u) < 0 < p(v)")]
    BadWitness,
    #[error("expected {0}")]
    BasisMismatch(String),
    #[error("certificate format: {0}")]
    Format(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Frac(#[from] FracError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SosOptions {
    /// Stopping tolerance of the interior-point stage.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Maximum depth of facial reduction.
    pub facial_levels: usize,
}

impl Default for SosOptions {
    fn default() -> Self {
        Self { tolerance: 1e-9, max_iterations: 150, facial_levels: 3 }
    }
}

/// A rational point with a negative value.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: Vec<Rational>,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum AttemptResult {
    Infeasible(DualWitness),
    Indeterminate(String),
}

/// One failed level of a search (a multiplier exponent or a basis degree).
#[derive(Clone, Debug, PartialEq)]
pub struct Attempt {
    pub level: u32,
    pub result: AttemptResult,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SosOutcome {
    Certified(SosCertificate),
    NotPsd(Witness),
    /// No certificate up to `cap`; absence of a certificate proves nothing.
    Exhausted { cap: u32, attempts: Vec<Attempt> },
}

impl SosOutcome {
    pub fn certificate(&self) -> Option<&SosCertificate> {
        match self {
            SosOutcome::Certified(c) => Some(c),
            _ => None,
        }
    }
}
