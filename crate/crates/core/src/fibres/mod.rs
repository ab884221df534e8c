//! Fibre sets of the bounded functions `g_j, h_j` and the moment-property
//! decision for linear denominators.

mod decide;

pub use decide::{
    collinear_real_line, decide_moment_property, decide_moment_property_seeded, normal_form_d2m3, theta_grid,
    FibreSample, MomentDecision, NormalForm, NormalFormCase, Reason, Verdict,
};

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::fracalg::{AlgebraDescriptor, FracError, FractionElement};
use crate::polycore::linalg::{rank, rref, rref_ordered, solve_affine, QMatrix};
use crate::polycore::{
    parse_complex, rat, Coeff, GaussianRational, Monomial, PolyError, Polynomial, Rational, RealPolynomial,
    VarSet, Vars,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FibreError {
    #[error("|theta| must be exactly 1, got {0}")]
    NotUnitModulus(GaussianRational),
    #[error("theta {0} has argument outside [0, pi)")]
    ArgumentOutOfRange(GaussianRational),
    #[error("angle '{0}' is not one of 0, pi/4, pi/2, 3pi/4; give it as a unit-modulus theta")]
    InexactAngle(String),
    #[error("expected {expected} fibre parameters, got {got}")]
    ParameterCount { expected: usize, got: usize },
    #[error("denominators are not all linear")]
    NonLinear,
    #[error("the fibre is empty")]
    EmptyFibre,
    #[error("line direction is zero")]
    DegenerateDirection,
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Frac(#[from] FracError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Angles with rational sine/cosine direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExactAngle {
    Zero,
    PiOver4,
    PiOver2,
    ThreePiOver4,
}

impl ExactAngle {
    pub const ALL: [ExactAngle; 4] = [Self::Zero, Self::PiOver4, Self::PiOver2, Self::ThreePiOver4];

    /// A positive multiple of `(sin φ, cos φ)`.
    pub fn sin_cos_direction(self) -> (i64, i64) {
        match self {
            Self::Zero => (0, 1),
            Self::PiOver4 => (1, 1),
            Self::PiOver2 => (1, 0),
            Self::ThreePiOver4 => (1, -1),
        }
    }

    /// `(cos 2φ, sin 2φ)`.
    pub fn lambda(self) -> (i64, i64) {
        match self {
            Self::Zero => (1, 0),
            Self::PiOver4 => (0, 1),
            Self::PiOver2 => (-1, 0),
            Self::ThreePiOver4 => (0, -1),
        }
    }
}

impl fmt::Display for ExactAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Zero => "0",
            Self::PiOver4 => "pi/4",
            Self::PiOver2 => "pi/2",
            Self::ThreePiOver4 => "3pi/4",
        })
    }
}

/// One fibre coordinate: an exact angle `φ_j` or a unit-modulus `ϑ_j`.
#[derive(Clone, Debug, PartialEq)]
pub enum FibreAngle {
    Exact(ExactAngle),
    Theta(GaussianRational),
}

impl FibreAngle {
    /// Validated `ϑ`: `|ϑ| = 1` with argument in `[0, π)`.
    pub fn theta(t: GaussianRational) -> Result<Self, FibreError> {
        if !t.norm_sqr().is_one() {
            return Err(FibreError::NotUnitModulus(t));
        }
        if !(t.im.is_positive() || (t.im.is_zero() && t.re.is_positive())) {
            return Err(FibreError::ArgumentOutOfRange(t));
        }
        Ok(FibreAngle::Theta(t))
    }

    /// Constraint `s·a_j − c·b_j = 0` as the pair `(s, c)`.
    ///
    /// For `ϑ` this is `Re(f_j ϑ_j) = 0`, i.e. `Re ϑ·a_j − Im ϑ·b_j = 0`.
    pub fn constraint_coefficients(&self) -> (Rational, Rational) {
        match self {
            FibreAngle::Exact(a) => {
                let (s, c) = a.sin_cos_direction();
                (rat(s), rat(c))
            }
            FibreAngle::Theta(t) => (t.re.clone(), t.im.clone()),
        }
    }

    /// Value of `g_j + i·h_j` on the fibre.
    pub fn lambda(&self) -> (Rational, Rational) {
        lambda_from_phi(self)
    }
}

impl fmt::Display for FibreAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FibreAngle::Exact(a) => write!(f, "{a}"),
            FibreAngle::Theta(t) => write!(f, "theta({t})"),
        }
    }
}

impl FromStr for FibreAngle {
    type Err = FibreError;

    /// `0`, `pi/4`, `pi/2`, `3pi/4` (also `3*pi/4`), or a Gaussian rational
    /// such as `3/5+4/5*i`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let exact = match t.as_str() {
            "0" => Some(ExactAngle::Zero),
            "pi/4" => Some(ExactAngle::PiOver4),
            "pi/2" => Some(ExactAngle::PiOver2),
            "3pi/4" | "3*pi/4" => Some(ExactAngle::ThreePiOver4),
            _ => None,
        };
        if let Some(a) = exact {
            return Ok(FibreAngle::Exact(a));
        }
        if t.contains("pi") {
            return Err(FibreError::InexactAngle(t));
        }
        let c = parse_complex(&t, &VarSet::plain::<&str>(&[]))
            .map_err(|_| FibreError::InexactAngle(t.clone()))?
            .constant_term();
        FibreAngle::theta(c)
    }
}

/// `(λ_j, λ_{m+j})`: `(cos 2φ, sin 2φ)` for exact angles; `−conj(ϑ)²` in
/// the `ϑ` form, which is the value of `f/f̄` on `Re(f ϑ) = 0`.
pub fn lambda_from_phi(angle: &FibreAngle) -> (Rational, Rational) {
    match angle {
        FibreAngle::Exact(a) => {
            let (c, s) = a.lambda();
            (rat(c), rat(s))
        }
        FibreAngle::Theta(t) => {
            let c = t.conj();
            let sq = c.cmul(&c).cneg();
            (sq.re, sq.im)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FibreParameter {
    pub angles: Vec<FibreAngle>,
}

impl FibreParameter {
    pub fn new(angles: Vec<FibreAngle>) -> Self {
        Self { angles }
    }

    pub fn exact(angles: &[ExactAngle]) -> Self {
        Self { angles: angles.iter().map(|&a| FibreAngle::Exact(a)).collect() }
    }

    /// Whitespace- or comma-separated list of angles.
    pub fn parse(text: &str) -> Result<Self, FibreError> {
        let angles = text
            .split(|c: char| c.is_whitespace() || c == ',' || c == ';')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { angles })
    }
}

impl fmt::Display for FibreParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.angles.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Linear fibre `matrix·(x, y) = rhs` minus the points where some
/// `a_j = b_j = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFibre {
    pub matrix: QMatrix,
    pub rhs: Vec<Rational>,
    pub excluded: Vec<(RealPolynomial, RealPolynomial)>,
    pub vars: Vars,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FibreDimension {
    Empty,
    Dim(usize),
}

impl fmt::Display for FibreDimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FibreDimension::Empty => write!(f, "empty"),
            FibreDimension::Dim(k) => write!(f, "{k}"),
        }
    }
}

impl AffineFibre {
    /// Reduced row echelon form of `[matrix | rhs]`.
    pub fn reduced(&self) -> QMatrix {
        rref(&self.augmented()).0
    }

    pub fn augmented(&self) -> QMatrix {
        self.matrix
            .iter()
            .zip(&self.rhs)
            .map(|(r, b)| {
                let mut row = r.clone();
                row.push(b.clone());
                row
            })
            .collect()
    }

    /// The reduced equations as polynomials `row·(x, y) − rhs`.
    pub fn reduced_equations(&self) -> Vec<RealPolynomial> {
        let n = self.vars.len();
        self.reduced()
            .into_iter()
            .map(|row| {
                let mut p = RealPolynomial::constant(&self.vars, -row[n].clone());
                for (k, c) in row[..n].iter().enumerate() {
                    p.add_term(Monomial::var(n, k), c);
                }
                p
            })
            .collect()
    }

    /// Whether the solution set equals that of `other` (same reduced system).
    pub fn same_solution_set(&self, other: &AffineFibre) -> bool {
        self.reduced() == other.reduced()
    }
}

/// `2d − rank` for a consistent system, else `Empty`. A single-point
/// solution outside the character domain is also `Empty`.
pub fn fibre_dimension(fib: &AffineFibre) -> FibreDimension {
    let n = fib.vars.len();
    let Some(point) = solve_affine(&fib.matrix, &fib.rhs) else {
        return FibreDimension::Empty;
    };
    let r = rank(&fib.matrix);
    if r == n {
        let outside = fib.excluded.iter().any(|(a, b)| {
            a.eval(&point).map(|v| v.is_zero()).unwrap_or(false) && b.eval(&point).map(|v| v.is_zero()).unwrap_or(false)
        });
        if outside {
            return FibreDimension::Empty;
        }
    }
    FibreDimension::Dim(n - r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FibreConstraints {
    /// `s_j·a_j − c_j·b_j`, normalised to primitive form.
    pub equations: Vec<RealPolynomial>,
    /// Present when every equation is affine-linear.
    pub affine: Option<AffineFibre>,
}

pub fn fibre_constraints(alg: &AlgebraDescriptor, param: &FibreParameter) -> Result<FibreConstraints, FibreError> {
    if param.angles.len() != alg.m() {
        return Err(FibreError::ParameterCount { expected: alg.m(), got: param.angles.len() });
    }
    let vars = alg.real_vars().clone();
    let n = vars.len();
    let mut equations = Vec::with_capacity(alg.m());
    for (entry, angle) in alg.basis.entries.iter().zip(&param.angles) {
        let (s, c) = angle.constraint_coefficients();
        let eq = &entry.a.scale(&s) - &entry.b.scale(&c);
        equations.push(if eq.is_zero() { eq } else { eq.primitive_part() });
    }
    let linear = equations.iter().all(|e| e.total_degree().map_or(true, |d| d <= 1));
    let affine = linear.then(|| {
        let mut matrix = Vec::with_capacity(equations.len());
        let mut rhs = Vec::with_capacity(equations.len());
        for e in &equations {
            let mut row = vec![Rational::zero(); n];
            for (k, slot) in row.iter_mut().enumerate() {
                *slot = e.coeff(&Monomial::var(n, k));
            }
            matrix.push(row);
            rhs.push(-e.constant_term());
        }
        AffineFibre {
            matrix,
            rhs,
            excluded: alg.basis.entries.iter().map(|e| (e.a.clone(), e.b.clone())).collect(),
            vars: vars.clone(),
        }
    });
    Ok(FibreConstraints { equations, affine })
}

/// Generators of the fibre quotient after eliminating dependent coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientGenerators {
    /// Free coordinates that parametrize the fibre.
    pub vars: Vars,
    /// Image of each of `x_1..x_d, y_1..y_d`.
    pub coordinates: Vec<RealPolynomial>,
    /// `ℓ_j` such that `1/ℓ_j²` generates in place of `1/n_j`.
    pub inverse_squares: Vec<RealPolynomial>,
}

/// Coordinates and the surviving `1/a_j²` or `1/b_j²` generators on a
/// linear fibre. `1/a_j²` survives whenever the fibre forces `b_j` to be a
/// multiple of `a_j`; otherwise `a_j` vanishes there and `1/b_j²` survives.
pub fn fibre_quotient_generators(
    alg: &AlgebraDescriptor,
    param: &FibreParameter,
) -> Result<QuotientGenerators, FibreError> {
    let cons = fibre_constraints(alg, param)?;
    let fib = cons.affine.ok_or(FibreError::NonLinear)?;
    if fibre_dimension(&fib) == FibreDimension::Empty {
        return Err(FibreError::EmptyFibre);
    }
    let (vars, coordinates) = eliminate(&fib)?;
    let mut inverse_squares = Vec::with_capacity(alg.m());
    for (entry, angle) in alg.basis.entries.iter().zip(&param.angles) {
        let (_, c) = angle.constraint_coefficients();
        let base = if c.is_zero() { &entry.b } else { &entry.a };
        let img = base.substitute(&coordinates, &vars)?;
        inverse_squares.push(if img.is_zero() { img } else { img.primitive_part() });
    }
    Ok(QuotientGenerators { vars, coordinates, inverse_squares })
}

/// Solve the affine system for pivot coordinates (the `y`s first) and
/// express every coordinate in the remaining free ones.
fn eliminate(fib: &AffineFibre) -> Result<(Vars, Vec<RealPolynomial>), FibreError> {
    let n = fib.vars.len();
    let d = n / 2;
    let order: Vec<usize> = (d..n).chain(0..d).collect();
    let aug = fib.augmented();
    let mut full_order = order.clone();
    full_order.push(n);
    let (r, pivots) = rref_ordered(&aug, &full_order);
    if pivots.contains(&n) {
        return Err(FibreError::EmptyFibre);
    }
    let free: Vec<usize> = (0..n).filter(|k| !pivots.contains(k)).collect();
    let names: Vec<&str> = free.iter().map(|&k| fib.vars.name(k)).collect();
    let qv = VarSet::plain(&names);
    let mut coords: Vec<RealPolynomial> = vec![RealPolynomial::zero(&qv); n];
    for (slot, &k) in free.iter().enumerate() {
        coords[k] = Polynomial::var(&qv, slot);
    }
    for (row, &pc) in r.iter().zip(&pivots) {
        let mut p = RealPolynomial::constant(&qv, row[n].clone());
        for (slot, &k) in free.iter().enumerate() {
            p.add_term(Monomial::var(qv.len(), slot), &-row[k].clone());
        }
        coords[pc] = p;
    }
    Ok((qv, coords))
}

/// A fraction restricted to a line `x = p + s·v`, parametrized by
/// `t = x_k` for the first `k` with `v_k ≠ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LineFraction {
    pub vars: Vars,
    pub numerator: RealPolynomial,
    /// Restricted norms `p̃_j² + q̃_j²`.
    pub denominators: Vec<RealPolynomial>,
    pub exponents: Vec<u32>,
}

impl LineFraction {
    pub fn denominator(&self) -> RealPolynomial {
        let mut d = RealPolynomial::one(&self.vars);
        for (n, &e) in self.denominators.iter().zip(&self.exponents) {
            if e > 0 {
                d = &d * &n.pow(e);
            }
        }
        d
    }

    pub fn eval(&self, t: &Rational) -> Option<Rational> {
        let den = self.denominator().eval(std::slice::from_ref(t)).ok()?;
        if den.is_zero() {
            return None;
        }
        Some(self.numerator.eval(std::slice::from_ref(t)).ok()? / den)
    }

    fn canonical(mut self) -> Self {
        for j in 0..self.denominators.len() {
            if self.denominators[j].is_constant() {
                let c = self.denominators[j].constant_term();
                if !c.is_zero() && self.exponents[j] > 0 {
                    let k = self.exponents[j];
                    let mut s = Rational::one();
                    for _ in 0..k {
                        s *= &c;
                    }
                    self.numerator = self.numerator.scale(&s.recip());
                    self.exponents[j] = 0;
                }
                continue;
            }
            while self.exponents[j] > 0 {
                match self.numerator.exact_div(&self.denominators[j]) {
                    Some(q) => {
                        self.numerator = q;
                        self.exponents[j] -= 1;
                    }
                    None => break,
                }
            }
        }
        self
    }
}

impl fmt::Display for LineFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponents.iter().all(|&e| e == 0) {
            return write!(f, "{}", self.numerator);
        }
        write!(f, "({})/({})", self.numerator, self.denominator())
    }
}

pub fn restrict_to_line(
    elem: &FractionElement,
    point: &[Rational],
    direction: &[Rational],
) -> Result<LineFraction, FibreError> {
    let n = elem.basis().real_vars.len();
    if point.len() != n || direction.len() != n {
        return Err(FibreError::ArityMismatch { expected: n, got: point.len().min(direction.len()) });
    }
    let k = direction.iter().position(|v| !v.is_zero()).ok_or(FibreError::DegenerateDirection)?;
    let tv = VarSet::plain(&["t"]);
    let t = RealPolynomial::var(&tv, 0);
    // s = (t − p_k)/v_k
    let s = (&t - &RealPolynomial::constant(&tv, point[k].clone())).scale(&direction[k].recip());
    let images: Vec<RealPolynomial> = point
        .iter()
        .zip(direction)
        .map(|(p, v)| &RealPolynomial::constant(&tv, p.clone()) + &s.scale(v))
        .collect();
    let numerator = elem.numerator().substitute(&images, &tv)?;
    let denominators = elem
        .basis()
        .entries
        .iter()
        .map(|e| e.n.substitute(&images, &tv))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LineFraction { vars: tv, numerator, denominators, exponents: elem.exponents().to_vec() }.canonical())
}

/// Value of a fraction on a point fibre.
pub fn restrict_to_point(elem: &FractionElement, point: &[Rational]) -> Result<Rational, FibreError> {
    Ok(elem.eval(point)?)
}
