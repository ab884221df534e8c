use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::coeff::{format_rational, Coeff, GaussianRational, Rational};
use super::monomial::Monomial;
use super::vars::Vars;
use super::PolyError;

/// Total degree; the zero polynomial has degree minus infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    NegInfinity,
    Finite(i64),
}

impl Degree {
    pub fn finite(self) -> Option<i64> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

/// Sparse polynomial with exact coefficients over a named variable set.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct Polynomial<C: Coeff> {
    vars: Vars,
    terms: BTreeMap<Monomial, C>,
}

pub type RealPolynomial = Polynomial<Rational>;
pub type ComplexStarPolynomial = Polynomial<GaussianRational>;

impl<C: Coeff> Polynomial<C> {
    pub fn zero(vars: &Vars) -> Self {
        Self { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, C::one())
    }

    pub fn constant(vars: &Vars, c: C) -> Self {
        Self::term(vars, Monomial::one(vars.len()), c)
    }

    pub fn var(vars: &Vars, i: usize) -> Self {
        Self::term(vars, Monomial::var(vars.len(), i), C::one())
    }

    pub fn term(vars: &Vars, m: Monomial, c: C) -> Self {
        assert_eq!(m.len(), vars.len(), "monomial arity");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Self { vars: vars.clone(), terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(vars: &Vars, it: I) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in it {
            p.add_term(m, &c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_term(&self) -> C {
        self.terms.get(&Monomial::one(self.nvars())).cloned().unwrap_or_else(C::zero)
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, C> {
        self.terms
    }

    pub fn add_term(&mut self, m: Monomial, c: &C) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(m.len(), self.nvars());
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.cadd(c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn degree(&self) -> Degree {
        self.terms
            .keys()
            .map(|m| m.degree())
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<i64> {
        self.degree().finite()
    }

    pub fn min_total_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn degree_in(&self, var: usize) -> Option<i32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn min_degree_in(&self, var: usize) -> Option<i32> {
        self.terms.keys().map(|m| m.0[var]).min()
    }

    pub fn has_negative_exponents(&self) -> bool {
        self.terms.keys().any(|m| m.has_negative())
    }

    /// Largest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    pub fn homogeneous_component(&self, k: i64) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_parts(&self) -> BTreeMap<i64, Self> {
        let mut out: BTreeMap<i64, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree())
                .or_insert_with(|| Self::zero(&self.vars))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    pub fn map_coeffs<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> Polynomial<D> {
        Polynomial::from_terms(&self.vars, self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v.cmul(c))).collect(),
        }
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.scale(&C::from_rational(r.clone()))
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Self {
        Self {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v.clone())).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(&self.vars);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    fn check_vars(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials over different variable sets: [{}] vs [{}]",
            self.vars,
            other.vars
        );
    }

    /// Exact evaluation. Negative exponents divide by the coordinate.
    pub fn eval(&self, point: &[C]) -> Result<C, PolyError> {
        if point.len() != self.nvars() {
            return Err(PolyError::ArityMismatch { expected: self.nvars(), got: point.len() });
        }
        let mut total = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e == 0 {
                    continue;
                }
                let base = if e < 0 {
                    if x.is_zero() {
                        return Err(PolyError::DivisionByZero);
                    }
                    x.cinv()
                } else {
                    x.clone()
                };
                for _ in 0..e.unsigned_abs() {
                    t = t.cmul(&base);
                }
            }
            total = total.cadd(&t);
        }
        Ok(total)
    }

    /// Replace variable `i` by `images[i]` (all over `target`). A negative
    /// exponent requires the image to be a single term.
    pub fn substitute(&self, images: &[Polynomial<C>], target: &Vars) -> Result<Polynomial<C>, PolyError> {
        if images.len() != self.nvars() {
            return Err(PolyError::ArityMismatch { expected: self.nvars(), got: images.len() });
        }
        let mut inverses: Vec<Option<Polynomial<C>>> = vec![None; images.len()];
        let mut power_cache: Vec<Vec<Polynomial<C>>> = vec![Vec::new(); images.len()];
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = if e < 0 {
                    if inverses[i].is_none() {
                        inverses[i] = Some(images[i].monomial_inverse().ok_or(PolyError::NotInvertible)?);
                    }
                    inverses[i].clone().unwrap()
                } else {
                    images[i].clone()
                };
                let k = e.unsigned_abs() as usize;
                if e > 0 {
                    let cache = &mut power_cache[i];
                    if cache.is_empty() {
                        cache.push(Polynomial::one(target));
                    }
                    while cache.len() <= k {
                        let next = &cache[cache.len() - 1] * &base;
                        cache.push(next);
                    }
                    t = &t * &cache[k];
                } else {
                    t = &t * &base.pow(k as u32);
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Inverse of a single-term polynomial over Laurent-capable variables.
    pub fn monomial_inverse(&self) -> Option<Self> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        let inv = Monomial(m.0.iter().map(|e| -e).collect());
        for (i, &e) in inv.0.iter().enumerate() {
            if e < 0 && !self.vars.is_laurent(i) {
                return None;
            }
        }
        Some(Self::term(&self.vars, inv, c.cinv()))
    }

    /// Multivariate division by a single polynomial in graded-lex order:
    /// returns `(q, r)` with `self = q·d + r` and no term of `r` divisible
    /// by the leading monomial of `d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self), PolyError> {
        self.check_vars(d);
        if d.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if self.has_negative_exponents() || d.has_negative_exponents() {
            return Err(PolyError::LaurentNotSupported);
        }
        let (lm, lc) = d.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let lc_inv = lc.cinv();
        let mut p = self.clone();
        let mut q = Self::zero(&self.vars);
        let mut r = Self::zero(&self.vars);
        while let Some((m, c)) = p.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            match m.div(&lm) {
                Some(t) => {
                    let coef = c.cmul(&lc_inv);
                    q.add_term(t.clone(), &coef);
                    for (dm, dc) in &d.terms {
                        p.add_term(dm.mul(&t), &dc.cmul(&coef).cneg());
                    }
                }
                None => {
                    p.terms.remove(&m);
                    r.terms.insert(m, c);
                }
            }
        }
        Ok((q, r))
    }

    /// `self / d` if the division is exact.
    pub fn exact_div(&self, d: &Self) -> Option<Self> {
        match self.div_rem(d) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        Polynomial::from_terms(
            &self.vars,
            self.terms.iter().filter(|(m, _)| m.0[var] != 0).map(|(m, c)| {
                let mut e = m.clone();
                e.0[var] -= 1;
                (e, c.cmul(&C::from_int(m.0[var] as i64)))
            }),
        )
    }

    /// Re-express over another variable set; variable `i` goes to slot `map[i]`.
    pub fn rename(&self, target: &Vars, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars());
        Polynomial::from_terms(
            target,
            self.terms.iter().map(|(m, c)| {
                let mut e = vec![0; target.len()];
                for (i, &k) in m.0.iter().enumerate() {
                    e[map[i]] += k;
                }
                (Monomial(e), c.clone())
            }),
        )
    }

    pub fn conj_coeffs(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }
}

impl Polynomial<Rational> {
    /// Positive rational `c` such that `self / c` has coprime integer
    /// coefficients. Zero for the zero polynomial.
    pub fn content(&self) -> Rational {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::zero();
        }
        Rational::new(num, den)
    }

    /// `self / content`, normalised to a positive leading coefficient.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.content();
        if self.leading_term().unwrap().1.is_negative() {
            c = -c;
        }
        self.scale(&c.recip())
    }

    pub fn to_complex(&self) -> ComplexStarPolynomial {
        self.map_coeffs(|c| GaussianRational::real(c.clone()))
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl Polynomial<GaussianRational> {
    pub fn real_part(&self) -> RealPolynomial {
        self.map_coeffs(|c| c.re.clone())
    }

    pub fn imag_part(&self) -> RealPolynomial {
        self.map_coeffs(|c| c.im.clone())
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.is_real())
    }
}

impl<'a, C: Coeff> Add<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl<'a, C: Coeff> Sub<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        self.check_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &c.cneg());
        }
        out
    }
}

impl<'a, C: Coeff> Mul<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        self.check_vars(rhs);
        let mut out = Polynomial::zero(&self.vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), &c1.cmul(c2));
            }
        }
        out
    }
}

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        Polynomial {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.cneg())).collect(),
        }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl<C: Coeff> $tr<Polynomial<C>> for Polynomial<C> {
            type Output = Polynomial<C>;
            fn $f(self, rhs: Polynomial<C>) -> Polynomial<C> {
                (&self).$f(&rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<C: Coeff> Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        -&self
    }
}

/// Sign and printable magnitude of a coefficient for term-by-term output.
pub trait CoeffFormat {
    /// `(negative, magnitude)`; magnitude `None` means exactly one.
    fn split_sign(&self) -> (bool, Option<String>);
}

impl CoeffFormat for Rational {
    fn split_sign(&self) -> (bool, Option<String>) {
        let a = self.abs();
        let mag = if a.is_one() { None } else { Some(format_rational(&a)) };
        (self.is_negative(), mag)
    }
}

impl CoeffFormat for GaussianRational {
    fn split_sign(&self) -> (bool, Option<String>) {
        if self.im.is_zero() {
            return self.re.split_sign();
        }
        if self.re.is_zero() {
            let a = self.im.abs();
            let mag = if a.is_one() { "i".to_string() } else { format!("{}*i", format_rational(&a)) };
            return (self.im.is_negative(), Some(mag));
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        let im = self.im.abs();
        let im_s = if im.is_one() { "i".to_string() } else { format!("{}*i", format_rational(&im)) };
        (false, Some(format!("({} {} {})", format_rational(&self.re), sign, im_s)))
    }
}

fn format_monomial(vars: &Vars, m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars.name(i).to_string()),
            _ => parts.push(format!("{}^{}", vars.name(i), e)),
        }
    }
    parts.join("*")
}

impl<C: Coeff + CoeffFormat> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let (neg, mag) = c.split_sign();
            let body = match (mag, m.is_one()) {
                (None, true) => "1".to_string(),
                (None, false) => format_monomial(&self.vars, m),
                (Some(s), true) => s,
                (Some(s), false) => format!("{}*{}", s, format_monomial(&self.vars, m)),
            };
            match (k == 0, neg) {
                (true, false) => write!(f, "{body}")?,
                (true, true) => write!(f, "-{body}")?,
                (false, false) => write!(f, " + {body}")?,
                (false, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl<C: Coeff + CoeffFormat> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.vars, self)
    }
}
