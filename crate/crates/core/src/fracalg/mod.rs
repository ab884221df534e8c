//! The algebra generated by `x_j, y_j` and the inverses `1/(a_j²+b_j²)` of
//! the denominator norms, and its elements as fractions.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::polycore::{
    ab_split, parse::parse_star_infer, ComplexStarPolynomial, Layout, ParseError, PolyError,
    Polynomial, Rational, RealPolynomial, VarSet, Vars,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FracError {
    #[error("denominator {index} is constant")]
    ConstantDenominator { index: usize },
    #[error("fractions over different denominator bases")]
    BasisMismatch,
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("point is outside the character domain")]
    OutsideDomain,
    #[error("denominator index {0} out of range")]
    BadIndex(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("algebra descriptor: {0}")]
    Descriptor(String),
}

/// One denominator `f_j = a_j + i·b_j` with norm `n_j = a_j² + b_j²`.
#[derive(Clone, Debug, PartialEq)]
pub struct DenominatorEntry {
    pub f: ComplexStarPolynomial,
    pub a: RealPolynomial,
    pub b: RealPolynomial,
    pub n: RealPolynomial,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DenominatorBasis {
    pub entries: Vec<DenominatorEntry>,
    pub real_vars: Vars,
}

impl DenominatorBasis {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The algebra of fractions with the given denominators over `ℂ^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraDescriptor {
    pub d: usize,
    pub basis: Arc<DenominatorBasis>,
}

pub fn make_algebra(f_list: &[ComplexStarPolynomial], d: usize) -> Result<AlgebraDescriptor, FracError> {
    let star_vars = VarSet::star(d, false);
    let mut entries = Vec::with_capacity(f_list.len());
    for (index, f) in f_list.iter().enumerate() {
        let f = match f.vars().layout() {
            Layout::Star { d: fd } if fd == d => f.clone(),
            Layout::Star { d: fd } if fd < d => {
                // widen z1..z_fd, zb1..zb_fd into the larger set
                let map: Vec<usize> = (0..fd).chain((0..fd).map(|j| d + j)).collect();
                f.rename(&star_vars, &map)
            }
            _ => return Err(FracError::Poly(PolyError::NotStarVariables)),
        };
        if f.is_constant() {
            return Err(FracError::ConstantDenominator { index });
        }
        let (a, b) = ab_split(&f)?;
        let n = &(&a * &a) + &(&b * &b);
        entries.push(DenominatorEntry { f, a, b, n });
    }
    Ok(AlgebraDescriptor {
        d,
        basis: Arc::new(DenominatorBasis { entries, real_vars: VarSet::real(d) }),
    })
}

impl AlgebraDescriptor {
    /// `ℝ[x, y, 1/(x²+y²)]`, the algebra for `f = z` in one variable.
    pub fn punctured_plane() -> Self {
        let z = Polynomial::var(&VarSet::star(1, false), 0);
        make_algebra(&[z], 1).expect("z is non-constant")
    }

    pub fn m(&self) -> usize {
        self.basis.len()
    }

    pub fn real_vars(&self) -> &Vars {
        &self.basis.real_vars
    }

    /// Whether every `f_j` has total degree one.
    pub fn all_linear(&self) -> bool {
        self.basis.entries.iter().all(|e| e.f.total_degree() == Some(1))
    }

    /// Whether every `f_j` involves only `z` (no conjugates).
    pub fn all_holomorphic(&self) -> bool {
        let d = self.d;
        self.basis
            .entries
            .iter()
            .all(|e| e.f.support().all(|m| m.0[d..].iter().all(|&k| k == 0)))
    }

    /// Descriptor text: a `d=<k>` header, then one `f_j` per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("d={}\n", self.d);
        for e in &self.basis.entries {
            s.push_str(&e.f.to_string());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, FracError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or_else(|| FracError::Descriptor("empty descriptor".into()))?;
        let d: usize = header
            .strip_prefix("d=")
            .and_then(|v| v.trim().parse().ok())
            .filter(|&d| d >= 1)
            .ok_or_else(|| FracError::Descriptor(format!("expected header 'd=<k>', found '{header}'")))?;
        let mut fs = Vec::new();
        for (line, body) in lines {
            let f = parse_star_infer(body, d, false).map_err(|e| e.at_line(line))?;
            if f.nvars() != 2 * d {
                return Err(FracError::Descriptor(format!("line {line}: uses more than {d} complex variables")));
            }
            fs.push(f);
        }
        if fs.is_empty() {
            return Err(FracError::Descriptor("no denominators listed".into()));
        }
        make_algebra(&fs, d)
    }

    pub fn in_character_domain(&self, point: &[Rational]) -> Result<bool, FracError> {
        in_character_domain(self, point)
    }
}

/// Whether `a_j(p) ≠ 0` or `b_j(p) ≠ 0` for every `j`.
pub fn in_character_domain(alg: &AlgebraDescriptor, point: &[Rational]) -> Result<bool, FracError> {
    if point.len() != 2 * alg.d {
        return Err(FracError::ArityMismatch { expected: 2 * alg.d, got: point.len() });
    }
    for e in &alg.basis.entries {
        if e.a.eval(point)?.is_zero() && e.b.eval(point)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `numerator / Π n_j^{m_j}`.
#[derive(Clone, Debug)]
pub struct FractionElement {
    numerator: RealPolynomial,
    exponents: Vec<u32>,
    basis: Arc<DenominatorBasis>,
}

impl PartialEq for FractionElement {
    fn eq(&self, other: &Self) -> bool {
        same_basis(&self.basis, &other.basis)
            && self.numerator == other.numerator
            && self.exponents == other.exponents
    }
}

fn same_basis(a: &Arc<DenominatorBasis>, b: &Arc<DenominatorBasis>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl FractionElement {
    /// Build and canonicalize.
    pub fn new(numerator: RealPolynomial, exponents: Vec<u32>, basis: &Arc<DenominatorBasis>) -> Self {
        assert_eq!(exponents.len(), basis.len(), "one exponent per denominator");
        assert!(
            numerator.vars() == &basis.real_vars || **numerator.vars() == *basis.real_vars,
            "numerator must use the real coordinates of the basis"
        );
        Self { numerator, exponents, basis: basis.clone() }.canonical()
    }

    /// Same, without cancelling common factors of `n_j`.
    pub fn new_raw(numerator: RealPolynomial, exponents: Vec<u32>, basis: &Arc<DenominatorBasis>) -> Self {
        Self { numerator, exponents, basis: basis.clone() }
    }

    pub fn from_polynomial(p: RealPolynomial, basis: &Arc<DenominatorBasis>) -> Self {
        Self::new(p, vec![0; basis.len()], basis)
    }

    pub fn constant(c: Rational, basis: &Arc<DenominatorBasis>) -> Self {
        Self::from_polynomial(RealPolynomial::constant(&basis.real_vars, c), basis)
    }

    /// `1 / n_j`.
    pub fn inverse_norm(j: usize, basis: &Arc<DenominatorBasis>) -> Result<Self, FracError> {
        if j >= basis.len() {
            return Err(FracError::BadIndex(j));
        }
        let mut e = vec![0; basis.len()];
        e[j] = 1;
        Ok(Self::new_raw(RealPolynomial::one(&basis.real_vars), e, basis))
    }

    pub fn numerator(&self) -> &RealPolynomial {
        &self.numerator
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn basis(&self) -> &Arc<DenominatorBasis> {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    pub fn denominator(&self) -> RealPolynomial {
        let mut d = RealPolynomial::one(&self.basis.real_vars);
        for (e, entry) in self.exponents.iter().zip(&self.basis.entries) {
            if *e > 0 {
                d = &d * &entry.n.pow(*e);
            }
        }
        d
    }

    /// Divide out `n_j` while it divides the numerator exactly.
    pub fn canonical(mut self) -> Self {
        if self.numerator.is_zero() {
            self.exponents.iter_mut().for_each(|e| *e = 0);
            return self;
        }
        for j in 0..self.exponents.len() {
            while self.exponents[j] > 0 {
                match self.numerator.exact_div(&self.basis.entries[j].n) {
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

    /// Same value with exponent vector `target ≥ self.exponents`.
    pub fn with_exponents(&self, target: &[u32]) -> RealPolynomial {
        let mut num = self.numerator.clone();
        for (j, (&have, &want)) in self.exponents.iter().zip(target).enumerate() {
            assert!(want >= have, "cannot lower a denominator exponent");
            if want > have {
                num = &num * &self.basis.entries[j].n.pow(want - have);
            }
        }
        num
    }

    fn check(&self, o: &Self) -> Result<(), FracError> {
        if same_basis(&self.basis, &o.basis) {
            Ok(())
        } else {
            Err(FracError::BasisMismatch)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, FracError> {
        self.check(o)?;
        let e: Vec<u32> = self.exponents.iter().zip(&o.exponents).map(|(a, b)| *a.max(b)).collect();
        let num = &self.with_exponents(&e) + &o.with_exponents(&e);
        Ok(Self::new(num, e, &self.basis))
    }

    pub fn sub(&self, o: &Self) -> Result<Self, FracError> {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Result<Self, FracError> {
        self.check(o)?;
        let e: Vec<u32> = self.exponents.iter().zip(&o.exponents).map(|(a, b)| a + b).collect();
        Ok(Self::new(&self.numerator * &o.numerator, e, &self.basis))
    }

    pub fn neg(&self) -> Self {
        Self::new_raw(-&self.numerator, self.exponents.clone(), &self.basis)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.numerator.scale(c), self.exponents.clone(), &self.basis)
    }

    pub fn pow(&self, k: u32) -> Self {
        Self::new(
            self.numerator.pow(k),
            self.exponents.iter().map(|e| e * k).collect(),
            &self.basis,
        )
    }

    /// Exact value at a point of the character domain.
    pub fn eval(&self, point: &[Rational]) -> Result<Rational, FracError> {
        let num = self.numerator.eval(point)?;
        let mut den = Rational::one();
        for (e, entry) in self.exponents.iter().zip(&self.basis.entries) {
            if *e == 0 {
                continue;
            }
            let v = entry.n.eval(point)?;
            if v.is_zero() {
                return Err(FracError::OutsideDomain);
            }
            for _ in 0..*e {
                den *= &v;
            }
        }
        Ok(num / den)
    }
}

impl fmt::Display for FractionElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            return write!(f, "{}", self.numerator);
        }
        write!(f, "({})/(", self.numerator)?;
        let mut first = true;
        for (e, entry) in self.exponents.iter().zip(&self.basis.entries) {
            if *e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "({})", entry.n)?;
            } else {
                write!(f, "({})^{}", entry.n, e)?;
            }
        }
        write!(f, ")")
    }
}

/// `g_j = (a_j² − b_j²)/n_j` and `h_j = 2a_j b_j / n_j`.
pub fn gh_functions(alg: &AlgebraDescriptor, j: usize) -> Result<(FractionElement, FractionElement), FracError> {
    let entry = alg.basis.entries.get(j).ok_or(FracError::BadIndex(j))?;
    let mut e = vec![0; alg.m()];
    e[j] = 1;
    let g = &(&entry.a * &entry.a) - &(&entry.b * &entry.b);
    let h = (&entry.a * &entry.b).scale(&Rational::from_integer(2.into()));
    Ok((
        FractionElement::new(g, e.clone(), &alg.basis),
        FractionElement::new(h, e, &alg.basis),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{parse_complex, parse_real, rat, ratio};
    use proptest::prelude::*;

    fn alg(fs: &[&str], d: usize) -> AlgebraDescriptor {
        let v = VarSet::star(d, false);
        make_algebra(&fs.iter().map(|s| parse_complex(s, &v).unwrap()).collect::<Vec<_>>(), d).unwrap()
    }

    #[test]
    fn make_algebra_examples() {
        let a = alg(&["z"], 1);
        let r = VarSet::real(1);
        let e = &a.basis.entries[0];
        assert_eq!(e.a, parse_real("x", &r).unwrap());
        assert_eq!(e.b, parse_real("y", &r).unwrap());
        assert_eq!(e.n, parse_real("x^2+y^2", &r).unwrap());
        let a2 = alg(&["z1", "z2"], 2);
        let r2 = VarSet::real(2);
        assert_eq!(a2.basis.entries[1].n, parse_real("x2^2+y2^2", &r2).unwrap());
        let v = VarSet::star(1, false);
        assert_eq!(
            make_algebra(&[parse_complex("1", &v).unwrap()], 1),
            Err(FracError::ConstantDenominator { index: 0 })
        );
    }

    #[test]
    fn gh_examples() {
        let a = alg(&["z"], 1);
        let r = VarSet::real(1);
        let (g, h) = gh_functions(&a, 0).unwrap();
        assert_eq!(g.numerator(), &parse_real("x^2-y^2", &r).unwrap());
        assert_eq!(h.numerator(), &parse_real("2*x*y", &r).unwrap());
        assert_eq!(g.exponents(), &[1]);
        let a = alg(&["z+1"], 1);
        let (g, _) = gh_functions(&a, 0).unwrap();
        assert_eq!(g.numerator(), &parse_real("(x+1)^2 - y^2", &r).unwrap());
        assert_eq!(g.denominator(), parse_real("(x+1)^2 + y^2", &r).unwrap());
    }

    #[test]
    fn arithmetic_examples() {
        let a = AlgebraDescriptor::punctured_plane();
        let r = a.real_vars().clone();
        let b = &a.basis;
        let x_n = FractionElement::new(parse_real("x", &r).unwrap(), vec![1], b);
        let y_n = FractionElement::new(parse_real("y", &r).unwrap(), vec![1], b);
        let s = x_n.add(&y_n).unwrap();
        assert_eq!(s.numerator(), &parse_real("x+y", &r).unwrap());
        assert_eq!(s.exponents(), &[1]);
        let one = FractionElement::new(parse_real("x^2+y^2", &r).unwrap(), vec![1], b);
        assert!(one.is_polynomial());
        assert_eq!(one.numerator(), &RealPolynomial::one(&r));
        let p = x_n.mul(&y_n).unwrap();
        assert_eq!(p.numerator(), &parse_real("x*y", &r).unwrap());
        assert_eq!(p.exponents(), &[2]);
        let other = alg(&["z+1"], 1);
        let w = FractionElement::inverse_norm(0, &other.basis).unwrap();
        assert_eq!(x_n.add(&w), Err(FracError::BasisMismatch));
    }

    #[test]
    fn character_domain() {
        let a = alg(&["z"], 1);
        assert!(!in_character_domain(&a, &[rat(0), rat(0)]).unwrap());
        assert!(in_character_domain(&a, &[rat(1), rat(0)]).unwrap());
        let a2 = alg(&["z1", "z2"], 2);
        assert!(!in_character_domain(&a2, &[rat(1), rat(0), rat(0), rat(0)]).unwrap());
        assert!(matches!(in_character_domain(&a2, &[rat(1)]), Err(FracError::ArityMismatch { .. })));
    }

    #[test]
    fn descriptor_round_trip() {
        let text = "d=2\nz1\nz1 + 1\nz1 + i\nz2\n";
        let a = AlgebraDescriptor::parse(text).unwrap();
        assert_eq!(a.m(), 4);
        assert_eq!(AlgebraDescriptor::parse(&a.to_text()).unwrap(), a);
        let e = AlgebraDescriptor::parse("d=1\nz + \n").unwrap_err();
        assert!(matches!(e, FracError::Parse(ParseError { line: 2, .. })));
    }

    #[test]
    fn unit_circle_identity_for_sum_of_variables() {
        let a = alg(&["z1 + z2"], 2);
        let e = &a.basis.entries[0];
        let g = &(&e.a * &e.a) - &(&e.b * &e.b);
        let h = (&e.a * &e.b).scale(&rat(2));
        assert!((&(&(&g * &g) + &(&h * &h)) - &(&e.n * &e.n)).is_zero());
    }

    fn small_poly() -> impl Strategy<Value = RealPolynomial> {
        let term = (prop::collection::vec(0i32..3, 2), -4i64..5);
        prop::collection::vec(term, 0..4).prop_map(|ts| {
            RealPolynomial::from_terms(
                &VarSet::real(1),
                ts.into_iter().map(|(e, c)| (crate::polycore::Monomial(e), rat(c))),
            )
        })
    }

    proptest! {
        #[test]
        fn arithmetic_agrees_with_evaluation(
            p in small_poly(), q in small_poly(), ep in 0u32..3, eq in 0u32..3,
            x in -4i64..5, y in 1i64..5,
        ) {
            let a = alg(&["z", "z - 1"], 1);
            let u = FractionElement::new(p, vec![ep, 0], &a.basis);
            let v = FractionElement::new(q, vec![1, eq], &a.basis);
            let pt = [ratio(x, 2), ratio(y, 3)];
            let (uv, vv) = (u.eval(&pt).unwrap(), v.eval(&pt).unwrap());
            prop_assert_eq!(u.add(&v).unwrap().eval(&pt).unwrap(), &uv + &vv);
            prop_assert_eq!(u.mul(&v).unwrap().eval(&pt).unwrap(), &uv * &vv);
            let c = u.clone().canonical();
            prop_assert_eq!(c.clone().canonical(), c.clone());
            prop_assert_eq!(c.eval(&pt).unwrap(), uv);
        }
    }
}
