//! The ℤ-grading of `A = ℝ[x, y, 1/(x²+y²)]`, membership in the subalgebra
//! `B = ℝ[x, y, X, Y]` with `X = x²/(x²+y²)`, `Y = xy/(x²+y²)`, and the
//! transfer of sum-of-squares certificates from `A` to `B`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::fracalg::{DenominatorBasis, FracError, FractionElement};
use crate::polycore::{Monomial, Rational, RealPolynomial, VarSet, Vars};
use crate::sos::SosCertificate;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GradedError {
    #[error("expected the single denominator x^2 + y^2")]
    BasisMismatch,
    #[error("binary form of odd degree {0}")]
    OddDegree(i64),
    #[error("expected a homogeneous binary form in x, y")]
    NotHomogeneous,
    #[error("element is not in B")]
    NotInB,
    #[error("certificate does not represent the given element")]
    CertificateMismatch,
    #[error("square {0} has a component of negative degree")]
    TransferFailure(usize),
    #[error(transparent)]
    Frac(#[from] FracError),
}

fn check_basis(basis: &DenominatorBasis) -> Result<(), GradedError> {
    let ok = basis.len() == 1 && basis.real_vars.len() == 2 && {
        let v = &basis.real_vars;
        let x2 = RealPolynomial::var(v, 0).pow(2);
        let y2 = RealPolynomial::var(v, 1).pow(2);
        basis.entries[0].n == &x2 + &y2
    };
    if ok {
        Ok(())
    } else {
        Err(GradedError::BasisMismatch)
    }
}

/// Homogeneous components `A_d`: numerators homogeneous of degree
/// `2k + d` over `(x²+y²)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedElement {
    pub components: BTreeMap<i64, FractionElement>,
    basis: Arc<DenominatorBasis>,
}

impl GradedElement {
    pub fn min_degree(&self) -> Option<i64> {
        self.components.keys().next().copied()
    }

    pub fn sum(&self) -> FractionElement {
        let zero = FractionElement::constant(Rational::zero(), &self.basis);
        self.components.values().fold(zero, |acc, c| acc.add(c).expect("same basis"))
    }
}

pub fn grade_decompose(elem: &FractionElement) -> Result<GradedElement, GradedError> {
    check_basis(elem.basis())?;
    let k = elem.exponents()[0] as i64;
    let components = elem
        .numerator()
        .homogeneous_parts()
        .into_iter()
        .map(|(j, part)| (j - 2 * k, FractionElement::new_raw(part, vec![k as u32], elem.basis())))
        .collect();
    Ok(GradedElement { components, basis: elem.basis().clone() })
}

/// `q(u, v, w)` with `q(x², xy, y²)` equal to a binary form.
#[derive(Clone, Debug, PartialEq)]
pub struct TernaryForm {
    pub poly: RealPolynomial,
}

impl TernaryForm {
    pub fn vars() -> Vars {
        VarSet::plain(&["u", "v", "w"])
    }

    /// `q(x², xy, y²)` over the given `x, y` variables.
    pub fn evaluate_binary(&self, xy: &Vars) -> RealPolynomial {
        let x = RealPolynomial::var(xy, 0);
        let y = RealPolynomial::var(xy, 1);
        let images = [&x * &x, &x * &y, &y * &y];
        self.poly.substitute(&images, xy).expect("polynomial images")
    }
}

/// `x^a y^b ↦ u^{a/2} w^{b/2}` for even `a`, else `u^{(a−1)/2} v w^{(b−1)/2}`.
pub fn ternary_lift(p: &RealPolynomial) -> Result<TernaryForm, GradedError> {
    if p.nvars() != 2 || p.has_negative_exponents() || !p.is_homogeneous() {
        return Err(GradedError::NotHomogeneous);
    }
    if let Some(d) = p.total_degree() {
        if d % 2 != 0 {
            return Err(GradedError::OddDegree(d));
        }
    }
    let vars = TernaryForm::vars();
    let poly = RealPolynomial::from_terms(&vars, p.terms().map(|(m, c)| (lift_monomial(m.exps()[0], m.exps()[1]), c.clone())));
    Ok(TernaryForm { poly })
}

fn lift_monomial(a: i32, b: i32) -> Monomial {
    if a % 2 == 0 {
        Monomial(vec![a / 2, 0, b / 2])
    } else {
        Monomial(vec![(a - 1) / 2, 1, (b - 1) / 2])
    }
}

/// An element of `B` written as a polynomial in `x, y, X, Y`; each term is
/// a binary monomial of degree `d` times a polynomial in `X, Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct BExpression {
    pub poly: RealPolynomial,
}

impl BExpression {
    pub fn vars() -> Vars {
        VarSet::plain(&["x", "y", "X", "Y"])
    }

    /// Value at `(x, y) ≠ 0`.
    pub fn eval(&self, point: &[Rational]) -> Option<Rational> {
        let n = &point[0] * &point[0] + &point[1] * &point[1];
        if n.is_zero() {
            return None;
        }
        let xx = &point[0] * &point[0] / &n;
        let xy = &point[0] * &point[1] / &n;
        self.poly.eval(&[point[0].clone(), point[1].clone(), xx, xy]).ok()
    }

    /// The same element as a fraction over `x² + y²`.
    pub fn to_fraction(&self, basis: &Arc<DenominatorBasis>) -> FractionElement {
        let v = &basis.real_vars;
        let x = RealPolynomial::var(v, 0);
        let y = RealPolynomial::var(v, 1);
        let top = self.poly.terms().map(|(m, _)| (m.exps()[2] + m.exps()[3]) as u32).max().unwrap_or(0);
        let n = &basis.entries[0].n;
        let mut num = RealPolynomial::zero(v);
        for (m, c) in self.poly.terms() {
            let e = m.exps();
            let k = (e[2] + e[3]) as u32;
            let t = &(&x.pow((e[0] + 2 * e[2] + e[3]) as u32) * &y.pow((e[1] + e[3]) as u32)) * &n.pow(top - k);
            num = &num + &t.scale(c);
        }
        FractionElement::new(num, vec![top], basis)
    }
}

/// `Some(expression)` iff every graded component has degree `≥ 0`.
pub fn b_membership(elem: &FractionElement) -> Result<Option<BExpression>, GradedError> {
    let g = grade_decompose(elem)?;
    if g.min_degree().is_some_and(|d| d < 0) {
        return Ok(None);
    }
    let vars = BExpression::vars();
    let k = elem.exponents()[0] as i32;
    let mut poly = RealPolynomial::zero(&vars);
    for (&d, comp) in &g.components {
        let d = d as i32;
        for (m, c) in comp.numerator().terms() {
            let (a, b) = (m.exps()[0], m.exps()[1]);
            // split off a binary monomial of degree d, lift the degree-0 rest
            let a1 = a.min(d);
            let b1 = d - a1;
            let lifted = lift_monomial(a - a1, b - b1);
            debug_assert_eq!(lifted.degree(), k as i64);
            // q(X, Y, 1 − X) for the lifted monomial u^p v^q w^r
            let (p, q, r) = (lifted.exps()[0], lifted.exps()[1], lifted.exps()[2]);
            let big_x = RealPolynomial::var(&vars, 2);
            let one_minus = &RealPolynomial::one(&vars) - &big_x;
            let head = RealPolynomial::term(&vars, Monomial(vec![a1, b1, p, q]), c.clone());
            poly = &poly + &(&head * &one_minus.pow(r as u32));
        }
    }
    Ok(Some(BExpression { poly }))
}

/// Bounded elements: every graded component has degree exactly 0.
pub fn is_bounded(elem: &FractionElement) -> Result<bool, GradedError> {
    Ok(grade_decompose(elem)?.components.keys().all(|&d| d == 0))
}

/// A square of a `B`-element in a transferred certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct BSquare {
    pub weight: Rational,
    pub element: FractionElement,
    pub expression: BExpression,
}

/// Re-read a certificate `f = Σ w_i f_i²` in `A` as one in `B`: every `f_i`
/// must lie in `B` when `f` does.
pub fn sos_transfer_to_b(cert: &SosCertificate, f: &FractionElement) -> Result<Vec<BSquare>, GradedError> {
    check_basis(f.basis())?;
    if b_membership(f)?.is_none() {
        return Err(GradedError::NotInB);
    }
    let basis = f.basis();
    let d = cert.denominator.clone().unwrap_or_else(|| RealPolynomial::one(&basis.real_vars));
    let cert_value = FractionElement::new(
        &cert.target * &cert.multiplier.pow(cert.multiplier_exponent),
        vec![cert.target_exponent],
        basis,
    );
    let multiplier_ok = cert.multiplier_exponent == 0 || (cert.multiplier.is_constant() && cert.multiplier.constant_term().is_one());
    if !cert.verify()
        || cert.ideal.is_some()
        || !multiplier_ok
        || (cert.denominator.is_some() && d != basis.entries[0].n)
        || cert_value != *f
    {
        return Err(GradedError::CertificateMismatch);
    }
    cert.squares
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let element = FractionElement::new(s.root.clone(), vec![s.denominator_exponent], basis);
            let expression = b_membership(&element)?.ok_or(GradedError::TransferFailure(i))?;
            Ok(BSquare { weight: s.weight.clone(), element, expression })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracalg::AlgebraDescriptor;
    use crate::polycore::{parse_real, rat};
    use crate::sos::{fraction_sos, SosOptions, SosOutcome};
    use proptest::prelude::*;

    fn basis() -> Arc<DenominatorBasis> {
        AlgebraDescriptor::punctured_plane().basis
    }

    fn frac(num: &str, k: u32) -> FractionElement {
        let b = basis();
        FractionElement::new(parse_real(num, &b.real_vars).unwrap(), vec![k], &b)
    }

    fn expr(s: &str) -> RealPolynomial {
        parse_real(s, &BExpression::vars()).unwrap()
    }

    #[test]
    fn decompositions() {
        let g = grade_decompose(&frac("x", 1)).unwrap();
        assert_eq!(g.components.keys().copied().collect::<Vec<_>>(), vec![-1]);
        let g = grade_decompose(&frac("x + 1", 0)).unwrap();
        assert_eq!(g.components.keys().copied().collect::<Vec<_>>(), vec![0, 1]);
        let f = frac("x^4 + y^4", 2);
        let g = grade_decompose(&f).unwrap();
        assert_eq!(g.components.keys().copied().collect::<Vec<_>>(), vec![0]);
        assert_eq!(g.sum(), f);
    }

    #[test]
    fn lifts() {
        let v = VarSet::real(1);
        let lift = |s: &str| ternary_lift(&parse_real(s, &v).unwrap()).unwrap().poly.to_string();
        assert_eq!(lift("x^4 + y^4"), "u^2 + w^2");
        assert_eq!(lift("x^3*y"), "u*v");
        assert_eq!(lift("x^2*y^2"), "u*w");
        assert_eq!(ternary_lift(&parse_real("x^3", &v).unwrap()), Err(GradedError::OddDegree(3)));
        assert_eq!(ternary_lift(&parse_real("x^2 + y", &v).unwrap()), Err(GradedError::NotHomogeneous));
    }

    #[test]
    fn membership() {
        let b = basis();
        let e = b_membership(&frac("x^4 + y^4", 2)).unwrap().unwrap();
        assert_eq!(e.poly, expr("X^2 + (1 - X)^2"));
        assert_eq!(e.to_fraction(&b), frac("x^4 + y^4", 2));
        assert_eq!(b_membership(&frac("x", 1)).unwrap(), None);
        let e = b_membership(&frac("x^3", 1)).unwrap().unwrap();
        assert_eq!(e.poly, expr("x*X"));
        assert!(is_bounded(&frac("x^2", 1)).unwrap());
        assert!(!is_bounded(&frac("x", 0)).unwrap());
        assert!(!is_bounded(&frac("1", 1)).unwrap());
    }

    #[test]
    fn transfer() {
        let o = SosOptions::default();
        for (num, k) in [("x^4", 2), ("1", 0), ("x^4 + y^4", 2), ("x^2*y^2 + x^4 + x^2 + y^2", 1)] {
            let f = frac(num, k);
            let SosOutcome::Certified(c) = fraction_sos(&f, 6, &o).unwrap() else { panic!("{num}") };
            let squares = transfer_ok(&c, &f);
            assert!(!squares.is_empty() || f.is_zero());
        }
        let f = frac("1", 1);
        let SosOutcome::Certified(c) = fraction_sos(&f, 6, &o).unwrap() else { panic!() };
        assert_eq!(sos_transfer_to_b(&c, &f), Err(GradedError::NotInB));
    }

    fn transfer_ok(c: &SosCertificate, f: &FractionElement) -> Vec<BSquare> {
        let squares = sos_transfer_to_b(c, f).unwrap();
        let b = f.basis();
        let mut sum = FractionElement::constant(rat(0), b);
        for s in &squares {
            assert_eq!(s.expression.to_fraction(b), s.element);
            sum = sum.add(&s.element.mul(&s.element).unwrap().scale(&s.weight)).unwrap();
        }
        assert_eq!(&sum, f);
        squares
    }

    fn binary_form() -> impl Strategy<Value = RealPolynomial> {
        (0u32..=10).prop_flat_map(|n| {
            prop::collection::vec(-5i64..6, (2 * n + 1) as usize).prop_map(move |c| {
                let v = VarSet::real(1);
                RealPolynomial::from_terms(
                    &v,
                    c.iter().enumerate().map(|(a, &x)| (Monomial(vec![a as i32, 2 * n as i32 - a as i32]), rat(x))),
                )
            })
        })
    }

    /// Random word in `x, y, X, Y` as a product of sums of generators.
    fn b_word() -> impl Strategy<Value = RealPolynomial> {
        prop::collection::vec(prop::collection::vec((0usize..5, -3i64..4), 1..4), 1..4).prop_map(|factors| {
            let v = BExpression::vars();
            factors.iter().fold(RealPolynomial::one(&v), |acc, f| {
                let s = f.iter().fold(RealPolynomial::zero(&v), |s, &(g, c)| {
                    let t = if g == 4 { RealPolynomial::one(&v) } else { RealPolynomial::var(&v, g) };
                    &s + &t.scale(&rat(c))
                });
                &acc * &s
            })
        })
    }

    proptest! {
        #[test]
        fn lift_round_trip(p in binary_form()) {
            let q = ternary_lift(&p).unwrap();
            prop_assert_eq!(q.evaluate_binary(p.vars()), p);
        }

        #[test]
        fn components_sum_back(e in b_word(), k in 0u32..3) {
            let b = basis();
            let f = BExpression { poly: e }.to_fraction(&b);
            let shifted = f.mul(&FractionElement::new_raw(RealPolynomial::one(&b.real_vars), vec![k], &b)).unwrap();
            prop_assert_eq!(grade_decompose(&shifted).unwrap().sum(), shifted);
        }

        #[test]
        fn words_are_members(e in b_word()) {
            let b = basis();
            let f = BExpression { poly: e.clone() }.to_fraction(&b);
            let back = b_membership(&f).unwrap().expect("generator words lie in B");
            prop_assert_eq!(back.to_fraction(&b), f.clone());
            for (i, j) in [(1, 0), (1, 2), (-3, 1), (2, -5)] {
                let pt = [rat(i), rat(j)];
                prop_assert_eq!(back.eval(&pt), Some(f.eval(&pt).unwrap()));
            }
        }
    }
}
