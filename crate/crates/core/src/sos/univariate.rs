use num_traits::{One, Zero};

use super::{
    gram_solve, extract_squares, Attempt, AttemptResult, GramOutcome, GramProblem, SosCertificate, SosError,
    SosOptions, SosOutcome, WeightedSquare, Witness,
};
use crate::polycore::univariate::{is_nonnegative, negative_point, UPoly};
use crate::polycore::{Monomial, Rational, RealPolynomial};

/// SOS certificate for a polynomial in one variable: square-free
/// decomposition splits off an exact square, and the remaining strictly
/// positive factor goes through a Gram solve. A Sturm-isolated point with
/// negative value refutes.
pub fn univariate_sos(p: &RealPolynomial, opts: &SosOptions) -> Result<SosOutcome, SosError> {
    let vars = p.vars().clone();
    let used: Vec<usize> = (0..p.nvars()).filter(|&k| p.degree_in(k).unwrap_or(0) > 0).collect();
    if used.len() > 1 || p.has_negative_exponents() {
        return Err(SosError::NotUnivariate);
    }
    let k = used.first().copied().unwrap_or(0);
    let one = RealPolynomial::one(&vars);
    if p.is_zero() {
        return Ok(SosOutcome::Certified(SosCertificate::polynomial(p.clone(), one, 0, Vec::new())));
    }
    let u = if p.nvars() == 0 {
        UPoly::constant(p.constant_term())
    } else {
        UPoly::from_poly(p, k).ok_or(SosError::NotUnivariate)?
    };
    if !is_nonnegative(&u) {
        let t = negative_point(&u).expect("a polynomial that is not nonnegative has a negative point");
        let mut point = vec![Rational::zero(); p.nvars()];
        if !point.is_empty() {
            point[k] = t.clone();
        }
        return Ok(SosOutcome::NotPsd(Witness { value: u.eval(&t), point }));
    }
    let mut square = UPoly::constant(Rational::one());
    let mut positive = UPoly::constant(u.lc());
    for (i, s) in u.squarefree_decomposition().iter().enumerate() {
        let mult = i as u32 + 1;
        square = square.mul(&s.pow(mult / 2));
        if mult % 2 == 1 {
            positive = positive.mul(s);
        }
    }
    let to_poly = |q: &UPoly| if p.nvars() == 0 { RealPolynomial::constant(&vars, q.lc()) } else { q.to_poly(&vars, k) };
    let s_poly = to_poly(&square);
    let squares = match positive.degree() {
        Some(0) | None => vec![WeightedSquare { weight: positive.lc(), root: s_poly, denominator_exponent: 0 }],
        Some(deg) => {
            let n = p.nvars();
            let basis: Vec<Monomial> = (0..=deg / 2).map(|e| Monomial::var(n, k).pow(e as u32)).collect();
            let prob = GramProblem::from_monomials(to_poly(&positive), &basis, None);
            match gram_solve(&prob, opts) {
                GramOutcome::Feasible { basis, gram } => extract_squares(&gram, &basis)?
                    .into_iter()
                    .map(|w| WeightedSquare { root: &w.root * &s_poly, ..w })
                    .collect(),
                GramOutcome::Infeasible(w) => {
                    return Ok(SosOutcome::Exhausted {
                        cap: 0,
                        attempts: vec![Attempt { level: 0, result: AttemptResult::Infeasible(w) }],
                    })
                }
                GramOutcome::Indeterminate(msg) => {
                    return Ok(SosOutcome::Exhausted {
                        cap: 0,
                        attempts: vec![Attempt { level: 0, result: AttemptResult::Indeterminate(msg) }],
                    })
                }
            }
        }
    };
    Ok(SosOutcome::Certified(SosCertificate::polynomial(p.clone(), one, 0, squares)))
}
