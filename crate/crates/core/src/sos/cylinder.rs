use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{
    extract_squares, find_negative_point, gram_solve, value_list, Attempt, AttemptResult, GramOutcome, GramProblem,
    Ideal, SosCertificate, SosError, SosOptions, SosOutcome,
};
use crate::polycore::{height, Monomial, Rational, RealPolynomial, VarSet, Vars};

/// `x, y, z` with the circle in `(x, y)`.
pub fn cylinder_vars() -> Vars {
    VarSet::plain(&["x", "y", "z"])
}

fn h(r: &Rational) -> BigInt {
    if r.is_zero() {
        BigInt::zero()
    } else {
        height(r)
    }
}

/// Rational points `(x, y, z)` with `x² + y² = 1`: the circle points from
/// `t ↦ ((1−t²)/(1+t²), 2t/(1+t²))` over the value list plus `(−1, 0)`,
/// times the value list in `z`, ordered by total height, then height of
/// `y`, then position.
pub fn circle_grid() -> Vec<Vec<Rational>> {
    let vals = value_list(4);
    let one = Rational::one();
    let mut circle: Vec<(Rational, Rational)> = vals
        .iter()
        .map(|t| {
            let d = &one + t * t;
            ((&one - t * t) / &d, (t * Rational::from_integer(2.into())) / &d)
        })
        .collect();
    circle.push((-one.clone(), Rational::zero()));
    let mut pts = Vec::new();
    for (x, y) in &circle {
        for z in &vals {
            pts.push(vec![x.clone(), y.clone(), z.clone()]);
        }
    }
    let mut keyed: Vec<(BigInt, BigInt, usize)> =
        pts.iter().enumerate().map(|(i, p)| (h(&p[0]) + h(&p[1]) + h(&p[2]), h(&p[1]), i)).collect();
    keyed.sort();
    keyed.into_iter().map(|(_, _, i)| pts[i].clone()).collect()
}

/// Monomials `x^a y^e z^c` with `e ≤ 1`, `a + e + c ≤ k` and `c ≤ zmax`.
fn normal_basis(k: i32, zmax: i32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for c in 0..=zmax.min(k) {
        for e in 0..=1.min(k - c) {
            for a in 0..=(k - c - e) {
                out.push(Monomial(vec![a, e, c]));
            }
        }
    }
    out.sort();
    out
}

/// Certify `p ≥ 0` on `x² + y² = 1` as `p = Σ w_i q_i² + c·(1 − x² − y²)`,
/// escalating the square degree up to `degree_cap`, or refute at a grid
/// point of the cylinder.
pub fn cylinder_sos(p: &RealPolynomial, degree_cap: Option<u32>, opts: &SosOptions) -> Result<SosOutcome, SosError> {
    if p.nvars() != 3 || p.has_negative_exponents() {
        return Err(SosError::BasisMismatch("a polynomial in x, y, z".into()));
    }
    let vars = p.vars().clone();
    let ideal = Ideal::cylinder(&vars);
    let g = ideal.generator.clone();
    let reduced = ideal.reduce(p);
    let one = RealPolynomial::one(&vars);
    let finish = |squares: Vec<super::WeightedSquare>| -> Option<SosCertificate> {
        let mut rest = p.clone();
        for s in &squares {
            rest = &rest - &(&s.root * &s.root).scale(&s.weight);
        }
        let cofactor = if rest.is_zero() { RealPolynomial::zero(&vars) } else { rest.exact_div(&g)? };
        let cert = SosCertificate {
            ideal: Some(g.clone()),
            ideal_cofactor: Some(cofactor),
            ..SosCertificate::polynomial(p.clone(), one.clone(), 0, squares)
        };
        cert.verify().then_some(cert)
    };
    if reduced.is_zero() {
        return Ok(SosOutcome::Certified(finish(Vec::new()).expect("p lies in the ideal")));
    }
    if let Some(w) = find_negative_point(&circle_grid(), |pt| p.eval(pt).ok()) {
        return Ok(SosOutcome::NotPsd(w));
    }
    let deg = reduced.total_degree().unwrap_or(0) as u32;
    let cap = degree_cap.unwrap_or(deg + 4);
    let zmax = reduced.degree_in(2).unwrap_or(0) / 2;
    let mut attempts = Vec::new();
    for k in deg.div_ceil(2)..=cap / 2 {
        let basis = normal_basis(k as i32, zmax);
        let prob = GramProblem::from_monomials(reduced.clone(), &basis, Some(ideal.clone()));
        let result = match gram_solve(&prob, opts) {
            GramOutcome::Feasible { basis, gram } => match finish(extract_squares(&gram, &basis)?) {
                Some(cert) => return Ok(SosOutcome::Certified(cert)),
                None => AttemptResult::Indeterminate("cofactor division failed".into()),
            },
            GramOutcome::Infeasible(w) => AttemptResult::Infeasible(w),
            GramOutcome::Indeterminate(msg) => AttemptResult::Indeterminate(msg),
        };
        attempts.push(Attempt { level: 2 * k, result });
    }
    Ok(SosOutcome::Exhausted { cap, attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{parse_real, rat, ratio};

    fn cyl(s: &str) -> RealPolynomial {
        parse_real(s, &cylinder_vars()).unwrap()
    }

    #[test]
    fn grid_is_on_the_circle() {
        let g = circle_grid();
        assert_eq!(g[0], vec![rat(1), rat(0), rat(0)]);
        for p in &g {
            assert_eq!(&p[0] * &p[0] + &p[1] * &p[1], Rational::one());
        }
    }

    #[test]
    fn examples() {
        let o = SosOptions::default();
        let SosOutcome::Certified(c) = cylinder_sos(&cyl("1 - x"), None, &o).unwrap() else { panic!() };
        assert!(c.verify());
        assert_eq!(c.ideal_cofactor, Some(cyl("1/2")));
        let SosOutcome::Certified(c) = cylinder_sos(&cyl("z^2"), None, &o).unwrap() else { panic!() };
        assert!(c.verify());
        assert_eq!(c.squares.len(), 1);
        assert_eq!(c.ideal_cofactor, Some(cyl("0")));
        match cylinder_sos(&cyl("x - 2"), None, &o).unwrap() {
            SosOutcome::NotPsd(w) => {
                assert_eq!(w.point, vec![rat(1), rat(0), rat(0)]);
                assert_eq!(w.value, rat(-1));
            }
            other => panic!("{other:?}"),
        }
        let SosOutcome::Certified(c) = cylinder_sos(&cyl("x^2*z^2 + y^2*z^2 - 2*z + 2 + y"), None, &o).unwrap() else {
            panic!()
        };
        assert!(c.verify());
        let _ = ratio(1, 2);
    }
}
