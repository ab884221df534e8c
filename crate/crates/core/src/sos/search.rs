use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{
    extract_squares, gram_solve, newton_basis, vars_from_names, Attempt, AttemptResult, GramOutcome, GramProblem,
    SosCertificate, SosError, SosOptions, SosOutcome, WeightedSquare, Witness,
};
use crate::fracalg::FractionElement;
use crate::polycore::{height, Monomial, Rational, RealPolynomial};

/// Smallest `m ≤ m_max` with `w^m · p` certified SOS, else `Exhausted`.
pub fn multiplier_search(
    p: &RealPolynomial,
    w: &RealPolynomial,
    m_max: u32,
    opts: &SosOptions,
) -> Result<SosOutcome, SosError> {
    if w.is_zero() {
        return Err(SosError::ZeroMultiplier);
    }
    let mut attempts = Vec::new();
    let mut target = p.clone();
    for m in 0..=m_max {
        if m > 0 {
            target = &target * w;
        }
        if target.is_zero() {
            return Ok(SosOutcome::Certified(SosCertificate::polynomial(p.clone(), w.clone(), m, Vec::new())));
        }
        let basis = newton_basis(&target)?;
        let result = if basis.is_empty() {
            AttemptResult::Indeterminate("empty Newton basis".into())
        } else {
            let prob = GramProblem::from_monomials(target.clone(), &basis, None);
            match gram_solve(&prob, opts) {
                GramOutcome::Feasible { basis, gram } => {
                    let squares = extract_squares(&gram, &basis)?;
                    return Ok(SosOutcome::Certified(SosCertificate::polynomial(p.clone(), w.clone(), m, squares)));
                }
                GramOutcome::Infeasible(wit) => AttemptResult::Infeasible(wit),
                GramOutcome::Indeterminate(msg) => AttemptResult::Indeterminate(msg),
            }
        };
        attempts.push(Attempt { level: m, result });
    }
    Ok(SosOutcome::Exhausted { cap: m_max, attempts })
}

/// `p(x, 1)·t^{deg p}` style total-degree homogenization with a new last
/// variable `name`.
pub fn homogenize(p: &RealPolynomial, name: &str) -> RealPolynomial {
    let mut names: Vec<String> = p.vars().names().to_vec();
    names.push(name.to_string());
    let vars = vars_from_names(&names);
    let deg = p.total_degree().unwrap_or(0);
    RealPolynomial::from_terms(
        &vars,
        p.terms().map(|(m, c)| {
            let mut e = m.0.clone();
            e.push((deg - m.degree()) as i32);
            (Monomial(e), c.clone())
        }),
    )
}

/// Set variable `var` to 1 and drop it.
pub fn dehomogenize(p: &RealPolynomial, var: usize) -> RealPolynomial {
    let names: Vec<String> =
        p.vars().names().iter().enumerate().filter(|&(i, _)| i != var).map(|(_, n)| n.clone()).collect();
    let vars = vars_from_names(&names);
    RealPolynomial::from_terms(
        &vars,
        p.terms().map(|(m, c)| {
            let mut e = m.0.clone();
            e.remove(var);
            (Monomial(e), c.clone())
        }),
    )
}

/// From a certificate for `g` to one for `g/p²`, given that `p` divides
/// every root and changes sign: `p(u) < 0 < p(v)`.
pub fn divide_out_squares(
    cert: &SosCertificate,
    p: &RealPolynomial,
    u: &[Rational],
    v: &[Rational],
) -> Result<SosCertificate, SosError> {
    let pu = p.eval(u)?;
    let pv = p.eval(v)?;
    if !(pu.is_negative() && pv.is_positive()) {
        return Err(SosError::BadWitness);
    }
    if cert.denominator.is_some() || cert.ideal.is_some() {
        return Err(SosError::BasisMismatch("a plain polynomial certificate".into()));
    }
    let p2 = p * p;
    let target = cert.target.exact_div(&p2).ok_or_else(|| SosError::NotDivisible(cert.target.to_string()))?;
    let squares = cert
        .squares
        .iter()
        .map(|s| {
            let root = s.root.exact_div(p).ok_or_else(|| SosError::NotDivisible(s.root.to_string()))?;
            Ok(WeightedSquare { root, ..s.clone() })
        })
        .collect::<Result<Vec<_>, SosError>>()?;
    Ok(SosCertificate { target, squares, ..cert.clone() })
}

/// `0, 1, −1, 2, −2, 1/2, −1/2, 3, …`: rationals with `max(|num|, den) ≤ h`,
/// ordered by that height, then denominator, then magnitude, positive first.
pub fn value_list(h: i64) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    for level in 1..=h {
        let mut fresh = Vec::new();
        for den in 1..=level {
            for num in 1..=level {
                if num.max(den) != level || num_integer::gcd(num, den) != 1 {
                    continue;
                }
                fresh.push((den, num));
            }
        }
        fresh.sort();
        for (den, num) in fresh {
            let r = Rational::new(BigInt::from(num), BigInt::from(den));
            out.push(r.clone());
            out.push(-r);
        }
    }
    out
}

/// Points of `V^n` ordered by total height, then height of the second
/// coordinate, then position; at most `limit` points, with `V` shrunk so
/// the full product stays within `limit`.
pub fn rational_grid(n: usize, limit: usize) -> Vec<Vec<Rational>> {
    let mut h = 4;
    let vals = loop {
        let v = value_list(h);
        if h == 1 || v.len().checked_pow(n as u32).is_some_and(|c| c <= limit) {
            break v;
        }
        h -= 1;
    };
    let hs: Vec<BigInt> = vals.iter().map(height_of).collect();
    let mut idx = vec![0usize; n];
    let mut pts: Vec<(BigInt, BigInt, Vec<usize>)> = Vec::new();
    loop {
        let total: BigInt = idx.iter().map(|&i| hs[i].clone()).sum();
        let second = if n > 1 { hs[idx[1]].clone() } else { BigInt::zero() };
        pts.push((total, second, idx.clone()));
        let mut k = 0;
        loop {
            if k == n {
                pts.sort();
                return pts.into_iter().take(limit).map(|(_, _, ix)| ix.iter().map(|&i| vals[i].clone()).collect()).collect();
            }
            idx[k] += 1;
            if idx[k] < vals.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if n == 0 {
            return vec![Vec::new()];
        }
    }
}

fn height_of(r: &Rational) -> BigInt {
    if r.is_zero() {
        BigInt::zero()
    } else {
        height(r)
    }
}

/// First grid point (in grid order) where `f` is defined and negative.
pub fn find_negative_point<F>(points: &[Vec<Rational>], f: F) -> Option<Witness>
where
    F: Fn(&[Rational]) -> Option<Rational>,
{
    points.iter().find_map(|pt| {
        let v = f(pt)?;
        v.is_negative().then(|| Witness { point: pt.clone(), value: v })
    })
}

/// Certify a fraction over a single denominator `n` as a sum of squares of
/// fractions, or refute it at a rational point of the domain.
pub fn fraction_sos(elem: &FractionElement, m_max: u32, opts: &SosOptions) -> Result<SosOutcome, SosError> {
    let basis = elem.basis();
    if basis.len() != 1 {
        return Err(SosError::BasisMismatch("a single-denominator basis".into()));
    }
    let entry = &basis.entries[0];
    let nvars = basis.real_vars.len();
    let grid = rational_grid(nvars, 4096);
    if let Some(w) = find_negative_point(&grid, |pt| elem.eval(pt).ok()) {
        return Ok(SosOutcome::NotPsd(w));
    }
    let k = elem.exponents()[0];
    let n = &entry.n;
    let (lifted, k_even) = if k % 2 == 1 { (elem.numerator() * n, k + 1) } else { (elem.numerator().clone(), k) };
    let found = multiplier_search(&lifted, n, m_max, opts)?;
    let SosOutcome::Certified(c) = found else {
        return Ok(found);
    };
    let m = c.multiplier_exponent;
    let squares = if m % 2 == 0 {
        let e = (m + k_even) / 2;
        c.squares.into_iter().map(|s| WeightedSquare { denominator_exponent: e, ..s }).collect()
    } else {
        // n = a² + b² turns the odd power into squares
        let e = (m + 1 + k_even) / 2;
        c.squares
            .into_iter()
            .flat_map(|s| {
                [&entry.a, &entry.b].into_iter().filter(|f| !f.is_zero()).map(move |f| WeightedSquare {
                    weight: s.weight.clone(),
                    root: &s.root * f,
                    denominator_exponent: e,
                })
            })
            .collect()
    };
    let vars = elem.numerator().vars();
    let cert = SosCertificate {
        target: elem.numerator().clone(),
        denominator: Some(n.clone()),
        target_exponent: k,
        multiplier: RealPolynomial::one(vars),
        multiplier_exponent: 0,
        squares,
        ideal: None,
        ideal_cofactor: None,
    };
    debug_assert!(cert.verify());
    Ok(SosOutcome::Certified(cert))
}
