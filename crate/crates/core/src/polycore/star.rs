use super::coeff::{ratio, Coeff, GaussianRational};
use super::monomial::Monomial;
use super::polynomial::{ComplexStarPolynomial, Polynomial, RealPolynomial};
use super::vars::{Layout, VarSet};
use super::PolyError;

/// The involution: conjugate coefficients and swap `z_j` with `zb_j`.
/// Variables outside a star layout are treated as hermitean.
pub fn star(p: &ComplexStarPolynomial) -> ComplexStarPolynomial {
    let vars = p.vars().clone();
    match vars.layout() {
        Layout::Star { d } => Polynomial::from_terms(
            &vars,
            p.terms().map(|(m, c)| {
                let mut e = m.0.clone();
                let (z, zb) = e.split_at_mut(d);
                z.swap_with_slice(zb);
                (Monomial(e), c.conj())
            }),
        ),
        _ => p.conj_coeffs(),
    }
}

/// `(re, im)` with `p = re + i·im` under `z_j = x_j + i·y_j`.
pub fn realify(p: &ComplexStarPolynomial) -> Result<(RealPolynomial, RealPolynomial), PolyError> {
    let d = match p.vars().layout() {
        Layout::Star { d } => d,
        _ => return Err(PolyError::NotStarVariables),
    };
    if p.has_negative_exponents() {
        return Err(PolyError::LaurentNotSupported);
    }
    let real = VarSet::real(d);
    let i = GaussianRational::i();
    let mut images = Vec::with_capacity(2 * d);
    for conjugate in [false, true] {
        for j in 0..d {
            let x = Polynomial::var(&real, j);
            let iy = Polynomial::var(&real, d + j).scale(&if conjugate { i.cneg() } else { i.clone() });
            images.push(&x + &iy);
        }
    }
    let q = p.substitute(&images, &real)?;
    Ok((q.real_part(), q.imag_part()))
}

/// `(a1, a2)` hermitean with `p = a1 + i·a2`.
pub fn hermitean_split(p: &ComplexStarPolynomial) -> (ComplexStarPolynomial, ComplexStarPolynomial) {
    let s = star(p);
    let half = GaussianRational::real(ratio(1, 2));
    let a1 = (p + &s).scale(&half);
    // (p - p*) / (2i) = -i/2 · (p - p*)
    let minus_half_i = GaussianRational::new(ratio(0, 1), ratio(-1, 2));
    let a2 = (p - &s).scale(&minus_half_i);
    (a1, a2)
}

/// Real and imaginary parts `f = a + i·b` as functions of `(x, y)`.
pub fn ab_split(f: &ComplexStarPolynomial) -> Result<(RealPolynomial, RealPolynomial), PolyError> {
    realify(f)
}

/// Complex image of a real polynomial under `x_j = (z_j + zb_j)/2`,
/// `y_j = (z_j - zb_j)/(2i)`.
pub fn complexify(p: &RealPolynomial, star_vars: &super::vars::Vars) -> Result<ComplexStarPolynomial, PolyError> {
    let d = match star_vars.layout() {
        Layout::Star { d } => d,
        _ => return Err(PolyError::NotStarVariables),
    };
    if p.nvars() != 2 * d {
        return Err(PolyError::ArityMismatch { expected: 2 * d, got: p.nvars() });
    }
    let half = GaussianRational::real(ratio(1, 2));
    let minus_half_i = GaussianRational::new(ratio(0, 1), ratio(-1, 2));
    let mut images = Vec::with_capacity(2 * d);
    for j in 0..d {
        let z = Polynomial::var(star_vars, j);
        let zb = Polynomial::var(star_vars, d + j);
        images.push((&z + &zb).scale(&half));
    }
    for j in 0..d {
        let z = Polynomial::var(star_vars, j);
        let zb = Polynomial::var(star_vars, d + j);
        images.push((&z - &zb).scale(&minus_half_i));
    }
    p.to_complex().substitute(&images, star_vars)
}
