//! Coefficient fields: the rationals and the Gaussian rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number. Always in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Field operations shared by every coefficient type in the crate.
///
/// The by-reference operations avoid cloning big integers on every step.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Zero + One + Send + Sync + 'static {
    fn cadd(&self, other: &Self) -> Self;
    fn csub(&self, other: &Self) -> Self;
    fn cmul(&self, other: &Self) -> Self;
    fn cneg(&self) -> Self;
    /// Multiplicative inverse. Panics on zero.
    fn cinv(&self) -> Self;
    fn from_rational(r: Rational) -> Self;
    /// Complex conjugate; the identity on real fields.
    fn conj(&self) -> Self;
    fn real_part(&self) -> Rational;

    fn cdiv(&self, other: &Self) -> Self {
        self.cmul(&other.cinv())
    }

    fn scale(&self, r: &Rational) -> Self {
        self.cmul(&Self::from_rational(r.clone()))
    }

    fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }
}

impl Coeff for Rational {
    fn cadd(&self, other: &Self) -> Self {
        self + other
    }
    fn csub(&self, other: &Self) -> Self {
        self - other
    }
    fn cmul(&self, other: &Self) -> Self {
        self * other
    }
    fn cneg(&self) -> Self {
        -self
    }
    fn cinv(&self) -> Self {
        self.recip()
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn real_part(&self) -> Rational {
        self.clone()
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

/// `n / 1`.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d`, reduced. Panics when `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator and denominator may both overflow f64 while the ratio does not
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Best rational approximation of `x` with denominator at most `max_den`
/// (continued-fraction convergents and the last admissible semiconvergent).
pub fn rational_approx(x: f64, max_den: u64) -> Rational {
    match Rational::from_float(x) {
        Some(exact) => limit_denominator(&exact, &BigInt::from(max_den.max(1))),
        None => rat(0),
    }
}

/// Closest rational to `x` whose denominator does not exceed `max_den`.
pub fn limit_denominator(x: &Rational, max_den: &BigInt) -> Rational {
    if x.denom() <= max_den {
        return x.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) =
        (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut n = x.numer().clone();
    let mut d = x.denom().clone();
    loop {
        let a = n.div_floor(&d);
        let q2 = &q0 + &a * &q1;
        if &q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let r = &n - &a * &d;
        n = std::mem::replace(&mut d, r);
        if d.is_zero() {
            break;
        }
    }
    let k = (max_den - &q0) / &q1;
    let bound1 = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let bound2 = Rational::new(p1, q1);
    if (&bound2 - x).abs() <= (&bound1 - x).abs() {
        bound2
    } else {
        bound1
    }
}

/// The rational of least height in the closed interval `[lo, hi]`
/// (Stern–Brocot descent). Integers of smallest magnitude are preferred.
pub fn simplest_between(lo: &Rational, hi: &Rational) -> Rational {
    let (lo, hi) = if lo <= hi { (lo.clone(), hi.clone()) } else { (hi.clone(), lo.clone()) };
    if lo <= rat(0) && hi >= rat(0) {
        return rat(0);
    }
    if hi < rat(0) {
        return -simplest_between(&-hi, &-lo);
    }
    simplest_positive(&lo, &hi)
}

fn simplest_positive(lo: &Rational, hi: &Rational) -> Rational {
    let fl = lo.ceil();
    if fl <= *hi {
        return fl;
    }
    // lo and hi share the integer part
    let n = lo.floor();
    let lo_f = lo - &n;
    let hi_f = hi - &n;
    // 1/hi_f <= 1/x <= 1/lo_f
    let inner = simplest_positive(&hi_f.recip(), &lo_f.recip());
    n + inner.recip()
}

/// Height `max(|p|, q)` of a rational in lowest terms.
pub fn height(r: &Rational) -> BigInt {
    let n = r.numer().abs();
    let d = r.denom().clone();
    if n > d {
        n
    } else {
        d
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// An element `re + i·im` of ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: rat(0) }
    }

    pub fn i() -> Self {
        Self { re: rat(0), im: rat(1) }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        Self { re: rat(re), im: rat(im) }
    }

    /// `|c|²`
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl Coeff for GaussianRational {
    fn cadd(&self, o: &Self) -> Self {
        Self::new(&self.re + &o.re, &self.im + &o.im)
    }
    fn csub(&self, o: &Self) -> Self {
        Self::new(&self.re - &o.re, &self.im - &o.im)
    }
    fn cmul(&self, o: &Self) -> Self {
        Self::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
    fn cneg(&self) -> Self {
        Self::new(-&self.re, -&self.im)
    }
    fn cinv(&self) -> Self {
        let n = self.norm_sqr();
        assert!(!n.is_zero(), "inverse of zero");
        Self::new(&self.re / &n, -&self.im / &n)
    }
    fn from_rational(r: Rational) -> Self {
        Self::real(r)
    }
    fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }
    fn real_part(&self) -> Rational {
        self.re.clone()
    }
    fn scale(&self, r: &Rational) -> Self {
        Self::new(&self.re * r, &self.im * r)
    }
}

impl Add for GaussianRational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        self.cadd(&o)
    }
}

impl Sub for GaussianRational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self.csub(&o)
    }
}

impl Mul for GaussianRational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        self.cmul(&o)
    }
}

impl Neg for GaussianRational {
    type Output = Self;
    fn neg(self) -> Self {
        self.cneg()
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::from_ints(0, 0)
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::from_ints(1, 0)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.re)),
            (true, false) => write!(f, "{}*i", format_rational(&self.im)),
            (false, false) => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(
                    f,
                    "{} {} {}*i",
                    format_rational(&self.re),
                    sign,
                    format_rational(&self.im.abs())
                )
            }
        }
    }
}
