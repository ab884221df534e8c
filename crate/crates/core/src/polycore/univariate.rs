//! Dense univariate polynomials over ℚ: gcd, square-free decomposition,
//! Sturm sequences and real-root isolation.

use num_traits::{One, Signed, Zero};

use super::coeff::{height, rat, simplest_between, Rational};
use super::monomial::Monomial;
use super::polynomial::RealPolynomial;
use super::vars::Vars;

/// Coefficients from the constant term upwards, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly(pub Vec<Rational>);

impl UPoly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        UPoly(c)
    }

    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// Read a polynomial in variable `var`; other variables must be absent.
    pub fn from_poly(p: &RealPolynomial, var: usize) -> Option<Self> {
        let mut c = Vec::new();
        for (m, v) in p.terms() {
            if m.0.iter().enumerate().any(|(i, &e)| i != var && e != 0) || m.0[var] < 0 {
                return None;
            }
            let k = m.0[var] as usize;
            if c.len() <= k {
                c.resize(k + 1, Rational::zero());
            }
            c[k] = v.clone();
        }
        Some(Self::new(c))
    }

    pub fn to_poly(&self, vars: &Vars, var: usize) -> RealPolynomial {
        RealPolynomial::from_terms(
            vars,
            self.0.iter().enumerate().map(|(k, c)| {
                let mut e = vec![0; vars.len()];
                e[var] = k as i32;
                (Monomial(e), c.clone())
            }),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn lc(&self) -> Rational {
        self.0.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::new(self.0.iter().map(|c| c * s).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lc().recip())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        Self::new(
            (0..n)
                .map(|k| {
                    self.0.get(k).cloned().unwrap_or_else(Rational::zero)
                        + o.0.get(k).cloned().unwrap_or_else(Rational::zero)
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(Rational::one()), |acc, _| acc.mul(self))
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by zero polynomial");
        let inv = d.lc().recip();
        let mut r = self.0.clone();
        let mut q = vec![Rational::zero(); self.0.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let c = &r[k] * &inv;
            if !c.is_zero() {
                for (i, dc) in d.0.iter().enumerate() {
                    r[k - dd + i] -= &c * dc;
                }
                q[k - dd] = c;
            }
            r.pop();
        }
        (Self::new(q), Self::new(r))
    }

    pub fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Yun's algorithm: monic square-free `s_1, s_2, ...` with
    /// `self = lc · Π s_i^i`.
    pub fn squarefree_decomposition(&self) -> Vec<Self> {
        let f = self.monic();
        if f.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = c.add(&b.derivative().neg());
        let mut out = Vec::new();
        loop {
            let s = b.gcd(&d);
            out.push(s.clone());
            b = b.div_rem(&s).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&s).0;
            d = c.add(&b.derivative().neg());
        }
        while out.last().is_some_and(|s| s.degree() == Some(0)) {
            out.pop();
        }
        out
    }

    pub fn squarefree_part(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return Self::constant(Rational::one());
        }
        self.div_rem(&self.gcd(&self.derivative())).0.monic()
    }

    pub fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1.neg();
            seq.push(r);
        }
        seq.pop();
        seq
    }

    /// Bound `B` with every real root in `(-B, B)`.
    pub fn root_bound(&self) -> Rational {
        let lc = self.lc().abs();
        let m = self.0[..self.0.len().saturating_sub(1)]
            .iter()
            .map(|c| c.abs() / &lc)
            .max()
            .unwrap_or_else(Rational::zero);
        m + Rational::one()
    }
}

fn sign_changes_at(seq: &[UPoly], t: &Rational) -> usize {
    count_changes(seq.iter().map(|p| p.eval(t)))
}

fn sign_changes_at_infinity(seq: &[UPoly], positive: bool) -> usize {
    count_changes(seq.iter().map(|p| {
        let lc = p.lc();
        let odd = p.degree().unwrap_or(0) % 2 == 1;
        if !positive && odd {
            -lc
        } else {
            lc
        }
    }))
}

fn count_changes<I: Iterator<Item = Rational>>(vals: I) -> usize {
    let mut last: Option<bool> = None;
    let mut n = 0;
    for v in vals {
        if v.is_zero() {
            continue;
        }
        let pos = v.is_positive();
        if last.is_some_and(|l| l != pos) {
            n += 1;
        }
        last = Some(pos);
    }
    n
}

/// Number of distinct real roots of a square-free `p` in `(a, b]`.
pub fn count_roots_in(seq: &[UPoly], a: &Rational, b: &Rational) -> usize {
    sign_changes_at(seq, a) - sign_changes_at(seq, b)
}

/// Number of distinct real roots.
pub fn count_real_roots(p: &UPoly) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let seq = p.squarefree_part().sturm_sequence();
    sign_changes_at_infinity(&seq, false) - sign_changes_at_infinity(&seq, true)
}

/// Disjoint half-open intervals `(a, b]`, each containing exactly one real
/// root of `p`, in increasing order.
pub fn isolate_real_roots(p: &UPoly) -> Vec<(Rational, Rational)> {
    if p.degree().unwrap_or(0) == 0 {
        return Vec::new();
    }
    let s = p.squarefree_part();
    let seq = s.sturm_sequence();
    let b = s.root_bound();
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = count_roots_in(&seq, &lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            out.push((lo, hi));
            continue;
        }
        let mid = simplest_between(&((&lo * rat(3) + &hi) / rat(4)), &((&lo + &hi * rat(3)) / rat(4)));
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    out.sort();
    out
}

/// A simple rational point at which `p < 0`, or `None` when `p ≥ 0` on
/// all of ℝ. Candidates are the simplest rationals in each gap between
/// isolated roots.
pub fn negative_point(p: &UPoly) -> Option<Rational> {
    if p.is_zero() {
        return None;
    }
    let mut roots = isolate_real_roots(p);
    let seq = p.squarefree_part().sturm_sequence();
    let mut candidates = Vec::new();
    match (roots.first(), roots.last()) {
        (Some((a, _)), Some((_, b))) => {
            candidates.push(if a.is_negative() { a.floor() } else { Rational::zero() });
            candidates.push(if b.is_negative() { Rational::zero() } else { b.floor() + Rational::one() });
        }
        _ => candidates.push(Rational::zero()),
    }
    for i in 1..roots.len() {
        while roots[i].0 <= roots[i - 1].1 {
            roots[i - 1] = refine(&seq, &roots[i - 1]);
            roots[i] = refine(&seq, &roots[i]);
        }
        let (lo, hi) = (&roots[i - 1].1, &roots[i].0);
        let t = simplest_between(lo, hi);
        candidates.push(if p.eval(&t).is_zero() { (lo + hi) / rat(2) } else { t });
    }
    candidates
        .into_iter()
        .filter(|t| p.eval(t).is_negative())
        .min_by(|x, y| height(x).cmp(&height(y)).then(x.cmp(y)))
}

/// Halve an isolating interval, keeping the half with the root.
fn refine(seq: &[UPoly], (a, b): &(Rational, Rational)) -> (Rational, Rational) {
    let mid = (a + b) / rat(2);
    if count_roots_in(seq, a, &mid) == 1 {
        (a.clone(), mid)
    } else {
        (mid, b.clone())
    }
}

/// Whether `p ≥ 0` on ℝ: positive leading coefficient (or non-negative
/// constant) and no real root of odd multiplicity.
pub fn is_nonnegative(p: &UPoly) -> bool {
    match p.degree() {
        None => true,
        Some(0) => !p.lc().is_negative(),
        Some(d) if d % 2 == 1 => false,
        Some(_) => {
            if p.lc().is_negative() {
                return false;
            }
            p.squarefree_decomposition()
                .iter()
                .enumerate()
                .filter(|(i, _)| (i + 1) % 2 == 1)
                .all(|(_, s)| count_real_roots(s) == 0)
        }
    }
}
