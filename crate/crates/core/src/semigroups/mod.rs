//! The *-semigroups `ℤ²`, `ℕ₀×ℤ` and `{(k, n) ∈ ℤ² : k + n ≥ 0}`, their
//! semigroup *-algebras, the maps to function algebras, truncated positivity
//! checks and hermitean-square certification.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::fracalg::{AlgebraDescriptor, FracError, FractionElement};
use crate::graded::{b_membership, sos_transfer_to_b, BExpression, GradedError};
use crate::polycore::linalg::{hermitian_ldl, quadratic_form, Ldl, PsdCheck};
use crate::polycore::{Coeff, GaussianRational, Polynomial, Rational, RealPolynomial};
use crate::sos::{cylinder_sos, cylinder_vars, fraction_sos, Attempt, SosCertificate, SosError, SosOptions, SosOutcome};

type G = GaussianRational;
pub type Index = (i64, i64);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemigroupError {
    #[error("index ({}, {}) is not in {semigroup}", .index.0, .index.1)]
    InvalidIndex { semigroup: StarSemigroup, index: Index },
    #[error("elements of different semigroups")]
    SemigroupMismatch,
    #[error("element is not hermitean")]
    NotHermitean,
    #[error("functional has no value at ({}, {})", .0.0, .0.1)]
    MissingValue(Index),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown semigroup '{0}' (expected Z2, N0xZ or Nplus)")]
    UnknownSemigroup(String),
    #[error("pullback failed: {0}")]
    Pullback(String),
    #[error(transparent)]
    Sos(#[from] SosError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Frac(#[from] FracError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StarSemigroup {
    /// `ℤ²` with `(k, n)* = (n, k)`.
    Z2,
    /// `ℕ₀ × ℤ` with `(k, n)* = (k, −n)`.
    N0xZ,
    /// `k + n ≥ 0` inside `ℤ²`, with `(k, n)* = (n, k)`.
    Nplus,
}

impl StarSemigroup {
    pub const ALL: [StarSemigroup; 3] = [StarSemigroup::Z2, StarSemigroup::N0xZ, StarSemigroup::Nplus];

    pub fn star(self, (k, n): Index) -> Index {
        match self {
            StarSemigroup::Z2 | StarSemigroup::Nplus => (n, k),
            StarSemigroup::N0xZ => (k, -n),
        }
    }

    pub fn contains(self, (k, n): Index) -> bool {
        match self {
            StarSemigroup::Z2 => true,
            StarSemigroup::N0xZ => k >= 0,
            StarSemigroup::Nplus => k + n >= 0,
        }
    }

    /// The box `|k|, |n| ≤ r` intersected with the semigroup.
    pub fn window(self, r: i64) -> Vec<Index> {
        let mut out = Vec::new();
        for k in -r..=r {
            for n in -r..=r {
                if self.contains((k, n)) {
                    out.push((k, n));
                }
            }
        }
        out
    }
}

impl fmt::Display for StarSemigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StarSemigroup::Z2 => "Z2",
            StarSemigroup::N0xZ => "N0xZ",
            StarSemigroup::Nplus => "Nplus",
        })
    }
}

impl FromStr for StarSemigroup {
    type Err = SemigroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "z2" => Ok(StarSemigroup::Z2),
            "n0xz" => Ok(StarSemigroup::N0xZ),
            "nplus" => Ok(StarSemigroup::Nplus),
            _ => Err(SemigroupError::UnknownSemigroup(s.to_string())),
        }
    }
}

type Support = BTreeMap<Index, G>;

fn add_into(map: &mut Support, idx: Index, c: &G) {
    if c.is_zero() {
        return;
    }
    let entry = map.entry(idx).or_insert_with(G::zero);
    *entry = entry.cadd(c);
    if entry.is_zero() {
        map.remove(&idx);
    }
}

fn convolve_raw(a: &Support, b: &Support) -> Support {
    let mut out = Support::new();
    for (&(k1, n1), c1) in a {
        for (&(k2, n2), c2) in b {
            add_into(&mut out, (k1 + k2, n1 + n2), &c1.cmul(c2));
        }
    }
    out
}

/// Finite linear combination of semigroup elements.
#[derive(Clone, Debug, PartialEq)]
pub struct SemigroupElement {
    semigroup: StarSemigroup,
    support: Support,
}

impl SemigroupElement {
    pub fn new<I: IntoIterator<Item = (Index, G)>>(semigroup: StarSemigroup, terms: I) -> Result<Self, SemigroupError> {
        let mut support = Support::new();
        for (idx, c) in terms {
            if !semigroup.contains(idx) {
                return Err(SemigroupError::InvalidIndex { semigroup, index: idx });
            }
            add_into(&mut support, idx, &c);
        }
        Ok(Self { semigroup, support })
    }

    pub fn zero(semigroup: StarSemigroup) -> Self {
        Self { semigroup, support: Support::new() }
    }

    pub fn constant(semigroup: StarSemigroup, c: G) -> Self {
        Self::new(semigroup, [((0, 0), c)]).expect("the identity lies in every semigroup")
    }

    pub fn delta(semigroup: StarSemigroup, idx: Index) -> Result<Self, SemigroupError> {
        Self::new(semigroup, [(idx, G::one())])
    }

    pub fn semigroup(&self) -> StarSemigroup {
        self.semigroup
    }

    pub fn support(&self) -> &BTreeMap<Index, G> {
        &self.support
    }

    pub fn coeff(&self, idx: Index) -> G {
        self.support.get(&idx).cloned().unwrap_or_else(G::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    fn same(&self, o: &Self) -> Result<(), SemigroupError> {
        if self.semigroup == o.semigroup {
            Ok(())
        } else {
            Err(SemigroupError::SemigroupMismatch)
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, SemigroupError> {
        self.same(o)?;
        let mut support = self.support.clone();
        for (&idx, c) in &o.support {
            add_into(&mut support, idx, c);
        }
        Ok(Self { semigroup: self.semigroup, support })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, SemigroupError> {
        self.add(&o.scale(&G::from_int(-1)))
    }

    pub fn scale(&self, c: &G) -> Self {
        let mut support = Support::new();
        for (&idx, v) in &self.support {
            add_into(&mut support, idx, &v.cmul(c));
        }
        Self { semigroup: self.semigroup, support }
    }

    /// Involution on indices, conjugation on coefficients.
    pub fn star(&self) -> Self {
        let support = self.support.iter().map(|(&idx, c)| (self.semigroup.star(idx), c.conj())).collect();
        Self { semigroup: self.semigroup, support }
    }

    /// Bilinear extension of index addition.
    pub fn convolve(&self, o: &Self) -> Result<Self, SemigroupError> {
        self.same(o)?;
        Ok(Self { semigroup: self.semigroup, support: convolve_raw(&self.support, &o.support) })
    }

    pub fn is_hermitean(&self) -> bool {
        self.star() == *self
    }

    /// Lines `k n re im`; blank lines and `#` comments are skipped, a
    /// missing imaginary part is zero.
    pub fn parse(text: &str, semigroup: StarSemigroup) -> Result<Self, SemigroupError> {
        let mut terms = Vec::new();
        for (idx, c, _) in parse_lines(text)? {
            terms.push((idx, c));
        }
        Self::new(semigroup, terms)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (&(k, n), c) in &self.support {
            s.push_str(&format!("{k} {n} {} {}\n", c.re, c.im));
        }
        s
    }
}

impl fmt::Display for SemigroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.support.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.support.iter().map(|(&(k, n), c)| format!("({c})·δ({k},{n})")).collect();
        f.write_str(&parts.join(" + "))
    }
}

fn parse_lines(text: &str) -> Result<Vec<(Index, G, usize)>, SemigroupError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        let err = |message: String| SemigroupError::Parse { line, message };
        if toks.len() != 3 && toks.len() != 4 {
            return Err(err(format!("expected 'k n re im', got {} fields", toks.len())));
        }
        let k: i64 = toks[0].parse().map_err(|_| err(format!("bad index '{}'", toks[0])))?;
        let n: i64 = toks[1].parse().map_err(|_| err(format!("bad index '{}'", toks[1])))?;
        let num = |s: &str| Rational::from_str(s).map_err(|_| err(format!("bad rational '{s}'")));
        let re = num(toks[2])?;
        let im = if toks.len() == 4 { num(toks[3])? } else { Rational::zero() };
        out.push(((k, n), G::new(re, im), line));
    }
    Ok(out)
}

/// A character of the semigroup at a rational point.
#[derive(Clone, Debug, PartialEq)]
pub enum Character {
    /// `(k, n) ↦ z^k z̄^n` for `z ≠ 0`.
    Plane(G),
    /// `(k, n) ↦ t^k w^n` for real `t` and `|w| = 1`.
    Cylinder { t: Rational, w: G },
}

fn gpow(z: &G, e: i64) -> G {
    let base = if e < 0 { z.cinv() } else { z.clone() };
    (0..e.unsigned_abs()).fold(G::one(), |acc, _| acc.cmul(&base))
}

impl Character {
    pub fn value(&self, (k, n): Index) -> G {
        match self {
            Character::Plane(z) => gpow(z, k).cmul(&gpow(&z.conj(), n)),
            Character::Cylinder { t, w } => gpow(&G::real(t.clone()), k).cmul(&gpow(w, n)),
        }
    }

    pub fn eval(&self, a: &SemigroupElement) -> G {
        a.support.iter().fold(G::zero(), |acc, (&idx, c)| acc.cadd(&c.cmul(&self.value(idx))))
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Character::Plane(z) => write!(f, "z = {z}"),
            Character::Cylinder { t, w } => write!(f, "t = {t}, w = {w}"),
        }
    }
}

/// Image of an element in the function algebra, split into real and
/// imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionImage {
    /// Over `ℝ[x, y, 1/(x²+y²)]`.
    Fraction { re: FractionElement, im: FractionElement },
    /// Over `ℝ[x, y, z]`, to be read modulo `1 − x² − y²`.
    Cylinder { re: RealPolynomial, im: RealPolynomial },
}

/// `ℤ²` and `k + n ≥ 0`: `(k, n) ↦ z^k z̄^n` over `x² + y²`;
/// `ℕ₀×ℤ`: `(k, n) ↦ z^k (x + iy)^n` on the cylinder, with `x − iy` for
/// negative `n`.
pub fn to_function_algebra(a: &SemigroupElement) -> FunctionImage {
    match a.semigroup {
        StarSemigroup::Z2 | StarSemigroup::Nplus => {
            let alg = AlgebraDescriptor::punctured_plane();
            let vars = alg.real_vars().clone();
            let e = a.support.keys().map(|&(k, n)| 0.max(-k).max(-n)).max().unwrap_or(0);
            let z = Polynomial::<G>::from_terms(&vars, [(mono(&[1, 0]), G::one()), (mono(&[0, 1]), G::i())]);
            let zb = z.conj_coeffs();
            let mut num = Polynomial::<G>::zero(&vars);
            for (&(k, n), c) in &a.support {
                let t = &z.pow((k + e) as u32) * &zb.pow((n + e) as u32);
                num = &num + &t.scale(c);
            }
            let frac = |p: RealPolynomial| FractionElement::new(p, vec![e as u32], &alg.basis);
            FunctionImage::Fraction { re: frac(num.real_part()), im: frac(num.imag_part()) }
        }
        StarSemigroup::N0xZ => {
            let vars = cylinder_vars();
            let w = Polynomial::<G>::from_terms(&vars, [(mono(&[1, 0, 0]), G::one()), (mono(&[0, 1, 0]), G::i())]);
            let wb = w.conj_coeffs();
            let t = Polynomial::<G>::var(&vars, 2);
            let mut out = Polynomial::<G>::zero(&vars);
            for (&(k, n), c) in &a.support {
                let circle = if n >= 0 { w.pow(n as u32) } else { wb.pow((-n) as u32) };
                out = &out + &(&t.pow(k as u32) * &circle).scale(c);
            }
            FunctionImage::Cylinder { re: out.real_part(), im: out.imag_part() }
        }
    }
}

fn mono(e: &[i32]) -> crate::polycore::Monomial {
    crate::polycore::Monomial(e.to_vec())
}

/// The real algebra generated by the hermitean parts.
#[derive(Clone, Debug, PartialEq)]
pub enum ImageAlgebra {
    /// `ℝ[x, y, 1/(x²+y²)]`.
    Fraction(AlgebraDescriptor),
    /// `ℝ[x, y, z] / (1 − x² − y²)`.
    Cylinder { ideal: RealPolynomial },
    /// `ℝ[x, y, X, Y]` with `X = x²/(x²+y²)`, `Y = xy/(x²+y²)`.
    Bounded { algebra: AlgebraDescriptor, generators: Vec<FractionElement> },
}

pub fn hermitean_image_algebra(s: StarSemigroup) -> ImageAlgebra {
    match s {
        StarSemigroup::Z2 => ImageAlgebra::Fraction(AlgebraDescriptor::punctured_plane()),
        StarSemigroup::N0xZ => {
            let v = cylinder_vars();
            let x = RealPolynomial::var(&v, 0);
            let y = RealPolynomial::var(&v, 1);
            ImageAlgebra::Cylinder { ideal: &(&RealPolynomial::one(&v) - &(&x * &x)) - &(&y * &y) }
        }
        StarSemigroup::Nplus => {
            let algebra = AlgebraDescriptor::punctured_plane();
            let ev = BExpression::vars();
            let generators =
                (0..4).map(|i| BExpression { poly: RealPolynomial::var(&ev, i) }.to_fraction(&algebra.basis)).collect();
            ImageAlgebra::Bounded { algebra, generators }
        }
    }
}

fn half(c: G) -> G {
    c.scale(&Rational::new(1.into(), 2.into()))
}

/// Pull back `root / (x²+y²)^e` (plane) or `root` (cylinder) into `ℂ[S]`.
pub fn pullback(root: &RealPolynomial, e: u32, semigroup: StarSemigroup) -> Result<SemigroupElement, SemigroupError> {
    let (x_img, y_img, z_img): (Support, Support, Option<Support>) = match semigroup {
        StarSemigroup::Z2 | StarSemigroup::Nplus => (
            [((1, 0), half(G::one())), ((0, 1), half(G::one()))].into(),
            [((1, 0), half(G::from_ints(0, -1))), ((0, 1), half(G::i()))].into(),
            None,
        ),
        StarSemigroup::N0xZ => (
            [((0, 1), half(G::one())), ((0, -1), half(G::one()))].into(),
            [((0, 1), half(G::from_ints(0, -1))), ((0, -1), half(G::i()))].into(),
            Some([((1, 0), G::one())].into()),
        ),
    };
    if z_img.is_some() != (root.nvars() == 3) {
        return Err(SemigroupError::Pullback("root uses the wrong variables".into()));
    }
    let mut powers: Vec<Vec<Support>> = Vec::new();
    let images: Vec<&Support> = [Some(&x_img), Some(&y_img), z_img.as_ref()].into_iter().flatten().collect();
    for (i, img) in images.iter().enumerate() {
        let top = root.degree_in(i).unwrap_or(0).max(0) as usize;
        let mut p = vec![Support::from([((0, 0), G::one())])];
        for _ in 0..top {
            let next = convolve_raw(p.last().unwrap(), img);
            p.push(next);
        }
        powers.push(p);
    }
    let mut out = Support::new();
    for (m, c) in root.terms() {
        let mut t: Support = [((0, 0), G::real(c.clone()))].into();
        for (i, &k) in m.exps().iter().enumerate() {
            if k < 0 {
                return Err(SemigroupError::Pullback("negative exponent in root".into()));
            }
            t = convolve_raw(&t, &powers[i][k as usize]);
        }
        for (&idx, v) in &t {
            add_into(&mut out, idx, v);
        }
    }
    let shift = e as i64;
    SemigroupElement::new(semigroup, out.into_iter().map(|((k, n), c)| ((k - shift, n - shift), c)))
        .map_err(|err| SemigroupError::Pullback(err.to_string()))
}

/// `a = Σ w_i a_i* ∘ a_i` with rational `w_i > 0`, plus the function
/// algebra certificate it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct SemigroupCertificate {
    pub element: SemigroupElement,
    pub squares: Vec<(Rational, SemigroupElement)>,
    pub sos: SosCertificate,
}

impl SemigroupCertificate {
    /// `a − Σ w_i a_i* ∘ a_i`, computed exactly in `ℂ[S]`.
    pub fn residual(&self) -> SemigroupElement {
        let mut r = self.element.support.clone();
        for (w, ai) in &self.squares {
            // a_i = b_i / D with Gaussian-integer b_i
            let den = ai.support.values().fold(BigInt::one(), |acc, c| acc.lcm(c.re.denom()).lcm(c.im.denom()));
            let ints: Vec<(Index, BigInt, BigInt)> = ai
                .support
                .iter()
                .map(|(&idx, c)| (idx, (&c.re * &den).to_integer(), (&c.im * &den).to_integer()))
                .collect();
            let mut prod: BTreeMap<Index, (BigInt, BigInt)> = BTreeMap::new();
            for (s, sr, si) in &ints {
                let (a, b) = self.element.semigroup.star(*s);
                for (t, tr, ti) in &ints {
                    // conj(b_s)·b_t
                    let e = prod.entry((a + t.0, b + t.1)).or_default();
                    e.0 += sr * tr + si * ti;
                    e.1 += sr * ti - si * tr;
                }
            }
            let scale = w / Rational::from_integer(&den * &den);
            for (idx, (re, im)) in prod {
                let c = G::new(Rational::from_integer(re) * &scale, Rational::from_integer(im) * &scale);
                add_into(&mut r, idx, &c.cneg());
            }
        }
        SemigroupElement { semigroup: self.element.semigroup, support: r }
    }

    pub fn verify(&self) -> bool {
        self.squares.iter().all(|(w, _)| !w.is_negative()) && self.residual().is_zero()
    }

    /// Header, semigroup, the element and each weighted square as
    /// `k n re im` blocks, then the function algebra certificate.
    pub fn to_text(&self) -> String {
        let mut s = format!("{CERT_HEADER}\nsemigroup: {}\nelement:\n", self.element.semigroup);
        s.push_str(&self.element.to_text());
        for (w, a) in &self.squares {
            s.push_str(&format!("square: {w}\n"));
            s.push_str(&a.to_text());
        }
        s.push_str("sos:\n");
        s.push_str(&self.sos.to_text());
        s
    }

    pub fn parse(text: &str) -> Result<Self, SemigroupError> {
        let bad = |line: usize, message: &str| SemigroupError::Parse { line, message: message.into() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = || lines.find(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match next() {
            Some((_, CERT_HEADER)) => {}
            _ => return Err(bad(1, &format!("missing '{CERT_HEADER}' header"))),
        }
        let semigroup: StarSemigroup = match next() {
            Some((line, l)) => {
                l.strip_prefix("semigroup:").ok_or_else(|| bad(line, "expected 'semigroup: <name>'"))?.trim().parse()?
            }
            None => return Err(bad(1, "missing semigroup")),
        };
        // blocks of `k n re im` lines, each opened by a keyed line
        let mut blocks: Vec<(usize, String, String)> = Vec::new();
        let mut sos_text = None;
        while let Some((line, l)) = next() {
            if l == "sos:" {
                let rest: Vec<&str> = text.lines().skip(line).collect();
                sos_text = Some(rest.join("\n"));
                break;
            }
            if l.contains(':') {
                blocks.push((line, l.to_string(), String::new()));
            } else {
                let (_, _, body) = blocks.last_mut().ok_or_else(|| bad(line, "term outside a block"))?;
                body.push_str(l);
                body.push('\n');
            }
        }
        let sos = SosCertificate::parse(&sos_text.ok_or_else(|| bad(1, "missing 'sos:' section"))?)?;
        let mut element = None;
        let mut squares = Vec::new();
        for (line, key, body) in blocks {
            let parsed = SemigroupElement::parse(&body, semigroup)?;
            if key == "element:" {
                element = Some(parsed);
            } else if let Some(w) = key.strip_prefix("square:") {
                let w: Rational = w.trim().parse().map_err(|_| bad(line, "bad square weight"))?;
                squares.push((w, parsed));
            } else {
                return Err(bad(line, &format!("unknown key '{key}'")));
            }
        }
        Ok(Self { element: element.ok_or_else(|| bad(1, "missing element"))?, squares, sos })
    }
}

const CERT_HEADER: &str = "semigroup-certificate";

#[derive(Clone, Debug, PartialEq)]
pub struct CharacterWitness {
    pub character: Character,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SemigroupOutcome {
    Certified(SemigroupCertificate),
    Refuted(CharacterWitness),
    Exhausted { cap: u32, attempts: Vec<Attempt> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyOptions {
    pub m_max: u32,
    pub degree_cap: Option<u32>,
    pub sos: SosOptions,
    /// Characters tried before the built-in grid.
    pub points: Vec<Character>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { m_max: 6, degree_cap: None, sos: SosOptions::default(), points: Vec::new() }
    }
}

/// Certify a hermitean element as a weighted sum of hermitean squares, or
/// refute it at a character.
pub fn hermitean_square_certify(a: &SemigroupElement, opts: &CertifyOptions) -> Result<SemigroupOutcome, SemigroupError> {
    if !a.is_hermitean() {
        return Err(SemigroupError::NotHermitean);
    }
    for ch in &opts.points {
        let valid = matches!(
            (a.semigroup, ch),
            (StarSemigroup::Z2 | StarSemigroup::Nplus, Character::Plane(_)) | (StarSemigroup::N0xZ, Character::Cylinder { .. })
        );
        let v = ch.eval(a);
        if valid && v.re.is_negative() {
            return Ok(SemigroupOutcome::Refuted(CharacterWitness { character: ch.clone(), value: v.re }));
        }
    }
    let s = a.semigroup;
    let (outcome, squares) = match to_function_algebra(a) {
        FunctionImage::Fraction { re, .. } => {
            if s == StarSemigroup::Nplus && b_membership(&re)?.is_none() {
                return Err(SemigroupError::Pullback("image is not in B".into()));
            }
            let out = fraction_sos(&re, opts.m_max, &opts.sos)?;
            let squares = match (&out, s) {
                (SosOutcome::Certified(c), StarSemigroup::Nplus) => sos_transfer_to_b(c, &re)?
                    .into_iter()
                    .map(|b| Ok((b.weight, pullback(b.element.numerator(), b.element.exponents()[0], s)?)))
                    .collect::<Result<Vec<_>, SemigroupError>>()?,
                (SosOutcome::Certified(c), _) => c
                    .squares
                    .iter()
                    .map(|w| Ok((w.weight.clone(), pullback(&w.root, w.denominator_exponent, s)?)))
                    .collect::<Result<Vec<_>, SemigroupError>>()?,
                _ => Vec::new(),
            };
            (out, squares)
        }
        FunctionImage::Cylinder { re, .. } => {
            let out = cylinder_sos(&re, opts.degree_cap, &opts.sos)?;
            let squares = match &out {
                SosOutcome::Certified(c) => c
                    .squares
                    .iter()
                    .map(|w| Ok((w.weight.clone(), pullback(&w.root, 0, s)?)))
                    .collect::<Result<Vec<_>, SemigroupError>>()?,
                _ => Vec::new(),
            };
            (out, squares)
        }
    };
    Ok(match outcome {
        SosOutcome::Certified(sos) => {
            let cert = SemigroupCertificate { element: a.clone(), squares, sos };
            if !cert.verify() {
                return Err(SemigroupError::Pullback("pulled-back squares do not re-expand".into()));
            }
            SemigroupOutcome::Certified(cert)
        }
        SosOutcome::NotPsd(w) => {
            let p = &w.point;
            let character = match s {
                StarSemigroup::N0xZ => Character::Cylinder { t: p[2].clone(), w: G::new(p[0].clone(), p[1].clone()) },
                _ => Character::Plane(G::new(p[0].clone(), p[1].clone())),
            };
            SemigroupOutcome::Refuted(CharacterWitness { character, value: w.value })
        }
        SosOutcome::Exhausted { cap, attempts } => SemigroupOutcome::Exhausted { cap, attempts },
    })
}

/// Values of a functional on `{s* ∘ t : s, t ∈ window}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedFunctional {
    pub semigroup: StarSemigroup,
    pub window: Vec<Index>,
    pub values: BTreeMap<Index, G>,
}

impl TruncatedFunctional {
    pub fn new(semigroup: StarSemigroup, window: Vec<Index>, values: BTreeMap<Index, G>) -> Result<Self, SemigroupError> {
        if let Some(&index) = window.iter().find(|&&w| !semigroup.contains(w)) {
            return Err(SemigroupError::InvalidIndex { semigroup, index });
        }
        Ok(Self { semigroup, window, values })
    }

    /// Every `s* ∘ t` the moment matrix needs.
    pub fn required(&self) -> Vec<Index> {
        let mut out: Vec<Index> = self.products().into_iter().flatten().collect();
        out.sort();
        out.dedup();
        out
    }

    fn products(&self) -> Vec<Vec<Index>> {
        self.window
            .iter()
            .map(|&s| {
                let (a, b) = self.semigroup.star(s);
                self.window.iter().map(|&(c, d)| (a + c, b + d)).collect()
            })
            .collect()
    }

    /// Tabulate `f` on the required indices.
    pub fn from_fn<F: Fn(Index) -> G>(semigroup: StarSemigroup, window: Vec<Index>, f: F) -> Result<Self, SemigroupError> {
        let mut l = Self::new(semigroup, window, BTreeMap::new())?;
        l.values = l.required().into_iter().map(|u| (u, f(u))).collect();
        Ok(l)
    }

    /// Lines `k n re im`, one per value.
    pub fn parse(text: &str, semigroup: StarSemigroup, window: Vec<Index>) -> Result<Self, SemigroupError> {
        let mut values = BTreeMap::new();
        for (idx, c, line) in parse_lines(text)? {
            if values.insert(idx, c).is_some() {
                return Err(SemigroupError::Parse { line, message: format!("duplicate value at ({}, {})", idx.0, idx.1) });
            }
        }
        Self::new(semigroup, window, values)
    }

    /// `M[s, t] = L(s* ∘ t)`.
    pub fn moment_matrix(&self) -> Result<Vec<Vec<G>>, SemigroupError> {
        self.products()
            .into_iter()
            .map(|row| row.into_iter().map(|u| self.values.get(&u).cloned().ok_or(SemigroupError::MissingValue(u))).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PsdVerdict {
    Psd(Ldl<G>),
    /// `v` with `v*·M·v = value < 0`.
    NotPsd { direction: Vec<G>, value: Rational },
}

/// Exact hermitean LDL of the moment matrix over the window.
pub fn truncated_psd_check(l: &TruncatedFunctional) -> Result<PsdVerdict, SemigroupError> {
    let m = l.moment_matrix()?;
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate().skip(i) {
            if *v != m[j][i].conj() {
                return Err(SemigroupError::NotHermitean);
            }
        }
    }
    Ok(match hermitian_ldl(&m) {
        PsdCheck::Psd(ldl) => PsdVerdict::Psd(ldl),
        PsdCheck::NotPsd(v) => {
            let value = quadratic_form(&m, &v).real_part();
            PsdVerdict::NotPsd { direction: v, value }
        }
    })
}
