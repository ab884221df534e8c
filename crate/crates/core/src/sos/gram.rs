//! Gram-matrix SOS: numeric interior point, rational rounding, exact
//! verification, facial reduction and dual witnesses.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::sdp::{self, SdpProblem, SdpStatus, SparseSym};
use super::{SosError, SosOptions, WeightedSquare};
use crate::polycore::linalg::{hermitian_ldl, nullspace, rref, solve_affine, Ldl, PsdCheck, QMatrix};
use crate::polycore::{rat, rational_approx, rational_to_f64, Monomial, Rational, RealPolynomial, Vars};

/// A principal ideal `(g)` with a normal form that rewrites `lead` by the
/// rest of `g`. `lead` must dominate the other terms of `g` in some
/// monomial order so that rewriting terminates.
#[derive(Clone, Debug, PartialEq)]
pub struct Ideal {
    pub generator: RealPolynomial,
    pub lead: Monomial,
}

impl Ideal {
    /// `1 − x² − y²` in `vars` (first two variables), rewriting `y² → 1 − x²`.
    pub fn cylinder(vars: &Vars) -> Self {
        let n = vars.len();
        let x2 = Monomial::var(n, 0).pow(2);
        let y2 = Monomial::var(n, 1).pow(2);
        let mut g = RealPolynomial::one(vars);
        g.add_term(x2, &rat(-1));
        g.add_term(y2.clone(), &rat(-1));
        Self { generator: g, lead: y2 }
    }

    pub fn reduce(&self, p: &RealPolynomial) -> RealPolynomial {
        let lc = self.generator.coeff(&self.lead);
        let mut tail = self.generator.clone();
        tail.add_term(self.lead.clone(), &-lc.clone());
        // lead ≡ −tail/lc
        let replacement = tail.scale(&(-lc.recip()));
        let mut out = RealPolynomial::zero(p.vars());
        let mut work = p.clone();
        loop {
            let next = work.terms().next_back().map(|(m, c)| (m.clone(), c.clone()));
            let Some((m, c)) = next else { break };
            work.add_term(m.clone(), &-c.clone());
            match m.div(&self.lead) {
                Some(rest) => {
                    let add = replacement.mul_monomial(&rest).scale(&c);
                    work = &work + &add;
                }
                None => out.add_term(m, &c),
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramProblem {
    pub target: RealPolynomial,
    /// Polynomials `q_a` for `target = Σ G_ab q_a q_b (mod ideal)`.
    pub basis: Vec<RealPolynomial>,
    pub ideal: Option<Ideal>,
}

impl GramProblem {
    pub fn from_monomials(target: RealPolynomial, monomials: &[Monomial], ideal: Option<Ideal>) -> Self {
        let vars = target.vars().clone();
        let basis = monomials.iter().map(|m| RealPolynomial::term(&vars, m.clone(), Rational::one())).collect();
        Self { target, basis, ideal }
    }

    fn reduce(&self, p: &RealPolynomial) -> RealPolynomial {
        match &self.ideal {
            Some(i) => i.reduce(p),
            None => p.clone(),
        }
    }
}

/// Exact PSD Gram matrix together with its LDL factors.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdRationalMatrix {
    pub entries: QMatrix,
    pub ldl: Ldl<Rational>,
}

/// A linear functional `L` on monomials with `L(q²) ≥ 0` for every `q` in
/// the span of `basis` (its moment matrix is PSD) and `L(target) < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualWitness {
    pub basis: Vec<RealPolynomial>,
    pub functional: BTreeMap<Monomial, Rational>,
    pub value: Rational,
}

impl DualWitness {
    pub fn apply(&self, p: &RealPolynomial) -> Rational {
        let mut s = Rational::zero();
        for (m, c) in p.terms() {
            if let Some(l) = self.functional.get(m) {
                s += c * l;
            }
        }
        s
    }

    pub fn moment_matrix(&self, ideal: Option<&Ideal>) -> QMatrix {
        let n = self.basis.len();
        let mut out = vec![vec![Rational::zero(); n]; n];
        for a in 0..n {
            for b in a..n {
                let mut pr = &self.basis[a] * &self.basis[b];
                if let Some(i) = ideal {
                    pr = i.reduce(&pr);
                }
                let v = self.apply(&pr);
                out[a][b] = v.clone();
                out[b][a] = v;
            }
        }
        out
    }

    /// Exact check of both witness conditions against `target`.
    pub fn verify(&self, target: &RealPolynomial, ideal: Option<&Ideal>) -> bool {
        let t = match ideal {
            Some(i) => i.reduce(target),
            None => target.clone(),
        };
        let v = self.apply(&t);
        v == self.value && v.is_negative() && matches!(hermitian_ldl(&self.moment_matrix(ideal)), PsdCheck::Psd(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GramOutcome {
    Feasible { basis: Vec<RealPolynomial>, gram: PsdRationalMatrix },
    Infeasible(DualWitness),
    Indeterminate(String),
}

/// `Σ d_k (Σ_i l_ik q_perm(i))²` from the LDL factors.
pub fn extract_squares(g: &PsdRationalMatrix, basis: &[RealPolynomial]) -> Result<Vec<WeightedSquare>, SosError> {
    if g.ldl.d.iter().any(|d| d.is_negative()) {
        return Err(SosError::NotPsd);
    }
    let n = basis.len();
    let mut out = Vec::new();
    for k in 0..n {
        if g.ldl.d[k].is_zero() {
            continue;
        }
        let mut root = RealPolynomial::zero(basis[0].vars());
        for i in k..n {
            let l = &g.ldl.l[i][k];
            if !l.is_zero() {
                root = &root + &basis[g.ldl.perm[i]].scale(l);
            }
        }
        out.push(WeightedSquare { weight: g.ldl.d[k].clone(), root, denominator_exponent: 0 });
    }
    Ok(out)
}

/// Exact linear structure of a Gram problem.
struct System {
    n: usize,
    pairs: Vec<(usize, usize)>,
    monomials: Vec<Monomial>,
    /// `coeff[ab][μ]`: coefficient of `μ` in the reduced `q_a q_b`.
    products: Vec<BTreeMap<usize, Rational>>,
    rhs: Vec<Rational>,
}

impl System {
    fn build(prob: &GramProblem) -> Self {
        let n = prob.basis.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
        let prods: Vec<RealPolynomial> =
            pairs.iter().map(|&(a, b)| prob.reduce(&(&prob.basis[a] * &prob.basis[b]))).collect();
        let target = prob.reduce(&prob.target);
        let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
        for p in prods.iter().chain(std::iter::once(&target)) {
            for m in p.support() {
                let len = index.len();
                index.entry(m.clone()).or_insert(len);
            }
        }
        let mut monomials = vec![Monomial(Vec::new()); index.len()];
        for (m, &i) in &index {
            monomials[i] = m.clone();
        }
        let products = prods.iter().map(|p| p.terms().map(|(m, c)| (index[m], c.clone())).collect()).collect();
        let mut rhs = vec![Rational::zero(); index.len()];
        for (m, c) in target.terms() {
            rhs[index[m]] = c.clone();
        }
        Self { n, pairs, monomials, products, rhs }
    }

    fn mult(&self, col: usize) -> Rational {
        let (a, b) = self.pairs[col];
        if a == b {
            Rational::one()
        } else {
            rat(2)
        }
    }

    /// Rows indexed by monomial, columns by pair (off-diagonal doubled).
    fn matrix(&self) -> QMatrix {
        let mut m = vec![vec![Rational::zero(); self.pairs.len()]; self.monomials.len()];
        for (col, prod) in self.products.iter().enumerate() {
            let k = self.mult(col);
            for (&mu, c) in prod {
                m[mu][col] = c * &k;
            }
        }
        m
    }

    fn to_matrix(&self, v: &[Rational]) -> QMatrix {
        let mut g = vec![vec![Rational::zero(); self.n]; self.n];
        for (&(a, b), x) in self.pairs.iter().zip(v) {
            g[a][b] = x.clone();
            g[b][a] = x.clone();
        }
        g
    }

    fn witness(&self, basis: &[RealPolynomial], ell: &[Rational]) -> DualWitness {
        let functional: BTreeMap<Monomial, Rational> = self
            .monomials
            .iter()
            .zip(ell)
            .filter(|(_, v)| !v.is_zero())
            .map(|(m, v)| (m.clone(), v.clone()))
            .collect();
        let value = self.rhs.iter().zip(ell).map(|(b, l)| b * l).sum();
        DualWitness { basis: basis.to_vec(), functional, value }
    }
}

pub fn gram_solve(prob: &GramProblem, opts: &SosOptions) -> GramOutcome {
    if prob.basis.is_empty() {
        return if prob.reduce(&prob.target).is_zero() {
            GramOutcome::Indeterminate("empty basis".into())
        } else {
            GramOutcome::Indeterminate("empty basis for a nonzero target".into())
        };
    }
    solve_level(prob, &prob.basis, 0, opts)
}

fn solve_level(prob: &GramProblem, basis: &[RealPolynomial], level: usize, opts: &SosOptions) -> GramOutcome {
    let sub = GramProblem { target: prob.target.clone(), basis: basis.to_vec(), ideal: prob.ideal.clone() };
    let sys = System::build(&sub);
    let a = sys.matrix();
    let p = sys.pairs.len();
    let aug: QMatrix = a
        .iter()
        .zip(&sys.rhs)
        .map(|(r, b)| {
            let mut row = r.clone();
            row.push(b.clone());
            row
        })
        .collect();
    let (rr, pivots) = rref(&aug);
    if pivots.contains(&p) {
        if level > 0 {
            return GramOutcome::Indeterminate("reduced face is inconsistent".into());
        }
        return linear_witness(&sys, basis, &a);
    }
    let mut x0 = vec![Rational::zero(); p];
    for (row, &pc) in rr.iter().zip(&pivots) {
        x0[pc] = row[p].clone();
    }
    let null: QMatrix = (0..p)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = vec![Rational::zero(); p];
            v[free] = Rational::one();
            for (row, &pc) in rr.iter().zip(&pivots) {
                v[pc] = -row[free].clone();
            }
            v
        })
        .collect();

    if null.is_empty() {
        let g = sys.to_matrix(&x0);
        return match hermitian_ldl(&g) {
            PsdCheck::Psd(ldl) => {
                GramOutcome::Feasible { basis: basis.to_vec(), gram: PsdRationalMatrix { entries: g, ldl } }
            }
            PsdCheck::NotPsd(v) if level == 0 => unique_gram_witness(&sys, basis, &a, &v),
            PsdCheck::NotPsd(_) => GramOutcome::Indeterminate("reduced face has no PSD point".into()),
        };
    }

    // numeric stage: max t s.t. X0 + Σ s_k N_k − t·I ⪰ 0, in scaled units
    let sigma = x0.iter().map(|v| v.abs()).max().filter(|v| !v.is_zero()).unwrap_or_else(Rational::one);
    let nu: Vec<Rational> = null.iter().map(|v| v.iter().map(|x| x.abs()).max().unwrap()).collect();
    let n = sys.n;
    let mut c = DMatrix::zeros(n, n);
    for (&(i, j), x) in sys.pairs.iter().zip(&x0) {
        let v = rational_to_f64(&(x / &sigma));
        c[(i, j)] = v;
        c[(j, i)] = v;
    }
    let mut mats: Vec<SparseSym> = null
        .iter()
        .zip(&nu)
        .map(|(v, s)| {
            let mut e = Vec::new();
            for (&(i, j), x) in sys.pairs.iter().zip(v) {
                if !x.is_zero() {
                    let f = -rational_to_f64(&(x / s));
                    e.push((i, j, f));
                    if i != j {
                        e.push((j, i, f));
                    }
                }
            }
            SparseSym { entries: e }
        })
        .collect();
    mats.push(SparseSym::identity(n));
    let k = null.len();
    let mut b = DVector::zeros(k + 1);
    b[k] = 1.0;
    let sdp_prob = SdpProblem { c, a: mats, b };
    let sol = sdp::solve(&sdp_prob, opts.tolerance, opts.max_iterations);
    if sol.status == SdpStatus::NumericalFailure {
        return GramOutcome::Indeterminate("numerical failure in the interior-point stage".into());
    }
    let t = sol.y[k];
    let s_tilde: Vec<f64> = sol.y.iter().take(k).copied().collect();

    // exact G = X0 + Σ c_k N_k for rational c
    let exact_gram = |c: &[Rational]| -> QMatrix {
        let mut v = x0.clone();
        for (nk, ck) in null.iter().zip(c) {
            if ck.is_zero() {
                continue;
            }
            for (vi, ni) in v.iter_mut().zip(nk) {
                if !ni.is_zero() {
                    *vi += ck * ni;
                }
            }
        }
        sys.to_matrix(&v)
    };

    let eps = 1e-7;
    if t > eps {
        let sigma_f = rational_to_f64(&sigma);
        let coeffs: Vec<f64> = s_tilde.iter().zip(&nu).map(|(&x, v)| x * sigma_f / rational_to_f64(v)).collect();
        for bits in [8u32, 16, 32] {
            let c: Vec<Rational> = coeffs.iter().map(|&x| dyadic(x, bits)).collect();
            let g = exact_gram(&c);
            if let PsdCheck::Psd(ldl) = hermitian_ldl(&g) {
                return GramOutcome::Feasible { basis: basis.to_vec(), gram: PsdRationalMatrix { entries: g, ldl } };
            }
        }
    }
    if t < -eps {
        if level == 0 {
            if let Some(w) = numeric_witness(&sys, basis, &sol.x, prob.ideal.as_ref()) {
                return GramOutcome::Infeasible(w);
            }
        }
        return GramOutcome::Indeterminate(format!("no rounded witness (optimal margin {t:.3e})"));
    }
    if level >= opts.facial_levels {
        return GramOutcome::Indeterminate(format!("facial reduction depth {level} reached (margin {t:.3e})"));
    }
    // boundary: drop the numerical kernel of G and retry on the face
    let mut g_num = DMatrix::zeros(n, n);
    for (&(i, j), x) in sys.pairs.iter().zip(&x0) {
        let v = rational_to_f64(&(x / &sigma));
        g_num[(i, j)] = v;
        g_num[(j, i)] = v;
    }
    for ((nk, sk), st) in null.iter().zip(&nu).zip(&s_tilde) {
        for (&(i, j), x) in sys.pairs.iter().zip(nk) {
            if !x.is_zero() {
                let v = rational_to_f64(&(x / sk)) * st;
                g_num[(i, j)] += v;
                if i != j {
                    g_num[(j, i)] += v;
                }
            }
        }
    }
    let Some(kernel) = numeric_kernel(&g_num) else {
        return GramOutcome::Indeterminate(format!("no kernel gap on the boundary (margin {t:.3e})"));
    };
    if let Some(found) = reduce_face(prob, basis, &kernel, &g_num, level, opts) {
        return found;
    }
    // the maximal-rank face may have an irrational kernel while some
    // extreme point of it does not: minimize a few weighted traces
    let mut rng = ChaCha8Rng::seed_from_u64(level as u64);
    for round in 0..EXTREME_TRIES {
        let weights: Vec<f64> = (0..n).map(|_| if round == 0 { 1.0 } else { rng.gen_range(0.5..2.0) }).collect();
        let objective = |m: &SparseSym| m.entries.iter().filter(|e| e.0 == e.1).map(|e| weights[e.0] * e.2).sum::<f64>();
        let low_prob = SdpProblem {
            b: DVector::from_iterator(k, sdp_prob.a[..k].iter().map(objective)),
            a: sdp_prob.a[..k].to_vec(),
            c: sdp_prob.c.clone(),
        };
        let low = sdp::solve(&low_prob, opts.tolerance, opts.max_iterations);
        if low.status == SdpStatus::NumericalFailure {
            continue;
        }
        let mut g_low = low_prob.c.clone();
        for (ak, yk) in low_prob.a.iter().zip(low.y.iter()) {
            ak.add_to(&mut g_low, -yk);
        }
        if let Some(found) = numeric_kernel(&g_low).and_then(|kl| reduce_face(prob, basis, &kl, &g_low, level, opts)) {
            return found;
        }
    }
    GramOutcome::Indeterminate(format!("facial reduction failed at depth {level}"))
}

const EXTREME_TRIES: usize = 6;

/// Restrict the basis to the exact span orthogonal to a rounded `kernel`
/// and solve there.
fn reduce_face(
    prob: &GramProblem,
    basis: &[RealPolynomial],
    kernel: &DMatrix<f64>,
    g_num: &DMatrix<f64>,
    level: usize,
    opts: &SosOptions,
) -> Option<GramOutcome> {
    let n = basis.len();
    for bits in [8u32, 16] {
        let Some(rows) = exact_rows(kernel, g_num, bits) else {
            continue;
        };
        let w = nullspace(&rows, n);
        if w.is_empty() {
            continue;
        }
        let reduced: Vec<RealPolynomial> = w
            .iter()
            .map(|col| {
                let mut q = RealPolynomial::zero(basis[0].vars());
                for (c, b) in col.iter().zip(basis) {
                    if !c.is_zero() {
                        q = &q + &b.scale(c);
                    }
                }
                q
            })
            .collect();
        if let GramOutcome::Feasible { basis, gram } = solve_level(prob, &reduced, level + 1, opts) {
            return Some(GramOutcome::Feasible { basis, gram });
        }
    }
    None
}

/// The linear system itself is inconsistent: `ℓ` with `ℓᵀA = 0`, `ℓ·b < 0`.
fn linear_witness(sys: &System, basis: &[RealPolynomial], a: &QMatrix) -> GramOutcome {
    let m = sys.monomials.len();
    let at: QMatrix = (0..sys.pairs.len()).map(|c| (0..m).map(|r| a[r][c].clone()).collect()).collect();
    for ell in nullspace(&at, m) {
        let v: Rational = sys.rhs.iter().zip(&ell).map(|(b, l)| b * l).sum();
        if !v.is_zero() {
            let s = -v.recip();
            let ell: Vec<Rational> = ell.iter().map(|x| x * &s).collect();
            return GramOutcome::Infeasible(sys.witness(basis, &ell));
        }
    }
    GramOutcome::Indeterminate("inconsistent system without a separating functional".into())
}

/// Unique Gram matrix with `vᵀGv < 0`: the functional with moment matrix
/// `vvᵀ` separates.
fn unique_gram_witness(sys: &System, basis: &[RealPolynomial], a: &QMatrix, v: &[Rational]) -> GramOutcome {
    let m = sys.monomials.len();
    let at: QMatrix = (0..sys.pairs.len()).map(|c| (0..m).map(|r| a[r][c].clone()).collect()).collect();
    let w: Vec<Rational> =
        (0..sys.pairs.len()).map(|c| &sys.mult(c) * &v[sys.pairs[c].0] * &v[sys.pairs[c].1]).collect();
    match solve_affine(&at, &w) {
        Some(ell) => GramOutcome::Infeasible(sys.witness(basis, &ell)),
        None => GramOutcome::Indeterminate("moment matrix outside the functional range".into()),
    }
}

/// Moments of a reference measure with full support: standard Gaussian in
/// every coordinate, or uniform on the unit circle in `(x, y)` when an
/// ideal is present.
fn reference_moment(m: &Monomial, circle: bool) -> Rational {
    fn double_fact(k: i32) -> BigInt {
        let mut r = BigInt::one();
        let mut i = k;
        while i > 1 {
            r *= i;
            i -= 2;
        }
        r
    }
    let e = &m.0;
    if e.iter().any(|&k| k % 2 != 0) {
        return Rational::zero();
    }
    let start = if circle { 2 } else { 0 };
    let mut out = Rational::one();
    for &k in &e[start..] {
        out *= Rational::from_integer(double_fact(k - 1));
    }
    if circle {
        let (a, b) = (e[0], e[1]);
        out *= Rational::new(double_fact(a - 1) * double_fact(b - 1), double_fact(a + b));
    }
    out
}

/// Exact witness from the numeric moment matrix `X`.
fn numeric_witness(sys: &System, basis: &[RealPolynomial], x: &DMatrix<f64>, ideal: Option<&Ideal>) -> Option<DualWitness> {
    let n = sys.n;
    let m = sys.monomials.len();
    // least squares: M(ℓ) ≈ X over the upper triangle
    let mut lhs = DMatrix::zeros(sys.pairs.len(), m);
    let mut rhs = DVector::zeros(sys.pairs.len());
    for (col, &(a, b)) in sys.pairs.iter().enumerate() {
        for (&mu, c) in &sys.products[col] {
            lhs[(col, mu)] = rational_to_f64(c);
        }
        rhs[col] = x[(a, b)];
    }
    let ell = lhs.svd(true, true).solve(&rhs, 1e-12).ok()?;
    let circle = ideal.is_some();
    let reference: Vec<Rational> = sys.monomials.iter().map(|mo| reference_moment(mo, circle)).collect();
    let ref_w = sys.witness(basis, &reference);
    let ref_trace: Rational = (0..n).map(|a| ref_w.apply(&reduce_opt(&(&basis[a] * &basis[a]), ideal))).sum();
    for bits in [20u32, 32] {
        let rounded: Vec<Rational> = ell.iter().map(|&v| dyadic(v, bits)).collect();
        for shift in [0i32, 40, 30, 20, 12, 8] {
            let delta = if shift == 0 {
                Rational::zero()
            } else {
                Rational::new(BigInt::one(), BigInt::one() << shift as usize) / &ref_trace
            };
            let combined: Vec<Rational> = rounded.iter().zip(&reference).map(|(r, l0)| r + &delta * l0).collect();
            let w = sys.witness(basis, &combined);
            if w.value.is_negative() && matches!(hermitian_ldl(&w.moment_matrix(ideal)), PsdCheck::Psd(_)) {
                return Some(w);
            }
        }
    }
    None
}

/// Nearest multiple of `2^-bits`; a shared denominator keeps exact sums small.
fn dyadic(x: f64, bits: u32) -> Rational {
    let scaled = (x * (1u64 << bits) as f64).round();
    let num = BigInt::from(scaled as i128);
    Rational::new(num, BigInt::one() << bits as usize)
}

fn reduce_opt(p: &RealPolynomial, ideal: Option<&Ideal>) -> RealPolynomial {
    match ideal {
        Some(i) => i.reduce(p),
        None => p.clone(),
    }
}

/// Eigenvectors below the largest relative eigenvalue gap under `1e-4`.
fn numeric_kernel(g: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let eig = SymmetricEigen::new(g.clone());
    let n = g.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let lmax = eig.eigenvalues.max().max(1e-300);
    // relative eigenvalues below 1e-12 count as zero
    let vals: Vec<f64> = order.iter().map(|&i| (eig.eigenvalues[i] / lmax).max(1e-12)).collect();
    let mut best: Option<(usize, f64)> = None;
    for r in 1..n {
        if vals[r - 1] > 1e-4 {
            break;
        }
        let ratio = vals[r] / vals[r - 1];
        if ratio > 1e3 && best.map_or(true, |(_, b)| ratio > b) {
            best = Some((r, ratio));
        }
    }
    let (r, _) = best?;
    let mut k = DMatrix::zeros(n, r);
    for (c, &i) in order.iter().take(r).enumerate() {
        k.set_column(c, &eig.eigenvectors.column(i));
    }
    Some(k)
}

/// Exact reduced-echelon rows spanning the numerical kernel, rounded to
/// denominators at most `2^bits`; `None` if a rounded row is not nearly
/// annihilated by `g`.
fn exact_rows(kernel: &DMatrix<f64>, g: &DMatrix<f64>, bits: u32) -> Option<QMatrix> {
    let mut m = kernel.transpose();
    let (r, n) = m.shape();
    let mut used = vec![false; n];
    let mut pivots = Vec::with_capacity(r);
    for row in 0..r {
        let (col, val) = (0..n)
            .filter(|&c| !used[c])
            .map(|c| (c, m[(row, c)]))
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())?;
        if val.abs() < 1e-9 {
            return None;
        }
        used[col] = true;
        pivots.push(col);
        let scaled = m.row(row) / val;
        m.set_row(row, &scaled);
        for other in 0..r {
            if other != row {
                let f = m[(other, col)];
                let upd = m.row(other) - m.row(row) * f;
                m.set_row(other, &upd);
            }
        }
    }
    let scale = g.amax().max(1e-300);
    let mut rows = Vec::with_capacity(r);
    for row in 0..r {
        let exact: Vec<Rational> = (0..n)
            .map(|c| {
                let v = m[(row, c)];
                if v.abs() < 1e-9 {
                    Rational::zero()
                } else {
                    rational_approx(v, 1u64 << bits)
                }
            })
            .collect();
        let vf = DVector::from_iterator(n, exact.iter().map(rational_to_f64));
        if (g * &vf).amax() > 1e-3 * scale * vf.amax() {
            return None;
        }
        rows.push(exact);
    }
    Some(rows)
}
