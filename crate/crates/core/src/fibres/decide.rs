use std::fmt;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fibre_constraints, fibre_dimension, ExactAngle, FibreAngle, FibreDimension, FibreParameter};
use crate::fracalg::AlgebraDescriptor;
use crate::polycore::{Coeff, ComplexStarPolynomial, GaussianRational, Monomial, Polynomial, VarSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Unknown => "unknown",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reason {
    /// One complex variable with holomorphic or antiholomorphic denominators.
    SingleVariable,
    /// `3d − 2` linear denominators: three non-collinear translates of each
    /// of `d − 1` variables plus one translate of the last.
    TranslatePattern,
    /// Two variables with three linear holomorphic denominators.
    TwoVariablesThreeLinear,
    /// None of the decided cases applies.
    NotCovered,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Reason::SingleVariable => "single-variable",
            Reason::TranslatePattern => "translate-pattern",
            Reason::TwoVariablesThreeLinear => "two-variables-three-linear",
            Reason::NotCovered => "not-covered",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FibreSample {
    pub parameter: FibreParameter,
    pub dimension: FibreDimension,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentDecision {
    pub verdict: Verdict,
    pub reason: Reason,
    /// Fibre dimensions on the sampling grid; only filled for `Unknown`
    /// with linear denominators.
    pub evidence: Vec<FibreSample>,
}

impl MomentDecision {
    pub fn max_fibre_dimension(&self) -> Option<usize> {
        self.evidence
            .iter()
            .filter_map(|s| match s.dimension {
                FibreDimension::Dim(k) => Some(k),
                FibreDimension::Empty => None,
            })
            .max()
    }
}

/// `u, v, w ∈ ℂ` lie on one real line (coincident points count).
pub fn collinear_real_line(u: &GaussianRational, v: &GaussianRational, w: &GaussianRational) -> bool {
    v.csub(u).cmul(&w.csub(u).conj()).im.is_zero()
}

/// Holomorphic linear form `Σ α_k z_k + c`.
#[derive(Clone, Debug, PartialEq)]
struct LinearForm {
    coeffs: Vec<GaussianRational>,
    constant: GaussianRational,
}

/// Whether `f` involves only `z` (`false`) or only `zb` (`true`).
fn holomorphic_side(f: &ComplexStarPolynomial, d: usize) -> Option<bool> {
    let zs = f.support().any(|m| m.0[..d].iter().any(|&k| k != 0));
    let zbs = f.support().any(|m| m.0[d..].iter().any(|&k| k != 0));
    match (zs, zbs) {
        (true, true) => None,
        (false, true) => Some(true),
        _ => Some(false),
    }
}

/// Linear holomorphic form of `f` or of its conjugate.
fn linear_form(f: &ComplexStarPolynomial, d: usize) -> Option<LinearForm> {
    if f.total_degree() != Some(1) || f.has_negative_exponents() {
        return None;
    }
    let conj = holomorphic_side(f, d)?;
    let n = 2 * d;
    let offset = if conj { d } else { 0 };
    let fix = |c: GaussianRational| if conj { c.conj() } else { c };
    let coeffs = (0..d).map(|k| fix(f.coeff(&Monomial::var(n, offset + k)))).collect();
    Some(LinearForm { coeffs, constant: fix(f.constant_term()) })
}

fn linear_forms(alg: &AlgebraDescriptor) -> Option<Vec<LinearForm>> {
    alg.basis.entries.iter().map(|e| linear_form(&e.f, alg.d)).collect()
}

/// `(k, c/α)` when the form is `α z_k + c`.
fn translate(form: &LinearForm) -> Option<(usize, GaussianRational)> {
    let mut nz = form.coeffs.iter().enumerate().filter(|(_, c)| !c.is_zero());
    let (k, alpha) = nz.next()?;
    if nz.next().is_some() {
        return None;
    }
    Some((k, form.constant.cdiv(alpha)))
}

fn translate_pattern(forms: &[LinearForm], d: usize) -> bool {
    if d < 2 || forms.len() != 3 * d - 2 {
        return false;
    }
    let mut groups: Vec<Vec<GaussianRational>> = vec![Vec::new(); d];
    for f in forms {
        match translate(f) {
            Some((k, c)) => groups[k].push(c),
            None => return false,
        }
    }
    let singles = groups.iter().filter(|g| g.len() == 1).count();
    singles == 1
        && groups.iter().all(|g| match g.len() {
            1 => true,
            3 => !collinear_real_line(&g[0], &g[1], &g[2]),
            _ => false,
        })
}

/// Per-coordinate sampling grid: the exact angles followed by `ϑ` values
/// from the Pythagorean triples (3,4,5) and (5,12,13).
pub fn theta_grid() -> Vec<FibreAngle> {
    let mut grid: Vec<FibreAngle> = ExactAngle::ALL.iter().map(|&a| FibreAngle::Exact(a)).collect();
    for (a, b, c) in [(3i64, 4i64, 5i64), (5, 12, 13)] {
        for (re, im) in [(a, b), (-a, b), (b, a), (-b, a)] {
            let t = GaussianRational::new(crate::polycore::ratio(re, c), crate::polycore::ratio(im, c));
            grid.push(FibreAngle::Theta(t));
        }
    }
    grid
}

const SAMPLE_LIMIT: usize = 256;

fn sample_parameters(m: usize, seed: u64) -> Vec<FibreParameter> {
    let grid = theta_grid();
    let g = grid.len();
    let full = (0..m).try_fold(1usize, |acc, _| acc.checked_mul(g)).filter(|&n| n <= SAMPLE_LIMIT);
    match full {
        Some(total) => (0..total)
            .map(|mut idx| {
                let mut angles = Vec::with_capacity(m);
                for _ in 0..m {
                    angles.push(grid[idx % g].clone());
                    idx /= g;
                }
                FibreParameter::new(angles)
            })
            .collect(),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..SAMPLE_LIMIT)
                .map(|_| FibreParameter::new((0..m).map(|_| grid[rng.gen_range(0..g)].clone()).collect()))
                .collect()
        }
    }
}

pub fn decide_moment_property(alg: &AlgebraDescriptor) -> MomentDecision {
    decide_moment_property_seeded(alg, 0)
}

/// Decide the moment property where a criterion applies; `Unknown`
/// otherwise, with fibre dimensions sampled on [`theta_grid`].
pub fn decide_moment_property_seeded(alg: &AlgebraDescriptor, seed: u64) -> MomentDecision {
    let d = alg.d;
    let decided = |verdict, reason| MomentDecision { verdict, reason, evidence: Vec::new() };
    if d == 1 && alg.basis.entries.iter().all(|e| holomorphic_side(&e.f, 1).is_some()) {
        return decided(Verdict::Holds, Reason::SingleVariable);
    }
    let forms = linear_forms(alg);
    if let Some(forms) = &forms {
        if translate_pattern(forms, d) {
            return decided(Verdict::Holds, Reason::TranslatePattern);
        }
        if d == 2 && forms.len() == 3 {
            return decided(Verdict::Fails, Reason::TwoVariablesThreeLinear);
        }
    }
    let evidence = if alg.all_linear() {
        sample_parameters(alg.m(), seed)
            .into_iter()
            .filter_map(|parameter| {
                let fib = fibre_constraints(alg, &parameter).ok()?.affine?;
                Some(FibreSample { dimension: fibre_dimension(&fib), parameter })
            })
            .collect()
    } else {
        Vec::new()
    };
    MomentDecision { verdict: Verdict::Unknown, reason: Reason::NotCovered, evidence }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormalFormCase {
    /// `f_3 = z_1 + (1+i)t`
    One,
    /// `f_3 = z_1 + z_2 + (1+i)t`
    Two,
    /// All linear parts parallel; every `f_j` is a translate of `z_1`.
    Parallel,
}

/// Affine normal form of three linear holomorphic denominators in two
/// variables: `κ_j·f_j(z) = F_j(M z + s)` for each `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    pub case: NormalFormCase,
    /// `t ∈ {0, 1}`.
    pub t: u8,
    pub scalars: Vec<GaussianRational>,
    pub matrix: [[GaussianRational; 2]; 2],
    pub shift: [GaussianRational; 2],
    pub normalized: Vec<ComplexStarPolynomial>,
}

impl NormalForm {
    /// `F_j(M z + s)` as polynomials in the original variables.
    pub fn pulled_back(&self) -> Vec<ComplexStarPolynomial> {
        let v = VarSet::star(2, false);
        let mut images = Vec::with_capacity(4);
        for row in 0..2 {
            let mut p = Polynomial::constant(&v, self.shift[row].clone());
            for k in 0..2 {
                p.add_term(Monomial::var(4, k), &self.matrix[row][k]);
            }
            images.push(p);
        }
        let conj: Vec<_> = images.iter().map(crate::polycore::star).collect();
        images.extend(conj);
        self.normalized.iter().map(|f| f.substitute(&images, &v).expect("polynomial images")).collect()
    }
}

fn det2(a: &[GaussianRational], b: &[GaussianRational]) -> GaussianRational {
    a[0].cmul(&b[1]).csub(&a[1].cmul(&b[0]))
}

/// Normal form for `d = 2, m = 3` with linear holomorphic (or
/// antiholomorphic) denominators; `None` outside that shape.
pub fn normal_form_d2m3(alg: &AlgebraDescriptor) -> Option<NormalForm> {
    if alg.d != 2 || alg.m() != 3 {
        return None;
    }
    let forms = linear_forms(alg)?;
    let v = VarSet::star(2, false);
    let z = |k: usize| Polynomial::<GaussianRational>::var(&v, k);
    let one = GaussianRational::one();
    let one_plus_i = GaussianRational::from_ints(1, 1);

    let pair = [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)]
        .into_iter()
        .find(|&(p, q, _)| !det2(&forms[p].coeffs, &forms[q].coeffs).is_zero());

    let Some((p, q, r)) = pair else {
        // parallel: W1 = g·z with g the first linear part, W2 a complementary coordinate
        let g = &forms[0].coeffs;
        let e = if g[1].is_zero() { [GaussianRational::zero(), one.clone()] } else { [one.clone(), GaussianRational::zero()] };
        let mut scalars = Vec::with_capacity(3);
        let mut normalized = Vec::with_capacity(3);
        for f in &forms {
            // f = μ·(g·z) + c
            let mu = if g[0].is_zero() { f.coeffs[1].cdiv(&g[1]) } else { f.coeffs[0].cdiv(&g[0]) };
            let kappa = mu.cinv();
            normalized.push(&z(0) + &Polynomial::constant(&v, f.constant.cmul(&kappa)));
            scalars.push(kappa);
        }
        return Some(NormalForm {
            case: NormalFormCase::Parallel,
            t: 0,
            scalars,
            matrix: [[g[0].clone(), g[1].clone()], e],
            shift: [GaussianRational::zero(), GaussianRational::zero()],
            normalized,
        });
    };

    // g_r = u·g_p + v·g_q
    let (gp, gq, gr) = (&forms[p].coeffs, &forms[q].coeffs, &forms[r].coeffs);
    let det = det2(gp, gq);
    let u = det2(gr, gq).cdiv(&det);
    let w_ = det2(gp, gr).cdiv(&det);
    let (p, q, u, w_) = if u.is_zero() { (q, p, w_, u) } else { (p, q, u, w_) };
    let c = forms[r]
        .constant
        .csub(&u.cmul(&forms[p].constant))
        .csub(&w_.cmul(&forms[q].constant));
    let (kappa, t) = if c.is_zero() { (one.clone(), 0u8) } else { (one_plus_i.cdiv(&c), 1u8) };
    let case = if w_.is_zero() { NormalFormCase::One } else { NormalFormCase::Two };
    let kp = kappa.cmul(&u);
    let kq = if w_.is_zero() { one.clone() } else { kappa.cmul(&w_) };
    let row = |k: &GaussianRational, f: &LinearForm| {
        ([f.coeffs[0].cmul(k), f.coeffs[1].cmul(k)], f.constant.cmul(k))
    };
    let (m0, s0) = row(&kp, &forms[p]);
    let (m1, s1) = row(&kq, &forms[q]);
    let tail = Polynomial::constant(&v, one_plus_i.scale(&crate::polycore::rat(t as i64)));
    let fr = match case {
        NormalFormCase::One => &z(0) + &tail,
        _ => &(&z(0) + &z(1)) + &tail,
    };
    let mut scalars = vec![GaussianRational::zero(); 3];
    let mut normalized = vec![Polynomial::zero(&v); 3];
    scalars[p] = kp;
    scalars[q] = kq;
    scalars[r] = kappa;
    normalized[p] = z(0);
    normalized[q] = z(1);
    normalized[r] = fr;
    Some(NormalForm { case, t, scalars, matrix: [m0, m1], shift: [s0, s1], normalized })
}
