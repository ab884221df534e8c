//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines are always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fraction_moments::fibres::{
    decide_moment_property_seeded, fibre_constraints, ExactAngle, FibreParameter, Reason, Verdict,
};
use fraction_moments::fracalg::{make_algebra, AlgebraDescriptor, FractionElement};
use fraction_moments::graded::{b_membership, ternary_lift, BExpression};
use fraction_moments::polycore::{
    linalg::row_space_eq, parse_real, rat, ratio, rational_to_f64, Coeff, ComplexStarPolynomial, GaussianRational,
    Monomial, Rational, RealPolynomial, VarSet,
};
use fraction_moments::semigroups::{
    hermitean_square_certify, truncated_psd_check, Character, CertifyOptions, Index, PsdVerdict,
    SemigroupElement, SemigroupOutcome, StarSemigroup, TruncatedFunctional,
};
use fraction_moments::sos::{
    cylinder_sos, cylinder_vars, fraction_sos, multiplier_search, univariate_sos, AttemptResult, SosOptions,
    SosOutcome,
};

type G = GaussianRational;
type Outcome = Result<String, String>;

const MOTZKIN: &str = "x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1";

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn real(s: &str, vars: &[&str]) -> RealPolynomial {
    parse_real(s, &VarSet::plain(vars)).unwrap()
}

fn small_gaussian(rng: &mut ChaCha8Rng, r: i64) -> G {
    G::from_ints(rng.gen_range(-r..=r), rng.gen_range(-r..=r))
}

fn star_linear(d: usize, coeffs: &[G], constant: G) -> ComplexStarPolynomial {
    let v = VarSet::star(d, false);
    let mut p = ComplexStarPolynomial::constant(&v, constant);
    for (k, c) in coeffs.iter().enumerate() {
        p.add_term(Monomial::var(2 * d, k), c);
    }
    p
}

/// Twice the signed area of the triangle; zero iff the points are collinear.
fn area2(a: &G, b: &G, c: &G) -> Rational {
    let (ux, uy) = (&b.re - &a.re, &b.im - &a.im);
    let (vx, vy) = (&c.re - &a.re, &c.im - &a.im);
    ux * vy - uy * vx
}

fn non_collinear_triple(rng: &mut ChaCha8Rng) -> [G; 3] {
    loop {
        let t = [small_gaussian(rng, 3), small_gaussian(rng, 3), small_gaussian(rng, 3)];
        if area2(&t[0], &t[1], &t[2]) != rat(0) {
            return t;
        }
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn criterion_1() -> Outcome {
    let one = G::one();
    let mut slowest = Duration::ZERO;
    let mut decide = |alg: &AlgebraDescriptor, seed: u64| {
        let (dec, dt) = timed(|| decide_moment_property_seeded(alg, seed));
        slowest = slowest.max(dt);
        dec
    };
    // (a) one variable
    let z = |c: G| star_linear(1, &[one.clone()], c);
    let v1 = VarSet::star(1, false);
    let z2_plus_1 = &ComplexStarPolynomial::var(&v1, 0).pow(2) + &ComplexStarPolynomial::one(&v1);
    for f in [z(G::zero()), z(G::from_ints(-1, 0)), z2_plus_1] {
        let alg = make_algebra(&[f.clone()], 1).map_err(|e| e.to_string())?;
        let dec = decide(&alg, 0);
        ensure(dec.verdict == Verdict::Holds, format!("d=1, f={f}: {:?}", dec.verdict))?;
    }
    // (b) translate patterns
    let e = |k: usize, d: usize| {
        let mut c = vec![G::zero(); d];
        c[k] = one.clone();
        c
    };
    let fs = vec![
        star_linear(2, &e(0, 2), G::zero()),
        star_linear(2, &e(0, 2), G::from_ints(1, 0)),
        star_linear(2, &e(0, 2), G::i()),
        star_linear(2, &e(1, 2), G::zero()),
    ];
    let dec = decide(&make_algebra(&fs, 2).unwrap(), 0);
    ensure(dec.verdict == Verdict::Holds, format!("{{z1, z1+1, z1+i, z2}}: {:?}", dec.verdict))?;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fs = Vec::new();
        for k in 0..2 {
            for c in non_collinear_triple(&mut rng) {
                fs.push(star_linear(3, &e(k, 3), c));
            }
        }
        fs.push(star_linear(3, &e(2, 3), small_gaussian(&mut rng, 3)));
        let dec = decide(&make_algebra(&fs, 3).unwrap(), seed);
        ensure(dec.verdict == Verdict::Holds, format!("d=3 pattern, seed {seed}: {:?}", dec.verdict))?;
    }
    // (c) three linear denominators in two variables
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..20 {
        let fs: Vec<_> = (0..3)
            .map(|_| loop {
                let c = [small_gaussian(&mut rng, 3), small_gaussian(&mut rng, 3)];
                if !(c[0].is_zero() && c[1].is_zero()) {
                    break star_linear(2, &c, small_gaussian(&mut rng, 3));
                }
            })
            .collect();
        let dec = decide(&make_algebra(&fs, 2).unwrap(), 0);
        ensure(
            dec.verdict == Verdict::Fails && dec.reason == Reason::TwoVariablesThreeLinear,
            format!("random triple {case}: {:?}", dec.verdict),
        )?;
    }
    ensure(slowest < Duration::from_secs(1), format!("slowest decision {slowest:?}"))?;
    Ok(format!("3 + 21 Holds, 20 Fails, slowest decision {slowest:.2?}"))
}

fn criterion_2() -> Outcome {
    let one = G::one();
    let t = G::from_ints(1, 1);
    let z1 = star_linear(2, &[one.clone(), G::zero()], G::zero());
    let z2 = star_linear(2, &[G::zero(), one.clone()], G::zero());
    let case1 = star_linear(2, &[one.clone(), G::zero()], t.clone());
    let case2 = star_linear(2, &[one.clone(), one.clone()], t);
    // x1 = y1, x2 = y2 in the order x1, x2, y1, y2 | rhs
    let expected: Vec<Vec<Rational>> = vec![
        [1, 0, -1, 0, 0].iter().map(|&v| rat(v)).collect(),
        [0, 1, 0, -1, 0].iter().map(|&v| rat(v)).collect(),
    ];
    let param = FibreParameter::exact(&[ExactAngle::PiOver4; 3]);
    for (name, f3) in [("case 1", case1), ("case 2", case2)] {
        let alg = make_algebra(&[z1.clone(), z2.clone(), f3], 2).unwrap();
        let fib = fibre_constraints(&alg, &param).map_err(|e| e.to_string())?.affine.ok_or("fibre is not affine")?;
        ensure(row_space_eq(&fib.augmented(), &expected), format!("{name}: fibre {:?}", fib.reduced_equations()))?;
    }
    Ok("both cases reduce to x1 = y1, x2 = y2".into())
}

fn criterion_3() -> Outcome {
    let t0 = Instant::now();
    let p = real(MOTZKIN, &["x", "y"]);
    let w = real("x^2 + y^2", &["x", "y"]);
    let o = SosOptions::default();
    match multiplier_search(&p, &w, 0, &o).map_err(|e| e.to_string())? {
        SosOutcome::Exhausted { attempts, .. } => match &attempts[..] {
            [a] if a.level == 0 => match &a.result {
                AttemptResult::Infeasible(dual) => {
                    ensure(dual.verify(&p, None), "dual witness does not verify")?;
                    ensure(dual.apply(&p) < rat(0), "dual witness is not negative on p")?;
                }
                other => return Err(format!("m=0 not infeasible: {other:?}")),
            },
            other => return Err(format!("unexpected attempts {other:?}")),
        },
        other => return Err(format!("m=0 outcome {other:?}")),
    }
    let SosOutcome::Certified(c) = multiplier_search(&p, &w, 6, &o).map_err(|e| e.to_string())? else {
        return Err("not certified with m_max = 6".into());
    };
    ensure(c.multiplier_exponent == 1, format!("m = {}", c.multiplier_exponent))?;
    ensure(c.residual().is_zero() && c.verify(), "nonzero residual")?;
    // independent re-expansion: (x²+y²)·p against Σ w q²
    let mut lhs = &w * &p;
    for s in &c.squares {
        lhs = &lhs - &(&s.root * &s.root).scale(&s.weight);
    }
    ensure(lhs.is_zero(), "re-expansion differs")?;
    let dt = t0.elapsed();
    ensure(dt < Duration::from_secs(10), format!("took {dt:?}"))?;
    Ok(format!("m=0 infeasible with dual witness, m=1 certified, {dt:.2?}"))
}

fn criterion_4() -> Outcome {
    let alg = AlgebraDescriptor::punctured_plane();
    let v = alg.real_vars().clone();
    let one = RealPolynomial::one(&v);
    let inv = FractionElement::new(one.clone(), vec![1], &alg.basis);
    let SosOutcome::Certified(c) = fraction_sos(&inv, 6, &SosOptions::default()).map_err(|e| e.to_string())? else {
        return Err("1/(x²+y²) not certified".into());
    };
    ensure(c.verify(), "nonzero residual")?;
    let mut got: Vec<(String, String, u32)> =
        c.squares.iter().map(|s| (s.weight.to_string(), s.root.to_string(), s.denominator_exponent)).collect();
    got.sort();
    let want = vec![("1".to_string(), "x".to_string(), 1), ("1".to_string(), "y".to_string(), 1)];
    ensure(got == want, format!("squares {got:?}"))?;
    match fraction_sos(&inv.neg(), 6, &SosOptions::default()).map_err(|e| e.to_string())? {
        SosOutcome::NotPsd(w) => {
            let (x, y) = (&w.point[0], &w.point[1]);
            let n = x * x + y * y;
            ensure(n != rat(0), "witness at the origin")?;
            let value = -rat(1) / n;
            ensure(value < rat(0) && value == w.value, format!("witness value {}", w.value))?;
        }
        other => return Err(format!("−1/(x²+y²): {other:?}")),
    }
    Ok("squares x/(x²+y²), y/(x²+y²); negation refuted".into())
}

fn random_poly(rng: &mut ChaCha8Rng, vars: &fraction_moments::polycore::Vars, deg: i32, r: i64) -> RealPolynomial {
    let n = vars.len();
    let mut p = RealPolynomial::zero(vars);
    let mut exps = vec![vec![]];
    for _ in 0..n {
        exps = exps
            .into_iter()
            .flat_map(|e: Vec<i32>| {
                (0..=deg).map(move |a| {
                    let mut e = e.clone();
                    e.push(a);
                    e
                })
            })
            .collect();
    }
    for e in exps.into_iter().filter(|e| e.iter().sum::<i32>() <= deg) {
        p.add_term(Monomial(e), &rat(rng.gen_range(-r..=r)));
    }
    p
}

fn criterion_5() -> Outcome {
    let v = cylinder_vars();
    let o = SosOptions::default();
    let SosOutcome::Certified(c) = cylinder_sos(&real("1 - x", &["x", "y", "z"]), None, &o).map_err(|e| e.to_string())?
    else {
        return Err("1 − x not certified".into());
    };
    ensure(c.verify(), "1 − x: nonzero residual")?;
    let mut terms: Vec<String> =
        c.squares.iter().map(|s| (&s.root * &s.root).scale(&s.weight).to_string()).collect();
    terms.sort();
    let mut want: Vec<String> = ["1/2*x^2 - x + 1/2", "1/2*y^2"]
        .iter()
        .map(|s| parse_real(s, &v).unwrap().to_string())
        .collect();
    want.sort();
    ensure(terms == want, format!("1 − x squares {terms:?}"))?;
    ensure(c.ideal_cofactor == Some(parse_real("1/2", &v).unwrap()), "1 − x cofactor")?;
    match cylinder_sos(&real("x - 2", &["x", "y", "z"]), None, &o).map_err(|e| e.to_string())? {
        SosOutcome::NotPsd(w) => ensure(w.point == vec![rat(1), rat(0), rat(0)], format!("witness {:?}", w.point))?,
        other => return Err(format!("x − 2: {other:?}")),
    }
    let g = parse_real("1 - x^2 - y^2", &v).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut certified, mut exhausted) = (0, 0);
    for case in 0..50 {
        let k = rng.gen_range(3..=4);
        let mut p = RealPolynomial::zero(&v);
        for _ in 0..k {
            let q = random_poly(&mut rng, &v, 2, 2);
            p = &p + &(&q * &q);
        }
        p = &p + &(&random_poly(&mut rng, &v, 2, 3) * &g);
        match cylinder_sos(&p, None, &o).map_err(|e| e.to_string())? {
            SosOutcome::Certified(c) => {
                ensure(c.verify(), format!("case {case}: nonzero residual"))?;
                certified += 1;
            }
            SosOutcome::Exhausted { .. } => exhausted += 1,
            SosOutcome::NotPsd(w) => return Err(format!("case {case}: wrong refutation at {:?}", w.point)),
        }
    }
    ensure(certified >= 45, format!("{certified}/50 certified"))?;
    Ok(format!("examples ok; random {certified}/50 certified, {exhausted} exhausted"))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let xy = VarSet::plain(&["x", "y"]);
    for case in 0..200 {
        let d = 2 * rng.gen_range(0..=10);
        let p = RealPolynomial::from_terms(&xy, (0..=d).map(|a| (Monomial(vec![a, d - a]), rat(rng.gen_range(-9..=9)))));
        let q = ternary_lift(&p).map_err(|e| format!("case {case}: {e}"))?;
        ensure(q.evaluate_binary(&xy) == p, format!("case {case}: lift does not round-trip {p}"))?;
    }
    let alg = AlgebraDescriptor::punctured_plane();
    let bv = BExpression::vars();
    for case in 0..100 {
        let mut word = RealPolynomial::one(&bv);
        for _ in 0..rng.gen_range(1..=3) {
            let mut s = RealPolynomial::zero(&bv);
            for _ in 0..rng.gen_range(1..=3) {
                let gen = rng.gen_range(0..5);
                let t = if gen == 4 { RealPolynomial::one(&bv) } else { RealPolynomial::var(&bv, gen) };
                s = &s + &t.scale(&rat(rng.gen_range(-3..=3)));
            }
            word = &word * &s;
        }
        let f = BExpression { poly: word }.to_fraction(&alg.basis);
        let e = b_membership(&f).map_err(|e| e.to_string())?.ok_or(format!("word {case} reported outside B"))?;
        for _ in 0..5 {
            let pt = [random_rational(&mut rng), random_rational(&mut rng)];
            if pt.iter().all(|c| c.is_zero()) {
                continue;
            }
            let fv = f.eval(&pt).map_err(|e| e.to_string())?;
            ensure(e.eval(&pt) == Some(fv), format!("word {case}: expression differs at {pt:?}"))?;
        }
    }
    let x = RealPolynomial::var(alg.real_vars(), 0);
    let f = FractionElement::new(x, vec![1], &alg.basis);
    ensure(b_membership(&f).map_err(|e| e.to_string())?.is_none(), "x/(x²+y²) reported in B")?;
    Ok("200 lifts round-trip; 100 words in B; x/(x²+y²) not in B".into())
}

fn float_min_eigenvalue(m: &[Vec<G>]) -> f64 {
    let n = m.len();
    let mut r = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (rational_to_f64(&m[i][j].re), rational_to_f64(&m[i][j].im));
            r[(i, j)] = a;
            r[(n + i, n + j)] = a;
            r[(i, n + j)] = -b;
            r[(n + i, j)] = b;
        }
    }
    SymmetricEigen::new(r).eigenvalues.min()
}

fn random_character(rng: &mut ChaCha8Rng, s: StarSemigroup) -> Character {
    match s {
        StarSemigroup::N0xZ => {
            let u = ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
            let d = rat(1) + &u * &u;
            let w = G::new((rat(1) - &u * &u) / &d, (rat(2) * &u) / &d);
            Character::Cylinder { t: ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3)), w }
        }
        _ => loop {
            let z = G::new(ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2)), ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2)));
            if !z.is_zero() {
                break Character::Plane(z);
            }
        },
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut disagreements = 0;
    let mut largest = 0;
    for case in 0..200 {
        let s = StarSemigroup::ALL[case % 3];
        let window = s.window(rng.gen_range(1..=2));
        largest = largest.max(window.len());
        let atoms: Vec<(Rational, Character)> =
            (0..rng.gen_range(1..=4)).map(|_| (ratio(rng.gen_range(1..=5), rng.gen_range(1..=3)), random_character(&mut rng, s))).collect();
        let mut l = TruncatedFunctional::from_fn(s, window, |u: Index| {
            atoms.iter().fold(G::zero(), |acc, (w, ch)| acc.cadd(&ch.value(u).scale(w)))
        })
        .map_err(|e| e.to_string())?;
        if case % 2 == 1 {
            let req = l.required();
            let u = req[rng.gen_range(0..req.len())];
            let us = s.star(u);
            let c = G::new(ratio(rng.gen_range(-20..=20), 4), ratio(rng.gen_range(-20..=20), 4));
            let c = if us == u { G::real(c.re) } else { c };
            *l.values.get_mut(&u).unwrap() = l.values[&u].cadd(&c);
            if us != u {
                *l.values.get_mut(&us).unwrap() = l.values[&us].cadd(&c.conj());
            }
        }
        let m = l.moment_matrix().map_err(|e| e.to_string())?;
        let lam = float_min_eigenvalue(&m);
        let scale = m.iter().flatten().map(|v| rational_to_f64(&v.norm_sqr()).sqrt()).fold(1.0, f64::max);
        let verdict = truncated_psd_check(&l).map_err(|e| e.to_string())?;
        match &verdict {
            PsdVerdict::Psd(_) if lam < -1e-9 * scale => disagreements += 1,
            PsdVerdict::NotPsd { direction, value } => {
                if lam > 1e-9 * scale {
                    disagreements += 1;
                }
                // v*·M·v recomputed entrywise
                let mut q = G::zero();
                for (i, row) in m.iter().enumerate() {
                    for (j, mij) in row.iter().enumerate() {
                        q = q.cadd(&direction[i].conj().cmul(mij).cmul(&direction[j]));
                    }
                }
                ensure(q == G::real(value.clone()) && *value < rat(0), format!("window {case}: bad direction"))?;
            }
            _ => {}
        }
    }
    ensure(disagreements == 0, format!("{disagreements} disagreements with the eigenvalue oracle"))?;

    let mut round_trips = 0;
    let mut slowest = Duration::ZERO;
    for s in StarSemigroup::ALL {
        let mut rng = ChaCha8Rng::seed_from_u64(70 + s as u64);
        for case in 0..100 {
            let mut a = SemigroupElement::zero(s);
            for _ in 0..rng.gen_range(1..=3) {
                let terms: Vec<(Index, G)> = (0..rng.gen_range(1..=2))
                    .map(|_| loop {
                        let idx = (rng.gen_range(-1..=1), rng.gen_range(-1..=1));
                        let c = small_gaussian(&mut rng, 3);
                        if s.contains(idx) && !c.is_zero() {
                            break (idx, c);
                        }
                    })
                    .collect();
                let ai = SemigroupElement::new(s, terms).unwrap();
                a = a.add(&ai.star().convolve(&ai).unwrap()).unwrap();
            }
            let (out, dt) = timed(|| hermitean_square_certify(&a, &CertifyOptions::default()));
            slowest = slowest.max(dt);
            match out.map_err(|e| format!("{s} case {case}: {e}"))? {
                SemigroupOutcome::Certified(c) => {
                    ensure(c.residual().is_zero(), format!("{s} case {case}: nonzero residual"))?;
                    round_trips += 1;
                }
                other => return Err(format!("{s} case {case} ({a}): {other:?}")),
            }
        }
    }
    let b = SemigroupElement::new(
        StarSemigroup::Z2,
        [((0, 0), G::from_ints(2, 0)), ((1, 0), G::one()), ((0, 1), G::one())],
    )
    .unwrap();
    match hermitean_square_certify(&b, &CertifyOptions::default()).map_err(|e| e.to_string())? {
        SemigroupOutcome::Refuted(w) => {
            ensure(w.character == Character::Plane(G::from_ints(-2, 0)), format!("witness {}", w.character))?;
            ensure(w.character.eval(&b).re < rat(0), "witness value is not negative")?;
        }
        other => return Err(format!("2 + δ(1,0) + δ(0,1): {other:?}")),
    }
    Ok(format!(
        "200 windows (up to {largest}×{largest}) agree; {round_trips} round trips (slowest {slowest:.2?}); z = −2 refutes"
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let v = VarSet::plain(&["t"]);
    let t = RealPolynomial::var(&v, 0);
    let quadratic = |rng: &mut ChaCha8Rng| {
        // t² + b t + c with c > b²/4
        let b = ratio(rng.gen_range(-6..=6), rng.gen_range(1..=2));
        let c = &b * &b / rat(4) + ratio(rng.gen_range(1..=8), rng.gen_range(1..=4));
        &(&(&t * &t) + &t.scale(&b)) + &RealPolynomial::constant(&v, c)
    };
    let o = SosOptions::default();
    let mut slowest = Duration::ZERO;
    for case in 0..100 {
        let mut p = RealPolynomial::constant(&v, ratio(rng.gen_range(1..=5), rng.gen_range(1..=3)));
        for _ in 0..rng.gen_range(1..=6) {
            p = &p * &quadratic(&mut rng);
        }
        let (out, dt) = timed(|| univariate_sos(&p, &o));
        slowest = slowest.max(dt);
        match out.map_err(|e| e.to_string())? {
            SosOutcome::Certified(c) => ensure(c.residual().is_zero(), format!("psd case {case}: nonzero residual"))?,
            other => return Err(format!("psd case {case} ({p}): {other:?}")),
        }
    }
    ensure(slowest < Duration::from_secs(1), format!("slowest certificate {slowest:?}"))?;
    for case in 0..100 {
        let mut p = RealPolynomial::constant(&v, ratio(rng.gen_range(1..=5), rng.gen_range(1..=3)));
        for _ in 0..rng.gen_range(0..=4) {
            p = &p * &quadratic(&mut rng);
        }
        // two distinct real roots give a sign change
        let a = rng.gen_range(-5..=4);
        let b = rng.gen_range(a + 1..=5);
        p = &p * &(&(&t - &RealPolynomial::constant(&v, rat(a))) * &(&t - &RealPolynomial::constant(&v, rat(b))));
        match univariate_sos(&p, &o).map_err(|e| e.to_string())? {
            SosOutcome::NotPsd(w) => {
                let value = p.eval(&w.point).map_err(|e| e.to_string())?;
                ensure(value < rat(0) && value == w.value, format!("non-psd case {case}: witness value {value}"))?;
            }
            other => return Err(format!("non-psd case {case} ({p}): {other:?}")),
        }
    }
    Ok(format!("100 certified (slowest {slowest:.2?}), 100 refuted"))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_fracmom")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    };
    let holds = file("holds.txt", "d=2\nz1\nz1 + 1\nz1 + i\nz2\n");
    let fails = file("fails.txt", "d=2\nz1\nz2\nz1 + z2 + 1 + i\n");
    let unknown = file("unknown.txt", "d=2\nz1\nz2\nz1 + z2 + 1\nz1 - z2 + i\n");
    let motzkin = file("motzkin.txt", MOTZKIN);
    let cyl = file("cyl.txt", "x^2*z^2 + y^2*z^2 - 2*z + 2 + y");
    let elem = file("elem.txt", "0 0 4\n1 0 1\n0 1 1\n1 1 1\n");
    let func = file("func.txt", &(-2..=2).flat_map(|k| (-2..=2).map(move |n| format!("{k} {n} 1 0\n"))).collect::<String>());
    let cert_path = dir.path().join("m.cert");
    let cert = cert_path.to_string_lossy().into_owned();
    let commands: Vec<Vec<&str>> = vec![
        vec!["decide-moment", &holds],
        vec!["decide-moment", &fails],
        vec!["decide-moment", &unknown],
        vec!["fibres", &fails, "--angles", "pi/4, pi/4, pi/4"],
        vec!["sos", &motzkin, "--multiplier", "x^2+y^2", "--output", &cert],
        vec!["sos", &motzkin, "--denominator-exponent", "1"],
        vec!["cylinder-sos", &cyl],
        vec!["semigroup-certify", &elem, "--semigroup", "Z2"],
        vec!["semigroup-psd", &func, "--semigroup", "Z2", "--radius", "1"],
        vec!["verify", &cert],
    ];
    for args in &commands {
        let mut full: Vec<&str> = args.clone();
        full.extend(["--format", "structured", "--seed", "17"]);
        let (c1, o1) = run_cli(&full);
        let (c2, o2) = run_cli(&full);
        ensure(c1 == c2 && o1 == o2, format!("{} differs between runs", args[0]))?;
        ensure(c1 != 1, format!("{} failed: {}", args[0], String::from_utf8_lossy(&o1)))?;
    }
    ensure(Path::new(&cert).exists(), "certificate file missing")?;
    Ok(format!("{} commands byte-identical across two runs", commands.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("moment-property decisions", criterion_1),
        ("fibre correctness", criterion_2),
        ("SOS engine on Motzkin", criterion_3),
        ("fraction algebra", criterion_4),
        ("cylinder", criterion_5),
        ("graded module", criterion_6),
        ("semigroups", criterion_7),
        ("univariate", criterion_8),
        ("determinism", criterion_9),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let dt = start.elapsed();
        match result {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail} [{dt:.1?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {why} [{dt:.1?}]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
