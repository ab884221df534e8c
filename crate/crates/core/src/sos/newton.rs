//! Half Newton polytope monomial bases.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use super::SosError;
use crate::polycore::{rat, Monomial, Rational, RealPolynomial};

/// Whether `target` lies in the convex hull of `points`, by an exact
/// phase-one simplex with Bland's rule.
pub fn in_convex_hull(points: &[Vec<i32>], target: &[Rational]) -> bool {
    if points.is_empty() {
        return false;
    }
    let dim = target.len();
    let s = points.len();
    // rows: Σ λ_k p_k = target, Σ λ_k = 1; columns: λ (s), artificials (dim + 1)
    let rows = dim + 1;
    let cols = s + rows;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(rows);
    for r in 0..rows {
        let (mut row, mut rhs): (Vec<Rational>, Rational) = if r < dim {
            (points.iter().map(|p| rat(p[r] as i64)).collect(), target[r].clone())
        } else {
            (vec![Rational::one(); s], Rational::one())
        };
        if rhs.is_negative() {
            row.iter_mut().for_each(|v| *v = -v.clone());
            rhs = -rhs;
        }
        row.extend((0..rows).map(|k| if k == r { Rational::one() } else { Rational::zero() }));
        row.push(rhs);
        t.push(row);
    }
    let mut basis: Vec<usize> = (s..cols).collect();
    // reduced costs of the phase-one objective: sums over rows whose basic
    // variable is still artificial
    loop {
        let mut cost = vec![Rational::zero(); cols + 1];
        for (row, &b) in t.iter().zip(&basis) {
            if b >= s {
                for (c, v) in cost.iter_mut().zip(row) {
                    *c += v;
                }
            }
        }
        let Some(enter) = (0..s).find(|&c| !basis.contains(&c) && cost[c].is_positive()) else {
            return cost[cols].is_zero();
        };
        let mut leave: Option<(usize, Rational)> = None;
        for (r, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[cols] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((lr, lv)) => ratio < *lv || (ratio == *lv && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            return false;
        };
        let inv = t[r][enter].recip();
        for v in t[r].iter_mut() {
            *v = &*v * &inv;
        }
        let prow = t[r].clone();
        for (k, row) in t.iter_mut().enumerate() {
            if k != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    if !pv.is_zero() {
                        *v -= &f * pv;
                    }
                }
            }
        }
        basis[r] = enter;
    }
}

/// Monomials `α` with `2α` in the Newton polytope of `p`, then pruned:
/// `α` is dropped while `2α` is neither in the support of `p` nor a sum
/// `β + γ` of two distinct remaining monomials.
pub fn newton_basis(p: &RealPolynomial) -> Result<Vec<Monomial>, SosError> {
    if p.is_zero() {
        return Err(SosError::ZeroPolynomial);
    }
    let support: Vec<Vec<i32>> = p.support().map(|m| m.0.clone()).collect();
    let n = p.nvars();
    let lo: Vec<i32> = (0..n).map(|k| support.iter().map(|e| e[k]).min().unwrap()).collect();
    let hi: Vec<i32> = (0..n).map(|k| support.iter().map(|e| e[k]).max().unwrap()).collect();
    let dmin = support.iter().map(|e| e.iter().sum::<i32>()).min().unwrap();
    let dmax = support.iter().map(|e| e.iter().sum::<i32>()).max().unwrap();
    let mut candidates = Vec::new();
    let mut cur: Vec<i32> = lo.iter().map(|&l| div_ceil(l, 2)).collect();
    let top: Vec<i32> = hi.iter().map(|&h| h.div_euclid(2)).collect();
    if cur.iter().zip(&top).any(|(c, t)| c > t) {
        return Ok(Vec::new());
    }
    loop {
        let deg: i32 = cur.iter().sum();
        if 2 * deg >= dmin && 2 * deg <= dmax {
            let twice: Vec<Rational> = cur.iter().map(|&c| rat(2 * c as i64)).collect();
            if in_convex_hull(&support, &twice) {
                candidates.push(Monomial(cur.clone()));
            }
        }
        let mut k = 0;
        loop {
            if k == n {
                return Ok(prune(p, candidates));
            }
            if cur[k] < top[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = div_ceil(lo[k], 2);
            k += 1;
        }
    }
}

fn div_ceil(a: i32, b: i32) -> i32 {
    -((-a).div_euclid(b))
}

fn prune(p: &RealPolynomial, mut basis: Vec<Monomial>) -> Vec<Monomial> {
    loop {
        let set: BTreeSet<&Monomial> = basis.iter().collect();
        let drop = basis.iter().position(|a| {
            let twice = a.mul(a);
            if !p.coeff(&twice).is_zero() {
                return false;
            }
            !set.iter().any(|b| *b != a && twice.div(b).is_some_and(|c| c != *a && set.contains(&c)))
        });
        match drop {
            Some(i) => {
                basis.remove(i);
            }
            None => {
                basis.sort();
                return basis;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::{parse_real, VarSet};

    fn basis(s: &str) -> Vec<String> {
        let v = VarSet::real(1);
        let p = parse_real(s, &v).unwrap();
        newton_basis(&p)
            .unwrap()
            .into_iter()
            .map(|m| RealPolynomial::term(&v, m, rat(1)).to_string())
            .collect()
    }

    #[test]
    fn hull_membership() {
        let pts = vec![vec![0, 0], vec![4, 0], vec![0, 4]];
        assert!(in_convex_hull(&pts, &[rat(1), rat(1)]));
        assert!(in_convex_hull(&pts, &[rat(2), rat(2)]));
        assert!(!in_convex_hull(&pts, &[rat(3), rat(2)]));
        assert!(in_convex_hull(&[vec![2, 2]], &[rat(2), rat(2)]));
    }

    #[test]
    fn examples() {
        assert_eq!(basis("x^2 + y^2"), vec!["y", "x"]);
        assert_eq!(basis("(x + y)^2"), vec!["y", "x"]);
        assert_eq!(basis("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1"), vec!["1", "x*y", "x*y^2", "x^2*y"]);
        assert!(newton_basis(&RealPolynomial::zero(&VarSet::real(1))).is_err());
    }

    #[test]
    fn brute_force_half_polytope() {
        // every Motzkin half-polytope lattice point found by enumeration
        let v = VarSet::real(1);
        let p = parse_real("x^4*y^2 + x^2*y^4 - 3*x^2*y^2 + 1", &v).unwrap();
        let support: Vec<Vec<i32>> = p.support().map(|m| m.0.clone()).collect();
        let mut brute = Vec::new();
        for a in 0..=2 {
            for b in 0..=2 {
                // 2(a, b) = Σ λ_k s_k checked on a fine rational grid of convex weights
                let target = (2 * a, 2 * b);
                let mut hit = false;
                for l1 in 0..=12 {
                    for l2 in 0..=12 - l1 {
                        for l3 in 0..=12 - l1 - l2 {
                            let l4 = 12 - l1 - l2 - l3;
                            let ls = [l1, l2, l3, l4];
                            let sx: i32 = ls.iter().zip(&support).map(|(l, s)| l * s[0]).sum();
                            let sy: i32 = ls.iter().zip(&support).map(|(l, s)| l * s[1]).sum();
                            hit |= sx == 12 * target.0 && sy == 12 * target.1;
                        }
                    }
                }
                if hit {
                    brute.push(Monomial(vec![a, b]));
                }
            }
        }
        brute.sort();
        assert_eq!(newton_basis(&p).unwrap(), brute);
    }
}
