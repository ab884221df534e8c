//! Exact linear algebra over ℚ and ℚ(i): row reduction, nullspaces and
//! the pivoted hermitean LDL factorization used for PSD checks.

use num_traits::{One, Signed, Zero};

use super::coeff::{Coeff, Rational};

pub type QMatrix = Vec<Vec<Rational>>;

/// Reduced row echelon form with pivot columns tried in `order`.
/// Returns the non-zero rows and their pivot columns.
pub fn rref_ordered(m: &[Vec<Rational>], order: &[usize]) -> (QMatrix, Vec<usize>) {
    let mut a: QMatrix = m.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for &col in order {
        if row == a.len() {
            break;
        }
        let Some(p) = (row..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for v in a[row].iter_mut() {
            *v = &*v * &inv;
        }
        let pivot_row = a[row].clone();
        for (r, other) in a.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let f = other[col].clone();
            for (v, pv) in other.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    a.truncate(row);
    (a, pivots)
}

pub fn rref(m: &[Vec<Rational>]) -> (QMatrix, Vec<usize>) {
    let ncols = m.first().map_or(0, |r| r.len());
    let order: Vec<usize> = (0..ncols).collect();
    rref_ordered(m, &order)
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    rref(m).1.len()
}

/// Basis of `{v : m·v = 0}`.
pub fn nullspace(m: &[Vec<Rational>], ncols: usize) -> QMatrix {
    let (r, pivots) = rref(m);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &pc) in r.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        out.push(v);
    }
    out
}

/// A particular solution of `a·x = b` (free variables set to zero), or
/// `None` when the system is inconsistent.
pub fn solve_affine(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let ncols = a.first().map_or(0, |r| r.len());
    let aug: QMatrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![Rational::zero(); ncols];
    for (row, &pc) in r.iter().zip(&pivots) {
        x[pc] = row[ncols].clone();
    }
    Some(x)
}

/// Whether two matrices with the same column count span the same row space.
pub fn row_space_eq(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> bool {
    rref(a).0 == rref(b).0
}

/// Indices of a maximal linearly independent subset of rows, greedy in
/// the given row order.
pub fn independent_rows(m: &[Vec<Rational>]) -> Vec<usize> {
    let mut basis: Vec<(Vec<Rational>, usize)> = Vec::new();
    let mut keep = Vec::new();
    for (idx, row) in m.iter().enumerate() {
        let mut v = row.clone();
        for (b, pc) in &basis {
            if !v[*pc].is_zero() {
                let f = v[*pc].clone();
                for (x, y) in v.iter_mut().zip(b) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        if let Some(pc) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[pc].recip();
            for x in v.iter_mut() {
                *x = &*x * &inv;
            }
            basis.push((v, pc));
            keep.push(idx);
        }
    }
    keep
}

pub fn mat_vec<C: Coeff>(m: &[Vec<C>], v: &[C]) -> Vec<C> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(C::zero(), |acc, (a, b)| acc.cadd(&a.cmul(b))))
        .collect()
}

/// `v* · m · v`.
pub fn quadratic_form<C: Coeff>(m: &[Vec<C>], v: &[C]) -> C {
    let mv = mat_vec(m, v);
    v.iter().zip(&mv).fold(C::zero(), |acc, (a, b)| acc.cadd(&a.conj().cmul(b)))
}

/// `m = Pᵀ·L·D·L*·P` with `L` unit lower triangular in pivot order.
#[derive(Clone, Debug, PartialEq)]
pub struct Ldl<C: Coeff> {
    /// `perm[k]` is the original index eliminated at step `k`.
    pub perm: Vec<usize>,
    pub l: Vec<Vec<C>>,
    pub d: Vec<C>,
}

impl<C: Coeff> Ldl<C> {
    /// Rebuild the original matrix from the factors.
    pub fn reconstruct(&self) -> Vec<Vec<C>> {
        let n = self.d.len();
        let mut out = vec![vec![C::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = C::zero();
                for k in 0..=i.min(j) {
                    if self.d[k].is_zero() {
                        continue;
                    }
                    s = s.cadd(&self.l[i][k].cmul(&self.d[k]).cmul(&self.l[j][k].conj()));
                }
                out[self.perm[i]][self.perm[j]] = s;
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.d.iter().filter(|x| !x.is_zero()).count()
    }
}

/// Outcome of the exact PSD test.
#[derive(Clone, Debug, PartialEq)]
pub enum PsdCheck<C: Coeff> {
    Psd(Ldl<C>),
    /// A vector `v` with `v*·m·v < 0`.
    NotPsd(Vec<C>),
}

/// Exact hermitean LDL with diagonal pivoting. Assumes `m` hermitean.
pub fn hermitian_ldl<C: Coeff>(m: &[Vec<C>]) -> PsdCheck<C> {
    let n = m.len();
    let mut a: Vec<Vec<C>> = m.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut l = vec![vec![C::zero(); n]; n];
    let mut d = vec![C::zero(); n];
    for k in 0..n {
        let pick = (k..n).find(|&p| a[p][p].real_part().is_positive());
        let Some(p) = pick else {
            if let Some(w) = schur_witness(&a, k) {
                return PsdCheck::NotPsd(lift_witness(&l, &perm, k, w));
            }
            for (i, row) in l.iter_mut().enumerate().skip(k) {
                row[i] = C::one();
            }
            return PsdCheck::Psd(Ldl { perm, l, d });
        };
        if p != k {
            a.swap(k, p);
            for row in a.iter_mut() {
                row.swap(k, p);
            }
            perm.swap(k, p);
            l.swap(k, p);
        }
        let piv = a[k][k].clone();
        let piv_inv = piv.cinv();
        d[k] = piv;
        l[k][k] = C::one();
        for i in k + 1..n {
            l[i][k] = a[i][k].cmul(&piv_inv);
        }
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let lik = l[i][k].clone();
            for j in k + 1..n {
                if a[k][j].is_zero() {
                    continue;
                }
                let upd = lik.cmul(&a[k][j]);
                a[i][j] = a[i][j].csub(&upd);
            }
        }
    }
    PsdCheck::Psd(Ldl { perm, l, d })
}

/// Negative direction inside the trailing block `a[k..][k..]` when it has
/// no positive diagonal, or `None` if that block is zero.
fn schur_witness<C: Coeff>(a: &[Vec<C>], k: usize) -> Option<Vec<C>> {
    let n = a.len();
    let size = n - k;
    for i in k..n {
        if a[i][i].real_part().is_negative() {
            let mut w = vec![C::zero(); size];
            w[i - k] = C::one();
            return Some(w);
        }
    }
    for i in k..n {
        for j in k..n {
            if i != j && !a[i][j].is_zero() {
                // w = t·e_i + e_j with conj(t)·a_ij = -(a_jj + 1)/2
                let sij = &a[i][j];
                let norm = sij.cmul(&sij.conj()).real_part();
                let c = (a[j][j].real_part() + Rational::one()) / (Rational::from_integer(2.into()) * norm);
                let t = sij.cmul(&C::from_rational(-c));
                let mut w = vec![C::zero(); size];
                w[i - k] = t;
                w[j - k] = C::one();
                return Some(w);
            }
        }
    }
    None
}

/// Extend a trailing-block witness `w` to the full space: the leading part
/// solves `L11*·x = -L21*·w`.
fn lift_witness<C: Coeff>(l: &[Vec<C>], perm: &[usize], k: usize, w: Vec<C>) -> Vec<C> {
    let n = l.len();
    let mut vp = vec![C::zero(); n];
    for (i, wi) in w.into_iter().enumerate() {
        vp[k + i] = wi;
    }
    for r in (0..k).rev() {
        let mut s = C::zero();
        for i in r + 1..n {
            if !vp[i].is_zero() && !l[i][r].is_zero() {
                s = s.cadd(&l[i][r].conj().cmul(&vp[i]));
            }
        }
        vp[r] = s.cneg();
    }
    let mut v = vec![C::zero(); n];
    for (i, x) in vp.into_iter().enumerate() {
        v[perm[i]] = x;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polycore::coeff::{rat, GaussianRational};
    use proptest::prelude::*;

    fn q(rows: &[&[i64]]) -> QMatrix {
        rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect()
    }

    #[test]
    fn rank_and_nullspace() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&m), 2);
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 1);
        for v in &ns {
            assert!(mat_vec(&m, v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn affine_consistency() {
        let a = q(&[&[1, 0], &[1, 0]]);
        assert!(solve_affine(&a, &[rat(0), rat(1)]).is_none());
        let x = solve_affine(&a, &[rat(2), rat(2)]).unwrap();
        assert_eq!(x, vec![rat(2), rat(0)]);
    }

    #[test]
    fn row_spaces() {
        let a = q(&[&[1, -1, 0], &[0, 0, 1]]);
        let b = q(&[&[1, -1, 1], &[2, -2, 0], &[0, 0, 3]]);
        assert!(row_space_eq(&a, &b));
        assert_eq!(independent_rows(&b), vec![0, 1]);
    }

    #[test]
    fn ldl_psd_and_witness() {
        let m = q(&[&[1, 1], &[1, 1]]);
        match hermitian_ldl(&m) {
            PsdCheck::Psd(f) => {
                assert_eq!(f.reconstruct(), m);
                assert_eq!(f.rank(), 1);
            }
            _ => panic!("expected psd"),
        }
        let m = q(&[&[1, 2], &[2, 1]]);
        match hermitian_ldl(&m) {
            PsdCheck::NotPsd(v) => assert!(quadratic_form(&m, &v).is_negative()),
            _ => panic!("expected witness"),
        }
        let m = q(&[&[0, 1], &[1, 0]]);
        match hermitian_ldl(&m) {
            PsdCheck::NotPsd(v) => assert!(quadratic_form(&m, &v).is_negative()),
            _ => panic!("expected witness"),
        }
    }

    #[test]
    fn complex_ldl() {
        let g = |a, b| GaussianRational::from_ints(a, b);
        // [[2, i], [-i, 1]] is positive definite
        let m = vec![vec![g(2, 0), g(0, 1)], vec![g(0, -1), g(1, 0)]];
        match hermitian_ldl(&m) {
            PsdCheck::Psd(f) => assert_eq!(f.reconstruct(), m),
            _ => panic!(),
        }
        let m = vec![vec![g(1, 0), g(0, 2)], vec![g(0, -2), g(1, 0)]];
        match hermitian_ldl(&m) {
            PsdCheck::NotPsd(v) => assert!(quadratic_form(&m, &v).real_part().is_negative()),
            _ => panic!(),
        }
    }

    proptest! {
        #[test]
        fn ldl_matches_gram_construction(
            rows in prop::collection::vec(prop::collection::vec(-3i64..4, 4), 1..4),
            shift in -3i64..2,
        ) {
            // B^T B + shift·I
            let n = 4;
            let mut m = vec![vec![rat(0); n]; n];
            for i in 0..n {
                for j in 0..n {
                    for r in &rows {
                        m[i][j] += rat(r[i] * r[j]);
                    }
                }
                m[i][i] += rat(shift);
            }
            match hermitian_ldl(&m) {
                PsdCheck::Psd(f) => {
                    prop_assert!(f.d.iter().all(|x| !x.is_negative()));
                    prop_assert_eq!(f.reconstruct(), m);
                }
                PsdCheck::NotPsd(v) => prop_assert!(quadratic_form(&m, &v).is_negative()),
            }
        }
    }
}
