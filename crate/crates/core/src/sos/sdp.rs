//! Dense primal-dual interior-point solver (HKM direction, Mehrotra
//! predictor-corrector) for
//!
//! (P) min ⟨C, X⟩ s.t. ⟨A_i, X⟩ = b_i, X ⪰ 0
//! (D) max bᵀy s.t. Σ y_i A_i + Z = C, Z ⪰ 0.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

/// Symmetric matrix as a full list of `(row, col, value)` entries; both
/// `(a, b)` and `(b, a)` appear for off-diagonal entries.
#[derive(Clone, Debug, Default)]
pub(crate) struct SparseSym {
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseSym {
    pub fn identity(n: usize) -> Self {
        Self { entries: (0..n).map(|i| (i, i, 1.0)).collect() }
    }

    /// `tr(A·K)` for arbitrary `K`.
    fn dot(&self, k: &DMatrix<f64>) -> f64 {
        self.entries.iter().map(|&(a, b, v)| v * k[(b, a)]).sum()
    }

    pub fn add_to(&self, m: &mut DMatrix<f64>, s: f64) {
        for &(a, b, v) in &self.entries {
            m[(a, b)] += s * v;
        }
    }

    fn cols(&self) -> Vec<usize> {
        let mut c: Vec<usize> = self.entries.iter().map(|e| e.1).collect();
        c.sort_unstable();
        c.dedup();
        c
    }
}

pub(crate) struct SdpProblem {
    pub c: DMatrix<f64>,
    pub a: Vec<SparseSym>,
    pub b: DVector<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum SdpStatus {
    Converged,
    IterationLimit,
    NumericalFailure,
}

pub(crate) struct SdpSolution {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub status: SdpStatus,
}

const STEP_FRACTION: f64 = 0.95;

impl SdpProblem {
    fn n(&self) -> usize {
        self.c.nrows()
    }

    fn apply(&self, k: &DMatrix<f64>) -> DVector<f64> {
        DVector::from_iterator(self.a.len(), self.a.iter().map(|ai| ai.dot(k)))
    }

    fn adjoint(&self, y: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for (ai, &yi) in self.a.iter().zip(y.iter()) {
            if yi != 0.0 {
                ai.add_to(&mut m, yi);
            }
        }
        m
    }

    /// Schur complement `M_ij = tr(A_i X A_j Z⁻¹)`.
    fn schur(&self, x: &DMatrix<f64>, zinv: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n();
        let m = self.a.len();
        let mut out = DMatrix::zeros(m, m);
        let mut xa = DMatrix::zeros(n, n);
        let mut bj = DMatrix::zeros(n, n);
        for (j, aj) in self.a.iter().enumerate() {
            xa.fill(0.0);
            for &(a, c, v) in &aj.entries {
                for r in 0..n {
                    xa[(r, c)] += v * x[(r, a)];
                }
            }
            bj.fill(0.0);
            for c in aj.cols() {
                for s in 0..n {
                    let zc = zinv[(c, s)];
                    if zc == 0.0 {
                        continue;
                    }
                    for r in 0..n {
                        bj[(r, s)] += xa[(r, c)] * zc;
                    }
                }
            }
            for (i, ai) in self.a.iter().enumerate().skip(j) {
                let v = ai.dot(&bj);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest `α ≤ 1` with `X + α·dX ⪰ 0`, damped by [`STEP_FRACTION`].
fn step_length(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let Some(ch) = Cholesky::new(x.clone()) else {
        return 0.0;
    };
    let l = ch.l();
    let Some(linv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let s = sym(&(&linv * dx * linv.transpose()));
    let lmin = SymmetricEigen::new(s).eigenvalues.min();
    if lmin >= 0.0 {
        1.0
    } else {
        (STEP_FRACTION * (-1.0 / lmin)).min(1.0)
    }
}

struct Direction {
    dx: DMatrix<f64>,
    dy: DVector<f64>,
    dz: DMatrix<f64>,
}

pub(crate) fn solve(p: &SdpProblem, tol: f64, max_iter: usize) -> SdpSolution {
    let n = p.n();
    let m = p.a.len();
    let cnorm = p.c.norm();
    let bnorm = p.b.norm();
    let mut x = DMatrix::<f64>::identity(n, n);
    let mut z = DMatrix::<f64>::identity(n, n) * (1.0 + cnorm).max(1.0);
    let mut y = DVector::<f64>::zeros(m);
    let mut status = SdpStatus::IterationLimit;

    for _ in 0..max_iter {
        let mu = x.dot(&z) / n as f64;
        let rp = &p.b - p.apply(&x);
        let rd = &p.c - &z - p.adjoint(&y);
        let pobj = p.c.dot(&x);
        let dobj = p.b.dot(&y);
        let pinf = rp.norm() / (1.0 + bnorm);
        let dinf = rd.norm() / (1.0 + cnorm);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pinf < tol && dinf < tol && gap < tol {
            status = SdpStatus::Converged;
            break;
        }
        if !x.iter().chain(z.iter()).all(|v| v.is_finite()) || x.norm() > 1e14 || z.norm() > 1e14 {
            status = SdpStatus::NumericalFailure;
            break;
        }
        let Some(zinv) = Cholesky::new(z.clone()).map(|c| c.inverse()) else {
            status = SdpStatus::NumericalFailure;
            break;
        };
        let mut schur = p.schur(&x, &zinv);
        let scale = (0..m).map(|i| schur[(i, i)]).fold(0.0f64, f64::max).max(1e-300);
        let chol = match Cholesky::new(schur.clone()) {
            Some(c) => c,
            None => {
                for i in 0..m {
                    schur[(i, i)] += 1e-13 * scale;
                }
                match Cholesky::new(schur) {
                    Some(c) => c,
                    None => {
                        status = SdpStatus::NumericalFailure;
                        break;
                    }
                }
            }
        };
        let xrz = &x * &rd * &zinv;
        let direction = |sigma: f64, corr: Option<&DMatrix<f64>>| -> Direction {
            let mut target = &zinv * (sigma * mu) - &x - &xrz;
            if let Some(c) = corr {
                target -= c * &zinv;
            }
            let rhs = &rp - p.apply(&target);
            let dy = chol.solve(&rhs);
            let dz = &rd - p.adjoint(&dy);
            let dx = sym(&(target + &x * &p.adjoint(&dy) * &zinv));
            Direction { dx, dy, dz }
        };
        let aff = direction(0.0, None);
        let ap = step_length(&x, &aff.dx);
        let ad = step_length(&z, &aff.dz);
        let mu_aff = (&x + &aff.dx * ap).dot(&(&z + &aff.dz * ad)) / n as f64;
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);
        let corr = &aff.dx * &aff.dz;
        let dir = direction(sigma, Some(&corr));
        let ap = step_length(&x, &dir.dx);
        let ad = step_length(&z, &dir.dz);
        if ap == 0.0 && ad == 0.0 {
            status = SdpStatus::NumericalFailure;
            break;
        }
        x += &dir.dx * ap;
        x = sym(&x);
        y += &dir.dy * ad;
        z += &dir.dz * ad;
        z = sym(&z);
    }
    SdpSolution { x, y, status }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_min_eigenvalue_of_fixed_matrix() {
        // max t s.t. C − t·I ⪰ 0 has optimum λ_min(C)
        let c = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let p = SdpProblem { c, a: vec![SparseSym::identity(2)], b: DVector::from_vec(vec![1.0]) };
        let s = solve(&p, 1e-9, 100);
        assert_eq!(s.status, SdpStatus::Converged);
        assert!((s.y[0] - 1.0).abs() < 1e-7);
        assert!((s.x.trace() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn free_direction_is_used() {
        // max t s.t. [[1, s], [s, 1]] − t·I ⪰ 0: optimum at s = 0, t = 1
        let c = DMatrix::identity(2, 2);
        let off = SparseSym { entries: vec![(0, 1, -1.0), (1, 0, -1.0)] };
        let p = SdpProblem { c, a: vec![off, SparseSym::identity(2)], b: DVector::from_vec(vec![0.0, 1.0]) };
        let s = solve(&p, 1e-9, 100);
        assert_eq!(s.status, SdpStatus::Converged);
        assert!((s.y[1] - 1.0).abs() < 1e-7);
        assert!(s.y[0].abs() < 1e-6);
    }
}
