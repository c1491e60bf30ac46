//! Cyclic Jacobi eigensolver for small symmetric matrices.
//!
//! Each sweep annihilates every off-diagonal pair with a plane rotation. The
//! off-diagonal Frobenius norm decreases monotonically, so the iteration
//! converges for every real symmetric input; for n ≤ 8 a handful of sweeps
//! reach machine precision.

use super::matrix::Matrix;
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `A = V·diag(values)·Vᵀ`, values in ascending order.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    /// Orthonormal eigenvectors stored as columns, in the order of `values`.
    pub vectors: Matrix<T>,
}

impl<T: Scalar> SymEigen<T> {
    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// Spectral norm of the decomposed matrix.
    pub fn spectral_norm(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }
}

/// Eigenvalues and eigenvectors of the symmetric part of `a`.
pub fn sym_eigen<T: Scalar>(a: &Matrix<T>) -> SymEigen<T> {
    assert!(a.is_square(), "sym_eigen needs a square matrix");
    let n = a.rows();
    let mut m = a.symmetrize();
    let mut v = Matrix::identity(n);
    let scale = m.frobenius_norm();
    if scale == T::zero() || n == 1 {
        return finish(m, v);
    }
    let thresh = T::epsilon() * scale;
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= thresh * T::c(1e-2) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= T::min_positive_value() {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (T::two() * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let t = if theta == T::zero() { T::one() } else { t };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                rotate(&mut m, &mut v, p, q, c, s);
            }
        }
    }
    finish(m, v)
}

fn rotate<T: Scalar>(m: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize, c: T, s: T) {
    let n = m.rows();
    for k in 0..n {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = c * mkp - s * mkq;
        m[(k, q)] = s * mkp + c * mkq;
    }
    for k in 0..n {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = c * mpk - s * mqk;
        m[(q, k)] = s * mpk + c * mqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

fn finish<T: Scalar>(m: Matrix<T>, v: Matrix<T>) -> SymEigen<T> {
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].partial_cmp(&m[(j, j)]).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    SymEigen { values, vectors }
}

/// Smallest eigenvalue of the symmetric matrix `a`.
pub fn min_eigenvalue<T: Scalar>(a: &Matrix<T>) -> T {
    sym_eigen(a).min()
}
