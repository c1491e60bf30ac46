//! LU, Cholesky and Gram–Schmidt factorizations for small dense matrices.

use super::matrix::{dot, norm, Matrix};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// LU factorization with partial pivoting, `P·A = L·U`.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: T,
}

impl<T: Scalar> Lu<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
        }
        let n = a.rows();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let scale = a.max_abs();
        let tiny = scale * T::epsilon() * T::from_usize_lossy(n.max(1));
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= tiny || pivot == T::zero() {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = tmp;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let d = lu[(k, k)];
            for i in (k + 1)..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                for j in (k + 1)..n {
                    lu[(i, j)] = lu[(i, j)] - f * lu[(k, j)];
                }
            }
        }
        Ok(Lu { lu, perm, sign })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.lu.rows();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                x[i] = x[i] - self.lu[(i, k)] * x[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                x[i] = x[i] - self.lu[(i, k)] * x[k];
            }
            x[i] = x[i] / self.lu[(i, i)];
        }
        x
    }

    pub fn solve_matrix(&self, b: &Matrix<T>) -> Matrix<T> {
        let cols: Vec<Vec<T>> = (0..b.cols()).map(|j| self.solve(&b.col(j))).collect();
        Matrix::from_cols(&cols).expect("consistent column lengths")
    }

    pub fn inverse(&self) -> Matrix<T> {
        self.solve_matrix(&Matrix::identity(self.lu.rows()))
    }

    pub fn det(&self) -> T {
        self.lu.diag().into_iter().fold(self.sign, |acc, d| acc * d)
    }
}

pub fn inverse<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    Ok(Lu::new(a)?.inverse())
}

pub fn det<T: Scalar>(a: &Matrix<T>) -> T {
    match Lu::new(a) {
        Ok(lu) => lu.det(),
        Err(_) => T::zero(),
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)];
        for k in 0..j {
            d = d - l[(j, k)] * l[(j, k)];
        }
        if d <= T::zero() {
            return Err(Error::SingularMatrix);
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Orthonormal basis of the span of `vectors` (modified Gram–Schmidt with one
/// reorthogonalization pass). Vectors whose residual falls below `rel_tol`
/// times their original norm are dropped.
pub fn orthonormalize<T: Scalar>(vectors: &[Vec<T>], rel_tol: T) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let n0 = norm(v);
        if n0 == T::zero() {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, &qi) in w.iter_mut().zip(q) {
                    *wi = *wi - c * qi;
                }
            }
        }
        let nw = norm(&w);
        if nw > rel_tol * n0 {
            basis.push(w.into_iter().map(|x| x / nw).collect());
        }
    }
    basis
}

/// Orthonormal basis as matrix columns; errors when the input is rank deficient.
pub fn orthonormal_columns<T: Scalar>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let cols = a.columns();
    let q = orthonormalize(&cols, T::c(1e-12).max(T::epsilon() * T::c(100.0)));
    if q.len() != cols.len() {
        return Err(Error::SingularMatrix);
    }
    Matrix::from_cols(&q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_and_inverts() {
        let a = Matrix::from_rows(&[vec![2.0_f64, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]]).unwrap();
        let inv = inverse(&a).unwrap();
        let prod = &a * &inv;
        assert!((&prod - &Matrix::identity(3)).max_abs() < 1e-14);
        assert!((det(&a) - 18.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_detected() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert_eq!(Lu::new(&a).unwrap_err(), Error::SingularMatrix);
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = Matrix::from_rows(&[vec![4.0, 2.0], vec![2.0, 3.0]]).unwrap();
        let l = cholesky(&a).unwrap();
        assert!((&(&l * &l.transpose()) - &a).max_abs() < 1e-14);
        assert!(cholesky(&Matrix::from_diag(&[1.0, -1.0])).is_err());
    }

    #[test]
    fn gram_schmidt_drops_dependent_vectors() {
        let q = orthonormalize(&[vec![1.0_f64, 1.0, 0.0], vec![2.0, 2.0, 0.0], vec![0.0, 1.0, 0.0]], 1e-12);
        assert_eq!(q.len(), 2);
        assert!(dot(&q[0], &q[1]).abs() < 1e-15);
    }
}
