//! Principal angles between subspaces and the max-angle gap metric.

use super::decomp::orthonormalize;
use super::matrix::{dot, Matrix};
use super::sym_eigen::sym_eigen;
use crate::scalar::Scalar;

/// Orthonormal basis (as vectors) of the column span of `basis`.
pub fn span_basis<T: Scalar>(basis: &[Vec<T>]) -> Vec<Vec<T>> {
    orthonormalize(basis, T::c(1e-13).max(T::epsilon() * T::c(100.0)))
}

fn singular_values<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    // eigenvalues of MᵀM, clipped at zero
    let g = &m.transpose() * m;
    sym_eigen(&g).values.into_iter().map(|x| x.max(T::zero()).sqrt()).collect()
}

/// Principal angles (ascending, radians) between span(`a`) and span(`b`).
///
/// Returns `min(dim a, dim b)` angles. Small angles are taken from sines of the
/// projection residual and large ones from cosines so both ends stay accurate.
pub fn principal_angles<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<T> {
    let (qa, qb) = {
        let qa = span_basis(a);
        let qb = span_basis(b);
        if qb.len() <= qa.len() {
            (qa, qb)
        } else {
            (qb, qa)
        }
    };
    let k = qb.len();
    if k == 0 {
        return Vec::new();
    }
    let n = qb[0].len();
    let cross = Matrix::from_fn(qa.len(), k, |i, j| dot(&qa[i], &qb[j]));
    let mut cosines = singular_values(&cross);
    cosines.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    let residual = Matrix::from_fn(n, k, |r, j| {
        let mut v = qb[j][r];
        for q in &qa {
            v = v - q[r] * dot(q, &qb[j]);
        }
        v
    });
    let mut sines = singular_values(&residual);
    sines.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    (0..k)
        .map(|i| {
            let c = cosines[i].min(T::one());
            if c * c < T::half() {
                c.acos()
            } else {
                sines[i].min(T::one()).asin()
            }
        })
        .collect()
}

/// Largest principal angle; `π/2` when dimensions differ.
pub fn gap<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> T {
    let qa = span_basis(a);
    let qb = span_basis(b);
    if qa.len() != qb.len() {
        return T::FRAC_PI_2();
    }
    principal_angles(&qa, &qb).into_iter().fold(T::zero(), T::max)
}

/// Angle between a vector and a subspace.
pub fn angle_to_subspace<T: Scalar>(v: &[T], sub: &[Vec<T>]) -> T {
    principal_angles(sub, &[v.to_vec()]).first().copied().unwrap_or_else(T::FRAC_PI_2)
}
