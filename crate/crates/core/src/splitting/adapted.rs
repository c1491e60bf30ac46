//! Quadratic forms adapted to a sampled splitting: `𝒥_x(v) = |v⁺|² − |v⁻|²`.

use crate::error::{Error, Result};
use crate::linalg::{inverse, principal_angles, span_basis, Matrix};
use crate::qforms::QuadraticFormField;
use crate::scalar::Scalar;

use super::BundleSample;

/// Bundles closer than this (radians) are rejected.
pub const MIN_BUNDLE_ANGLE: f64 = 1e-6;

/// `Pᵀ₊P₊ − Pᵀ₋P₋` for the oblique projections of the splitting `F₋ ⊕ F₊`.
pub fn adapted_matrix<T: Scalar>(f_minus: &[Vec<T>], f_plus: &[Vec<T>]) -> Result<Matrix<T>> {
    let qm = span_basis(f_minus);
    let qp = span_basis(f_plus);
    if qm.len() != f_minus.len() || qp.len() != f_plus.len() {
        return Err(Error::DegenerateSubspace);
    }
    let n = qm.first().or(qp.first()).map_or(0, Vec::len);
    if qm.len() + qp.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: qm.len() + qp.len() });
    }
    let angle = principal_angles(&qm, &qp).into_iter().fold(T::c(std::f64::consts::FRAC_PI_2), T::min);
    if angle < T::c(MIN_BUNDLE_ANGLE) {
        return Err(Error::IllConditionedSplitting { angle: angle.as_f64() });
    }
    let cols: Vec<Vec<T>> = qm.iter().chain(&qp).cloned().collect();
    let m = Matrix::from_cols(&cols)?;
    let m_inv = inverse(&m)?;
    let q = qm.len();
    let keep = |neg: bool| {
        Matrix::from_diag(&(0..n).map(|i| if (i < q) == neg { T::one() } else { T::zero() }).collect::<Vec<_>>())
    };
    let p_minus = &(&m * &keep(true)) * &m_inv;
    let p_plus = &(&m * &keep(false)) * &m_inv;
    Ok((&p_plus.transpose() * &p_plus - &p_minus.transpose() * &p_minus).symmetrize())
}

/// Adapted form with nearest-sample lookup between samples.
pub fn build_adapted_form<T: Scalar>(samples: &[BundleSample<T>]) -> Result<QuadraticFormField<T>> {
    let mats = samples
        .iter()
        .map(|s| Ok((s.point.clone(), adapted_matrix(&s.f_minus, &s.f_plus)?)))
        .collect::<Result<Vec<_>>>()?;
    match mats.len() {
        0 => Err(Error::Precondition("adapted form needs at least one sample".into())),
        1 => QuadraticFormField::constant(mats.into_iter().next().expect("one sample").1),
        _ => QuadraticFormField::sampled(mats),
    }
}
