//! Matrix exponential by scaling and squaring with a diagonal Padé approximant.

use super::decomp::Lu;
use super::matrix::Matrix;
use crate::scalar::Scalar;

const PADE_DEGREE: usize = 8;

pub fn expm<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let n = a.rows();
    let norm = (0..n)
        .map(|i| a.row(i).iter().fold(T::zero(), |s, x| s + x.abs()))
        .fold(T::zero(), T::max);
    let mut squarings = 0i32;
    if norm > T::half() {
        squarings = (norm / T::half()).log2().ceil().to_i32().unwrap_or(0).max(0);
    }
    let scaled = a.scale(T::two().powi(-squarings));

    // Padé coefficients c_k = (2m-k)! m! / ((2m)! k! (m-k)!)
    let m = PADE_DEGREE;
    let mut c = vec![T::one(); m + 1];
    for k in 1..=m {
        c[k] = c[k - 1] * T::from_usize_lossy(m + 1 - k) / T::from_usize_lossy(k * (2 * m + 1 - k));
    }
    let ident = Matrix::identity(n);
    let mut num = ident.scale(c[0]);
    let mut den = ident.scale(c[0]);
    let mut power = ident;
    for (k, &ck) in c.iter().enumerate().skip(1) {
        power = &power * &scaled;
        let term = power.scale(ck);
        num = &num + &term;
        den = if k % 2 == 0 { &den + &term } else { &den - &term };
    }
    let mut result = Lu::new(&den).expect("Padé denominator is invertible for small norms").solve_matrix(&num);
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}
