//! J-polar decomposition `L = R·U` of J-separated operators and the σ_d rates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cocycle::random_cone_vector;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, expm, inverse, Matrix};
use crate::qforms::{j_adjoint_matrix, signature, ConeClass, DEFAULT_CONE_TOL};
use crate::scalar::Scalar;

/// Number of positive-cone vectors used to check the J-separation precondition.
pub const SEPARATION_PROBES: usize = 50;
const DB_MAX_ITERS: usize = 100;

/// `L = R·U` with `R` J-symmetric with positive spectrum and `U` a J-isometry.
#[derive(Debug, Clone)]
pub struct JPolarDecomposition<T> {
    pub r: Matrix<T>,
    pub u: Matrix<T>,
    /// Eigenvalues of `R`, ascending: `r₋^q ≤ … ≤ r₋¹ ≤ r₊¹ ≤ … ≤ r₊^p`.
    pub spectrum: Vec<T>,
    /// Form index `q`.
    pub index: usize,
}

impl<T: Scalar> JPolarDecomposition<T> {
    /// `r₋¹`, the largest negative-side value.
    pub fn r_minus(&self) -> T {
        self.spectrum[self.index - 1]
    }

    /// `r₊¹`, the smallest positive-side value.
    pub fn r_plus(&self) -> T {
        self.spectrum[self.index]
    }

    /// Strict J-monotonicity `𝒥(Lv) > 𝒥(v)` for `v ≠ 0` holds iff `r₋¹ < 1 < r₊¹`.
    pub fn strictly_monotone(&self) -> bool {
        self.r_minus() < T::one() && self.r_plus() > T::one()
    }

    pub fn compose(&self) -> Matrix<T> {
        &self.r * &self.u
    }
}

/// Principal square root by the Denman–Beavers iteration.
pub fn sqrtm<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let mut y = m.clone();
    let mut z = Matrix::identity(m.rows());
    for _ in 0..DB_MAX_ITERS {
        let yi = inverse(&y)?;
        let zi = inverse(&z)?;
        let ny = (&y + &zi).scale(T::half());
        let nz = (&z + &yi).scale(T::half());
        let change = (&ny - &y).frobenius_norm();
        y = ny;
        z = nz;
        if change <= T::epsilon() * T::c(10.0) * y.frobenius_norm() {
            return Ok(y);
        }
    }
    Err(Error::NoConvergence { gap: f64::NAN })
}

/// Decomposes `L = R·U` with respect to the form matrix `j`.
pub fn j_polar_decompose<T: Scalar>(j: &Matrix<T>, l: &Matrix<T>) -> Result<JPolarDecomposition<T>> {
    let n = j.rows();
    if l.rows() != n || l.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: l.rows() });
    }
    let (q, _) = signature(j)?;
    if q == 0 || q == n {
        return Err(Error::InvalidIndex { index: q, dim: n });
    }
    let form = crate::qforms::QuadraticFormField::constant(j.clone())?;
    let origin = vec![T::zero(); n];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let tol = T::c(DEFAULT_CONE_TOL);
    for _ in 0..SEPARATION_PROBES {
        let v = random_cone_vector(&form, &origin, ConeClass::Positive, &mut rng)?;
        if form.cone_membership(&origin, &l.mul_vec(&v), tol)? != ConeClass::Positive {
            return Err(Error::NotJSeparated);
        }
    }
    let j_inv = inverse(j)?;
    let m = &(l * &j_adjoint_matrix(j, &j_inv, l));
    let eig = eigenvalues(m)?;
    let scale = m.frobenius_norm();
    if eig.iter().any(|e| e.re <= T::zero() || e.im.abs() > T::c(1e-10) * scale) {
        return Err(Error::NonPositiveSpectrum);
    }
    let r = sqrtm(m)?;
    // R is a polynomial in the J-symmetric M; remove round-off asymmetry of J·R.
    let r = &j_inv * &(j * &r).symmetrize();
    let u = &inverse(&r)? * l;
    let mut spectrum: Vec<T> = eig.iter().map(|e| e.re.sqrt()).collect();
    spectrum.sort_by(|a, b| a.partial_cmp(b).expect("finite spectrum"));
    Ok(JPolarDecomposition { r, u, spectrum, index: q })
}

/// `σ_d = r₊¹ ⋯ r₊^d`.
pub fn sigma_d<T: Scalar>(decomp: &JPolarDecomposition<T>, d: usize) -> Result<T> {
    let p = decomp.spectrum.len() - decomp.index;
    if d == 0 || d > p {
        return Err(Error::OutOfRange { what: "d", value: d, lo: 1, hi: p });
    }
    Ok(decomp.spectrum[decomp.index..decomp.index + d].iter().fold(T::one(), |acc, &x| acc * x))
}

/// `diag(-1,…,-1,+1,…,+1)` with `q` negative entries.
pub fn standard_form<T: Scalar>(n: usize, q: usize) -> Matrix<T> {
    Matrix::from_diag(&(0..n).map(|i| if i < q { -T::one() } else { T::one() }).collect::<Vec<_>>())
}

/// A random J-isometry `exp(J·K)`, `K` skew-symmetric with entries of size `scale`,
/// for the standard form with `q` negative entries.
pub fn random_j_isometry<T: Scalar, R: Rng>(rng: &mut R, n: usize, q: usize, scale: f64) -> Matrix<T> {
    let mut k = Matrix::zeros(n, n);
    for a in 0..n {
        for b in a + 1..n {
            let v = T::c(rng.gen_range(-scale..scale));
            k[(a, b)] = v;
            k[(b, a)] = -v;
        }
    }
    expm(&(&standard_form::<T>(n, q) * &k))
}

/// A random J-separated `L = R·U` for the standard form: `R = V·diag(r)·V⁻¹`
/// with `V`, `U` random J-isometries, negative-side values drawn from
/// `minus` and positive-side values from `plus`.
pub fn random_j_separated<T: Scalar, R: Rng>(
    rng: &mut R,
    n: usize,
    q: usize,
    minus: (f64, f64),
    plus: (f64, f64),
) -> Matrix<T> {
    let values: Vec<T> = (0..n)
        .map(|i| {
            let (lo, hi) = if i < q { minus } else { plus };
            T::c(rng.gen_range(lo..hi))
        })
        .collect();
    let v = random_j_isometry::<T, R>(rng, n, q, 0.5);
    let u = random_j_isometry::<T, R>(rng, n, q, 0.5);
    let r = &(&v * &Matrix::from_diag(&values)) * &inverse(&v).expect("J-isometries are invertible");
    &r * &u
}
