//! Pointwise separation criteria.
//!
//! `J̃ₓ = J·DX(x) + DX(x)ᵀ·J` is the derivative operator of the form along the
//! derivative cocycle. The form is (strictly) separated at `x` when some `δ`
//! makes `J̃ₓ − δJ` positive semidefinite (definite); the admissible `δ` form
//! a closed interval `[r₋, r₊]`. The linear Poincaré flow variant `Ĵₓ`
//! projects out the flow direction first.

use serde::{Deserialize, Serialize};

use crate::cocycle::integrate_cocycle;
use crate::error::{Error, Result};
use crate::fields::VectorFieldModel;
use crate::linalg::{cholesky, dot, inverse, norm, sym_eigen, Matrix};
use crate::qforms::QuadraticFormField;
use crate::scalar::Scalar;

/// `Strict` requires a margin above this multiple of `‖J̃‖`.
pub const STRICT_REL_TOL: f64 = 1e-8;
/// Flow speed below which a point counts as a singularity.
pub const SINGULAR_SPEED: f64 = 1e-8;
const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SeparationVerdict {
    Strict,
    NonStrict,
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MonotonicityVerdict {
    StrictlyMonotone,
    Monotone,
    Fail,
}

/// Closed interval `[r₋, r₊]` of admissible separation rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaInterval<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Scalar> DeltaInterval<T> {
    pub fn midpoint(&self) -> T {
        (self.lower + self.upper) * T::half()
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }

    pub fn contains(&self, d: T) -> bool {
        d >= self.lower && d <= self.upper
    }
}

/// How `J̃` treats forms that vary in space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum TildeMode {
    /// Constant forms only (adapted coordinates).
    #[default]
    ConstantForm,
    /// Adds the centred finite-difference derivative of `J` along `X` with step `h`.
    WithFlowDerivative { h: f64 },
}

#[derive(Debug, Clone)]
pub struct SeparationCertificate<T> {
    pub point: Vec<T>,
    pub tilde_matrix: Matrix<T>,
    /// `None` encodes the empty interval.
    pub delta_interval: Option<DeltaInterval<T>>,
    pub chosen_delta: T,
    /// Smallest eigenvalue of `J̃ − chosen_delta·J`.
    pub min_eig_margin: T,
    pub verdict: SeparationVerdict,
}

#[derive(Debug, Clone)]
pub struct MonotonicityCertificate<T> {
    pub point: Vec<T>,
    pub hat_matrix: Matrix<T>,
    pub normal_basis: Vec<Vec<T>>,
    pub restricted_spectrum: Vec<T>,
    pub verdict: MonotonicityVerdict,
    /// Smallest restricted eigenvalue.
    pub alpha1: T,
}

/// `J̃ₓ` for the form and field at `x`.
pub fn tilde_j<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    x: &[T],
    mode: TildeMode,
) -> Result<Matrix<T>> {
    let j = form.matrix_at(x);
    let dx = vf.jacobian(x)?;
    if dx.rows() != form.dim() {
        return Err(Error::DimensionMismatch { expected: form.dim(), found: dx.rows() });
    }
    let mut tilde = (&(j * &dx) + &(&dx.transpose() * j)).symmetrize();
    if !form.is_constant() {
        match mode {
            TildeMode::ConstantForm => {
                return Err(Error::Precondition("space-dependent form needs the flow-derivative mode".into()))
            }
            TildeMode::WithFlowDerivative { h } => {
                let h = T::c(h);
                let v = vf.eval(x)?;
                let fwd: Vec<T> = x.iter().zip(&v).map(|(&a, &b)| a + h * b).collect();
                let bwd: Vec<T> = x.iter().zip(&v).map(|(&a, &b)| a - h * b).collect();
                let dj = (form.matrix_at(&fwd) - form.matrix_at(&bwd)).scale(T::one() / (T::two() * h));
                tilde = &tilde + &dj.symmetrize();
            }
        }
    }
    Ok(tilde)
}

fn margin<T: Scalar>(tilde: &Matrix<T>, j: &Matrix<T>, delta: T) -> T {
    sym_eigen(&(tilde - &j.scale(delta))).min()
}

/// Maximizer of the concave function `δ ↦ λ_min(J̃ − δJ)` on `[lo, hi]`.
fn argmax_margin<T: Scalar>(tilde: &Matrix<T>, j: &Matrix<T>, mut lo: T, mut hi: T) -> (T, T) {
    let inv_phi = T::c(0.618_033_988_749_894_8);
    let mut a = hi - (hi - lo) * inv_phi;
    let mut b = lo + (hi - lo) * inv_phi;
    let mut fa = margin(tilde, j, a);
    let mut fb = margin(tilde, j, b);
    let stop = (hi - lo) * T::c(1e-15);
    for _ in 0..BISECTION_STEPS {
        if hi - lo <= stop {
            break;
        }
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + (hi - lo) * inv_phi;
            fb = margin(tilde, j, b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - (hi - lo) * inv_phi;
            fa = margin(tilde, j, a);
        }
    }
    let d = (lo + hi) * T::half();
    (d, margin(tilde, j, d))
}

/// Bisection for the sign change of the margin between `bad` (< 0) and `good` (≥ 0).
fn boundary<T: Scalar>(tilde: &Matrix<T>, j: &Matrix<T>, mut bad: T, mut good: T) -> T {
    for _ in 0..BISECTION_STEPS {
        let mid = (bad + good) * T::half();
        if mid == bad || mid == good {
            break;
        }
        if margin(tilde, j, mid) >= T::zero() {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

/// Search bracket `±(‖J̃‖ + 1)/λ_min(|J|)`.
fn bracket<T: Scalar>(tilde: &Matrix<T>, j: &Matrix<T>) -> T {
    let jt = sym_eigen(tilde).spectral_norm();
    let jmin = sym_eigen(j).values.iter().fold(T::infinity(), |m, v| m.min(v.abs()));
    (jt + T::one()) / jmin
}

/// Tolerance below zero still treated as a (degenerate) admissible margin.
fn empty_tol<T: Scalar>(tilde: &Matrix<T>, j: &Matrix<T>, b: T) -> T {
    T::c(1e-12) * (sym_eigen(tilde).spectral_norm() + sym_eigen(j).spectral_norm() * b).max(T::epsilon())
}

/// Largest closed interval of `δ` with `J̃ − δJ ⪰ 0`, or `None` when empty.
pub fn delta_interval_matrix<T: Scalar>(j: &Matrix<T>, tilde: &Matrix<T>) -> Option<DeltaInterval<T>> {
    let b = bracket(tilde, j);
    let (best, fbest) = argmax_margin(tilde, j, -b, b);
    if fbest < -empty_tol(tilde, j, b) {
        return None;
    }
    let snap = |d: T| if d.abs() <= T::c(1e-13) * b { T::zero() } else { d };
    if fbest < T::zero() {
        return Some(DeltaInterval { lower: snap(best), upper: snap(best) });
    }
    let lower = snap(boundary(tilde, j, -b, best));
    let upper = snap(boundary(tilde, j, b, best));
    Some(DeltaInterval { lower, upper })
}

/// `[r₋, r₊]` for the form at `x` and a precomputed `J̃ₓ`.
pub fn delta_interval<T: Scalar>(
    form: &QuadraticFormField<T>,
    tilde: &Matrix<T>,
    x: &[T],
) -> Option<DeltaInterval<T>> {
    delta_interval_matrix(form.matrix_at(x), tilde)
}

/// Certificate from a form matrix and `J̃` (no field evaluation).
pub fn certify_matrix<T: Scalar>(
    point: Vec<T>,
    j: &Matrix<T>,
    tilde: Matrix<T>,
    delta_hint: Option<T>,
) -> SeparationCertificate<T> {
    let interval = delta_interval_matrix(j, &tilde);
    let strict_tol = T::c(STRICT_REL_TOL) * sym_eigen(&tilde).spectral_norm();
    let (chosen, verdict) = match interval {
        None => {
            let b = bracket(&tilde, j);
            let (best, _) = argmax_margin(&tilde, j, -b, b);
            (best, SeparationVerdict::Fail)
        }
        Some(iv) => {
            let mid = iv.midpoint();
            let strict = iv.lower < iv.upper && margin(&tilde, j, mid) > strict_tol;
            let chosen = match delta_hint {
                Some(h) if iv.contains(h) => h,
                _ => mid,
            };
            (chosen, if strict { SeparationVerdict::Strict } else { SeparationVerdict::NonStrict })
        }
    };
    let min_eig_margin = margin(&tilde, j, chosen);
    SeparationCertificate {
        point,
        tilde_matrix: tilde,
        delta_interval: interval,
        chosen_delta: chosen,
        min_eig_margin,
        verdict,
    }
}

/// Checks (strict) separation of the form by the field at `x`.
pub fn check_separation<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    x: &[T],
    delta_hint: Option<T>,
) -> Result<SeparationCertificate<T>> {
    check_separation_with(form, vf, x, delta_hint, TildeMode::default())
}

pub fn check_separation_with<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    x: &[T],
    delta_hint: Option<T>,
    mode: TildeMode,
) -> Result<SeparationCertificate<T>> {
    let tilde = tilde_j(form, vf, x, mode)?;
    Ok(certify_matrix(x.to_vec(), form.matrix_at(x), tilde, delta_hint))
}

/// `Ĵₓ = DXᵀ Πᵀ J Π + Πᵀ J Π DX` and a `J`-orthonormal basis of `N_x`,
/// the `J`-orthogonal complement of `X(x)`.
pub fn hat_j<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    x: &[T],
) -> Result<(Matrix<T>, Vec<Vec<T>>)> {
    let v = vf.eval(x)?;
    let speed = norm(&v);
    if speed < T::c(SINGULAR_SPEED) {
        return Err(Error::SingularPoint);
    }
    let j = form.matrix_at(x);
    let jx = j.bilinear(&v, &v);
    if jx <= T::c(crate::qforms::DEFAULT_CONE_TOL) * speed * speed {
        return Err(Error::FlowDirectionNotPositive { value: jx.as_f64() });
    }
    let xhat: Vec<T> = v.iter().map(|&c| c / jx.sqrt()).collect();
    let jxhat = j.mul_vec(&xhat);
    let n = form.dim();
    // Π v = v − ⟨Jv, X̂⟩ X̂
    let pi = Matrix::from_fn(n, n, |r, c| {
        let id = if r == c { T::one() } else { T::zero() };
        id - xhat[r] * jxhat[c]
    });
    let jpi = &(&pi.transpose() * j) * &pi;
    let dx = vf.jacobian(x)?;
    let hat = (&(&dx.transpose() * &jpi) + &(&jpi * &dx)).symmetrize();
    let complement = form.pseudo_orthogonal_complement(x, &[v])?;
    let basis = form.pseudo_gram_schmidt(x, &complement)?.vectors;
    Ok((hat, basis))
}

/// Eigenvalues of `⟨Ĵ u, u⟩ / ‖u‖²` restricted to the span of `basis`.
pub fn restricted_spectrum<T: Scalar>(hat: &Matrix<T>, basis: &[Vec<T>]) -> Result<Vec<T>> {
    let k = basis.len();
    let g = Matrix::from_fn(k, k, |a, b| hat.bilinear(&basis[a], &basis[b]));
    let gram = Matrix::from_fn(k, k, |a, b| dot(&basis[a], &basis[b]));
    let l = cholesky(&gram)?;
    let linv = inverse(&l)?;
    let reduced = &(&linv * &g) * &linv.transpose();
    Ok(sym_eigen(&reduced).values)
}

/// Monotonicity of the form under the linear Poincaré flow at a regular point.
pub fn check_lpf_monotonicity<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    x: &[T],
) -> Result<MonotonicityCertificate<T>> {
    let (hat, basis) = hat_j(form, vf, x)?;
    let spectrum = restricted_spectrum(&hat, &basis)?;
    let alpha1 = spectrum.first().copied().unwrap_or_else(T::zero);
    let tol = T::c(STRICT_REL_TOL) * sym_eigen(&hat).spectral_norm();
    let verdict = if alpha1 > tol {
        MonotonicityVerdict::StrictlyMonotone
    } else if alpha1 >= -tol {
        MonotonicityVerdict::Monotone
    } else {
        MonotonicityVerdict::Fail
    };
    Ok(MonotonicityCertificate {
        point: x.to_vec(),
        hat_matrix: hat,
        normal_basis: basis,
        restricted_spectrum: spectrum,
        verdict,
        alpha1,
    })
}

/// `|(𝒥(A_h v) − 𝒥(v))/h − ⟨J̃ₓ v, v⟩|` with `A_h` from one integrator step.
pub fn derivative_residual<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    x: &[T],
    v: &[T],
    h: T,
) -> Result<T> {
    if !(h > T::zero()) {
        return Err(Error::Precondition("step h must be positive".into()));
    }
    let traj = integrate_cocycle(vf, x, h, h)?;
    let av = traj.fundamental(traj.len() - 1).mul_vec(v);
    let end = traj.state(traj.len() - 1);
    let tilde = tilde_j(form, vf, x, TildeMode::default())?;
    let fd = (form.evaluate(end, &av)? - form.evaluate(x, v)?) / h;
    Ok((fd - tilde.bilinear(v, v)).abs())
}

/// Serialized certificate digest `{x, r_minus, r_plus, delta, margin, verdict}`;
/// an empty interval has `null` endpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDigest {
    pub x: Vec<f64>,
    #[serde(with = "nan_as_null")]
    pub r_minus: f64,
    #[serde(with = "nan_as_null")]
    pub r_plus: f64,
    pub delta: f64,
    pub margin: f64,
    pub verdict: SeparationVerdict,
}

impl<T: Scalar> From<&SeparationCertificate<T>> for CertificateDigest {
    fn from(c: &SeparationCertificate<T>) -> Self {
        let (lo, hi) = c
            .delta_interval
            .map_or((f64::NAN, f64::NAN), |iv| (iv.lower.as_f64(), iv.upper.as_f64()));
        CertificateDigest {
            x: c.point.iter().map(|v| v.as_f64()).collect(),
            r_minus: lo,
            r_plus: hi,
            delta: c.chosen_delta.as_f64(),
            margin: c.min_eig_margin.as_f64(),
            verdict: c.verdict,
        }
    }
}

/// Serde adapter writing NaN as `null` and reading `null` back as NaN.
pub mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_field(l: &[f64]) -> VectorFieldModel<f64> {
        VectorFieldModel::builtin("linear_diag", l).unwrap()
    }

    fn form(d: &[f64]) -> QuadraticFormField<f64> {
        QuadraticFormField::diagonal(d).unwrap()
    }

    const O: [f64; 3] = [0.0; 3];
    const LAMBDA: [f64; 3] = [-3.0, -1.0, 2.0];

    #[test]
    fn tilde_j_diagonal_examples() {
        let (l1, l2, l3) = (-3.0, -1.0, 2.0);
        let f = diag_field(&[l1, l2, l3]);
        let t1 = tilde_j(&form(&[-1.0, 1.0, 1.0]), &f, &O, TildeMode::ConstantForm).unwrap();
        assert_eq!(t1, Matrix::from_diag(&[-2.0 * l1, 2.0 * l2, 2.0 * l3]));
        let t2 = tilde_j(&form(&[-1.0, -1.0, 1.0]), &f, &O, TildeMode::ConstantForm).unwrap();
        assert_eq!(t2, Matrix::from_diag(&[-2.0 * l1, -2.0 * l2, 2.0 * l3]));
        let c: VectorFieldModel<f64> = VectorFieldModel::builtin("saddle_suspension_constant", &[]).unwrap();
        let t0 = tilde_j(&form(&[-1.0, 1.0]), &c, &[0.0, 0.0], TildeMode::ConstantForm).unwrap();
        assert_eq!(t0, Matrix::zeros(2, 2));
    }

    #[test]
    fn delta_interval_examples() {
        let f = diag_field(&LAMBDA);
        let j1 = form(&[-1.0, 1.0, 1.0]);
        let iv = delta_interval(&j1, &tilde_j(&j1, &f, &O, TildeMode::ConstantForm).unwrap(), &O).unwrap();
        assert!((iv.lower + 6.0).abs() < 1e-8 && (iv.upper + 2.0).abs() < 1e-8, "{iv:?}");
        let j2 = form(&[-1.0, -1.0, 1.0]);
        let iv = delta_interval(&j2, &tilde_j(&j2, &f, &O, TildeMode::ConstantForm).unwrap(), &O).unwrap();
        assert!((iv.lower + 2.0).abs() < 1e-8 && (iv.upper - 4.0).abs() < 1e-8, "{iv:?}");
        let j3 = form(&[1.0, -1.0, 1.0]);
        assert!(delta_interval(&j3, &tilde_j(&j3, &f, &O, TildeMode::ConstantForm).unwrap(), &O).is_none());
    }

    #[test]
    fn check_separation_examples() {
        let f = diag_field(&LAMBDA);
        let c = check_separation(&form(&[-1.0, 1.0, 1.0]), &f, &O, None).unwrap();
        assert_eq!(c.verdict, SeparationVerdict::Strict);
        assert!((c.chosen_delta + 4.0).abs() < 1e-8);
        assert!((c.min_eig_margin - 2.0).abs() < 1e-8);

        let c = check_separation(&form(&[1.0, -1.0, 1.0]), &f, &O, None).unwrap();
        assert_eq!(c.verdict, SeparationVerdict::Fail);
        assert!(c.delta_interval.is_none() && c.min_eig_margin < 0.0);

        let k: VectorFieldModel<f64> = VectorFieldModel::builtin("saddle_suspension_constant", &[]).unwrap();
        let c = check_separation(&form(&[-1.0, 1.0]), &k, &[0.2, 0.4], None).unwrap();
        assert_eq!(c.verdict, SeparationVerdict::NonStrict);
        assert_eq!(c.chosen_delta, 0.0);
    }

    #[test]
    fn delta_hint_used_when_admissible() {
        let f = diag_field(&LAMBDA);
        let j1 = form(&[-1.0, 1.0, 1.0]);
        let c = check_separation(&j1, &f, &O, Some(-3.0)).unwrap();
        assert_eq!(c.chosen_delta, -3.0);
        assert!((c.min_eig_margin - 1.0).abs() < 1e-12);
        let c = check_separation(&j1, &f, &O, Some(5.0)).unwrap();
        assert!((c.chosen_delta + 4.0).abs() < 1e-8);
    }

    #[test]
    fn non_constant_form_needs_flow_derivative_mode() {
        let f = diag_field(&LAMBDA);
        let sampled = QuadraticFormField::sampled(vec![
            (vec![0.0, 0.0, 0.0], Matrix::from_diag(&[-1.0, 1.0, 1.0])),
            (vec![10.0, 0.0, 0.0], Matrix::from_diag(&[-2.0, 1.0, 1.0])),
        ])
        .unwrap();
        assert!(matches!(check_separation(&sampled, &f, &O, None), Err(Error::Precondition(_))));
        let c = check_separation_with(&sampled, &f, &O, None, TildeMode::WithFlowDerivative { h: 1e-6 }).unwrap();
        assert_eq!(c.verdict, SeparationVerdict::Strict);
    }

    #[test]
    fn hat_j_fixture() {
        let f = diag_field(&LAMBDA);
        let j2 = form(&[-1.0, -1.0, 1.0]);
        let x = [0.0, 0.0, 1.0];
        let (hat, basis) = hat_j(&j2, &f, &x).unwrap();
        assert!((&hat - &Matrix::from_diag(&[6.0, 2.0, 0.0])).max_abs() < 1e-14);
        for u in &basis {
            assert!(u[2].abs() < 1e-12);
        }
        let c = check_lpf_monotonicity(&j2, &f, &x).unwrap();
        assert_eq!(c.verdict, MonotonicityVerdict::StrictlyMonotone);
        assert!((c.alpha1 - 2.0).abs() < 1e-12);
        assert!((c.restricted_spectrum[1] - 6.0).abs() < 1e-12);

        let c = check_lpf_monotonicity(&j2, &f.reversed(), &x).unwrap();
        assert_eq!(c.verdict, MonotonicityVerdict::Fail);
        assert!((c.alpha1 + 6.0).abs() < 1e-12);
    }

    #[test]
    fn hat_j_preconditions() {
        let f = diag_field(&LAMBDA);
        let j2 = form(&[-1.0, -1.0, 1.0]);
        // X(x) = (-3, 0, 3) is J-null
        let x = [1.0, 0.0, 1.5];
        assert!(matches!(hat_j(&j2, &f, &x), Err(Error::FlowDirectionNotPositive { .. })));
        assert_eq!(hat_j(&j2, &f, &O).unwrap_err(), Error::SingularPoint);
    }

    #[test]
    fn constant_field_is_monotone_with_zero_rate() {
        let k: VectorFieldModel<f64> = VectorFieldModel::builtin("saddle_suspension_constant", &[]).unwrap();
        let c = check_lpf_monotonicity(&form(&[-1.0, 1.0]), &k, &[0.3, 0.3]).unwrap();
        assert_eq!(c.verdict, MonotonicityVerdict::Monotone);
        assert_eq!(c.alpha1, 0.0);
    }

    #[test]
    fn derivative_residual_examples() {
        let f = diag_field(&LAMBDA);
        let j2 = form(&[-1.0, -1.0, 1.0]);
        let v = [1.0, 1.0, 1.0];
        let q = tilde_j(&j2, &f, &O, TildeMode::ConstantForm).unwrap().bilinear(&v, &v);
        let r = derivative_residual(&j2, &f, &[0.5, 0.5, 0.5], &v, 1e-4).unwrap();
        assert!(r <= 1e-3 * (1.0 + q.abs()), "{r}");
        assert_eq!(derivative_residual(&j2, &f, &O, &[0.0; 3], 1e-4).unwrap(), 0.0);

        let lorenz: VectorFieldModel<f64> = VectorFieldModel::builtin("lorenz", &[]).unwrap();
        let r = derivative_residual(&j2, &lorenz, &O, &[0.0, 0.0, 1.0], 1e-5).unwrap();
        let q = tilde_j(&j2, &lorenz, &O, TildeMode::ConstantForm).unwrap()[(2, 2)];
        assert!(r <= 1e-4 * (1.0 + q.abs()), "{r}");
    }

    #[test]
    fn single_precision_certificate() {
        let f: VectorFieldModel<f32> = VectorFieldModel::builtin("linear_diag", &LAMBDA).unwrap();
        let j1: QuadraticFormField<f32> = QuadraticFormField::diagonal(&[-1.0, 1.0, 1.0]).unwrap();
        let c = check_separation(&j1, &f, &[0.0; 3], None).unwrap();
        assert_eq!(c.verdict, SeparationVerdict::Strict);
        let iv = c.delta_interval.unwrap();
        assert!((iv.lower + 6.0).abs() < 1e-4 && (iv.upper + 2.0).abs() < 1e-4);
    }

    #[test]
    fn digest_encodes_empty_interval_as_null() {
        let f = diag_field(&LAMBDA);
        let c = check_separation(&form(&[1.0, -1.0, 1.0]), &f, &O, None).unwrap();
        let d = CertificateDigest::from(&c);
        assert!(d.r_minus.is_nan() && d.r_plus.is_nan());
        assert_eq!(d.verdict, SeparationVerdict::Fail);
    }
}
