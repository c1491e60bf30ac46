//! Rate-based classification of a sampled splitting, the discrete sectional
//! expansion test, singularity indices, the flow-direction check and the
//! dual-form hyperbolicity test.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cocycle::{delta_area_cached, integrate_cocycle, IntervalCache, TrajectoryCocycle};
use crate::error::{Error, Result};
use crate::fields::{Region, VectorFieldModel};
use crate::linalg::{angle_to_subspace, det, eigenvalues, norm, span_basis, Matrix};
use crate::qforms::QuadraticFormField;
use crate::scalar::Scalar;
use crate::separation::{check_separation, SeparationCertificate, SeparationVerdict, SINGULAR_SPEED};

use super::bundles::spectral_norm;
use super::Classification;

/// Δ slopes below this magnitude are not uniform.
pub const SLOPE_TOL: f64 = 1e-3;
/// Discrete sectional expansion threshold on 2-plane area factors.
pub const SECTIONAL_THRESHOLD: f64 = 2.0;
/// `‖A_T|F₋‖` must drop below this for the calibrated block time.
pub const CONTRACTION_TARGET: f64 = 0.5;
/// Real parts closer than this to zero make a singularity non-hyperbolic.
pub const HYPERBOLICITY_TOL: f64 = 1e-8;

/// Discrete sectional expansion outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionalCheck<T> {
    pub holds: bool,
    /// Smallest area factor over the sampled planes.
    pub worst_area: T,
    pub time: T,
}

/// Smallest grid time with `‖A_T|F₋‖ < 1/2`.
pub fn calibrate_sectional_time<T: Scalar>(traj: &TrajectoryCocycle<T>, f_minus: &[Vec<T>]) -> Result<Option<T>> {
    let qm = Matrix::from_cols(&span_basis(f_minus))?;
    Ok((1..traj.len())
        .find(|&i| spectral_norm(&(traj.fundamental(i) * &qm)) < T::c(CONTRACTION_TARGET))
        .map(|i| traj.time(i)))
}

/// Area factor of `A` on the plane spanned by the orthonormal columns of `q`.
fn area_factor<T: Scalar>(a: &Matrix<T>, q: &Matrix<T>) -> T {
    let aq = a * q;
    det(&(&aq.transpose() * &aq)).max(T::zero()).sqrt()
}

/// Area expansion of `A_T` on `n_planes` random 2-planes of `F₊` (the first
/// plane is spanned by the first two basis vectors).
pub fn check_sectional_expansion<T: Scalar>(
    traj: &TrajectoryCocycle<T>,
    f_plus: &[Vec<T>],
    n_planes: usize,
    t: T,
    seed: u64,
) -> Result<SectionalCheck<T>> {
    let basis = span_basis(f_plus);
    if basis.len() < 2 {
        return Err(Error::OutOfRange { what: "dim F+", value: basis.len(), lo: 2, hi: traj.dim() });
    }
    let i = traj
        .index_of(t)
        .ok_or_else(|| Error::Precondition(format!("time {} is not on the trajectory grid", t.as_f64())))?;
    let a = traj.fundamental(i);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::infinity();
    for k in 0..n_planes.max(1) {
        let plane: Vec<Vec<T>> = if k == 0 {
            basis[..2].to_vec()
        } else {
            (0..2)
                .map(|_| {
                    let mut v = vec![T::zero(); traj.dim()];
                    for b in &basis {
                        let c = T::c(rng.gen_range(-1.0..1.0));
                        v.iter_mut().zip(b).for_each(|(x, &y)| *x = *x + c * y);
                    }
                    v
                })
                .collect()
        };
        let plane = span_basis(&plane);
        if plane.len() < 2 {
            continue;
        }
        worst = worst.min(area_factor(a, &Matrix::from_cols(&plane)?));
    }
    Ok(SectionalCheck { holds: worst > T::c(SECTIONAL_THRESHOLD), worst_area: worst, time: t })
}

/// Spectrum and index of `DX(σ)` at a listed singularity.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularityInfo<T> {
    pub point: Vec<T>,
    /// `(re, im)` pairs.
    pub eigenvalues: Vec<(T, T)>,
    /// Number of eigenvalues with negative real part.
    pub index: usize,
    pub hyperbolic: bool,
}

/// Singularity conditions for sectional hyperbolicity with splitting index `q`:
/// every listed singularity hyperbolic with `ind(σ) ∈ {q, q+1}`.
pub fn singularity_index_check<T: Scalar>(
    vf: &VectorFieldModel<T>,
    q: usize,
) -> Result<(bool, Vec<SingularityInfo<T>>)> {
    let mut ok = true;
    let mut infos = Vec::new();
    for s in vf.singularities() {
        let eig = eigenvalues(&vf.jacobian(s)?)?;
        let hyperbolic = eig.iter().all(|e| e.re.abs() > T::c(HYPERBOLICITY_TOL));
        let index = eig.iter().filter(|e| e.re < T::zero()).count();
        ok &= hyperbolic && (index == q || index == q + 1);
        infos.push(SingularityInfo {
            point: s.clone(),
            eigenvalues: eig.iter().map(|e| (e.re, e.im)).collect(),
            index,
            hyperbolic,
        });
    }
    Ok((ok, infos))
}

/// Slope of the midpoint `Δ` over `[horizon/2, horizon]` along the orbit of `x`.
pub fn delta_trend<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    traj: &TrajectoryCocycle<T>,
    cache: &mut IntervalCache<T>,
) -> Result<T> {
    let t = traj.final_time();
    if !(t > T::zero()) {
        return Err(Error::Precondition("trend needs a positive horizon".into()));
    }
    let k = traj.len() - 1;
    let s = traj.time(k / 2);
    let area = delta_area_cached(form, vf, traj, s, t, cache)?;
    Ok(area.midpoint / (t - s))
}

/// Inputs of [`classify_splitting`].
#[derive(Debug, Clone)]
pub struct ClassificationEvidence<'a, T> {
    pub certificates: &'a [SeparationCertificate<T>],
    /// Midpoint `Δ` slopes, one per sample.
    pub delta_slopes: &'a [T],
    /// Fitted domination rate `λ̂`.
    pub domination_rate: Option<T>,
    /// Discrete sectional expansion verdict.
    pub sectional: Option<bool>,
    /// Singularity conditions of [`singularity_index_check`].
    pub singularities_ok: bool,
}

fn tilde_positive_definite<T: Scalar>(c: &SeparationCertificate<T>) -> bool {
    match c.delta_interval {
        Some(iv) if iv.lower < T::zero() && iv.upper > T::zero() => {
            let e = crate::linalg::sym_eigen(&c.tilde_matrix);
            e.min() > T::c(crate::separation::STRICT_REL_TOL) * e.spectral_norm()
        }
        _ => false,
    }
}

/// Classification from sampled certificates, `Δ` trends and bundle checks.
pub fn classify_splitting<T: Scalar>(ev: &ClassificationEvidence<'_, T>) -> Result<Classification> {
    if ev.certificates.iter().any(|c| c.verdict != SeparationVerdict::Strict) {
        return Err(Error::Precondition("classification needs strict separation at every sample".into()));
    }
    if !ev.certificates.is_empty() && ev.certificates.iter().all(tilde_positive_definite) {
        return Ok(Classification::Hyperbolic);
    }
    let tol = T::c(SLOPE_TOL);
    let pos = ev.delta_slopes.iter().filter(|s| **s > tol).count();
    let neg = ev.delta_slopes.iter().filter(|s| **s < -tol).count();
    let m = ev.delta_slopes.len();
    if pos > 0 && neg > 0 {
        return Err(Error::Inconclusive("delta-area slopes change sign across samples".into()));
    }
    if m > 0 && pos == m {
        return Ok(Classification::PartiallyHyperbolicExpanding);
    }
    if m > 0 && neg == m {
        if ev.sectional == Some(true) && ev.singularities_ok {
            return Ok(Classification::SectionalHyperbolic);
        }
        return Ok(Classification::PartiallyHyperbolicContracting);
    }
    Ok(match ev.domination_rate {
        Some(r) if r > T::zero() => Classification::DominatedOnly,
        _ => Classification::None,
    })
}

/// True iff `X(x)` is within `angle_tol` of `F₊(x)` at every regular sample.
pub fn flow_direction_check<T: Scalar>(
    vf: &VectorFieldModel<T>,
    samples: &[super::BundleSample<T>],
    angle_tol: T,
) -> Result<bool> {
    for s in samples {
        let v = vf.eval(&s.point)?;
        if norm(&v) <= T::c(SINGULAR_SPEED) {
            continue;
        }
        if angle_to_subspace(&v, &s.f_plus) >= angle_tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sub-certificates of the dual-form test.
#[derive(Debug, Clone)]
pub struct DualFormVerdict<T> {
    pub hyperbolic: bool,
    /// `J` against `X`.
    pub forward: Vec<SeparationCertificate<T>>,
    /// `−G` against `−X`.
    pub backward: Vec<SeparationCertificate<T>>,
    /// `𝒥(X) ≥ 0` at every sample.
    pub forward_flow_ok: bool,
    /// `−𝒢(X) ≥ 0` at every sample.
    pub backward_flow_ok: bool,
}

/// Hyperbolicity from a pair of forms: `X` strictly `J`-separated with
/// `𝒥(X) ≥ 0`, and `−X` strictly `(−G)`-separated with `−𝒢(X) ≥ 0`.
pub fn dual_form_hyperbolicity<T: Scalar>(
    j: &QuadraticFormField<T>,
    g: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    samples: &[Vec<T>],
) -> Result<DualFormVerdict<T>> {
    let n = vf.dim();
    if j.dim() != n || g.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: j.dim().max(g.dim()) });
    }
    let s = j.index();
    if s + 2 >= n {
        return Err(Error::Precondition(format!("index of J must be below n - 2 = {}", n as i64 - 2)));
    }
    if g.index() != n - s - 1 {
        return Err(Error::Precondition(format!("index of G must be n - s - 1 = {}", n - s - 1)));
    }
    for (i, x) in samples.iter().enumerate() {
        if norm(&vf.eval(x)?) < T::c(SINGULAR_SPEED) {
            return Err(Error::SingularityInRegion { index: i });
        }
    }
    let neg_g = g.negated();
    let rev = vf.reversed();
    let mut out = DualFormVerdict {
        hyperbolic: true,
        forward: Vec::with_capacity(samples.len()),
        backward: Vec::with_capacity(samples.len()),
        forward_flow_ok: true,
        backward_flow_ok: true,
    };
    for x in samples {
        let v = vf.eval(x)?;
        let a = check_separation(j, vf, x, None)?;
        let b = check_separation(&neg_g, &rev, x, None)?;
        out.forward_flow_ok &= j.evaluate(x, &v)? >= T::zero();
        out.backward_flow_ok &= neg_g.evaluate(x, &v)? >= T::zero();
        out.hyperbolic &= a.verdict == SeparationVerdict::Strict && b.verdict == SeparationVerdict::Strict;
        out.forward.push(a);
        out.backward.push(b);
    }
    out.hyperbolic &= out.forward_flow_ok && out.backward_flow_ok;
    Ok(out)
}

/// Cocycle along the orbit of `x` ignoring the declared region.
pub fn free_trajectory<T: Scalar>(
    vf: &VectorFieldModel<T>,
    x: &[T],
    horizon: T,
    dt: T,
) -> Result<TrajectoryCocycle<T>> {
    let free = vf.clone().with_region(Region::Unbounded)?;
    integrate_cocycle(&free, x, horizon, dt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unit;
    use crate::splitting::BundleSample;

    fn diag(l: &[f64]) -> VectorFieldModel<f64> {
        VectorFieldModel::builtin("linear_diag", l).unwrap()
    }

    fn form(d: &[f64]) -> QuadraticFormField<f64> {
        QuadraticFormField::diagonal(d).unwrap()
    }

    #[test]
    fn sectional_examples() {
        let traj = integrate_cocycle(&diag(&[-3.0, -1.0, 2.0]), &[0.0; 3], 1.0, 1e-3).unwrap();
        let fp = [unit(3, 1), unit(3, 2)];
        let c = check_sectional_expansion(&traj, &fp, 10, 1.0, 0).unwrap();
        assert!(c.holds && (c.worst_area - 1f64.exp()).abs() < 1e-9, "{c:?}");
        let c = check_sectional_expansion(&traj, &fp, 10, 0.0, 0).unwrap();
        assert!(!c.holds && (c.worst_area - 1.0).abs() < 1e-12);
        let traj = integrate_cocycle(&diag(&[-3.0, -2.0, 2.0]), &[0.0; 3], 1.0, 1e-3).unwrap();
        let c = check_sectional_expansion(&traj, &fp, 10, 1.0, 0).unwrap();
        assert!(!c.holds && (c.worst_area - 1.0).abs() < 1e-9);
        assert!(matches!(
            check_sectional_expansion(&traj, &[unit(3, 2)], 10, 1.0, 0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn calibrated_time() {
        let traj = integrate_cocycle(&diag(&[-3.0, -1.0, 2.0]), &[0.0; 3], 2.0, 1e-2).unwrap();
        let t = calibrate_sectional_time(&traj, &[unit(3, 0)]).unwrap().unwrap();
        assert!((t - 0.24).abs() < 1e-9, "{t}");
        let traj = integrate_cocycle(&diag(&[-0.1, 1.0]), &[0.0; 2], 2.0, 1e-2).unwrap();
        assert_eq!(calibrate_sectional_time(&traj, &[unit(2, 0)]).unwrap(), None);
    }

    #[test]
    fn singularity_indices() {
        let lorenz: VectorFieldModel<f64> = VectorFieldModel::builtin("lorenz", &[]).unwrap();
        let (ok, infos) = singularity_index_check(&lorenz, 1).unwrap();
        assert_eq!(infos[0].index, 2);
        assert!(infos.iter().all(|i| i.hyperbolic));
        assert!(ok);
        let (ok, _) = singularity_index_check(&diag(&[-3.0, -1.0, 0.0]), 1).unwrap();
        assert!(!ok);
    }

    fn classify_fixture(lambda: &[f64], j: &[f64]) -> Result<Classification> {
        let f = diag(lambda);
        let j = form(j);
        let x = [0.1, 0.2, 0.3];
        let cert = check_separation(&j, &f, &x, None)?;
        let slope = if cert.verdict == SeparationVerdict::Strict {
            let traj = free_trajectory(&f, &x, 50.0, 1e-2)?;
            delta_trend(&j, &f, &traj, &mut IntervalCache::new())?
        } else {
            0.0
        };
        let certs = [cert];
        classify_splitting(&ClassificationEvidence {
            certificates: &certs,
            delta_slopes: &[slope],
            domination_rate: Some(2.0),
            sectional: Some(false),
            singularities_ok: true,
        })
    }

    #[test]
    fn lorenz_like_classifications() {
        let l = [-3.0, -1.0, 2.0];
        assert_eq!(classify_fixture(&l, &[-1.0, -1.0, 1.0]).unwrap(), Classification::Hyperbolic);
        assert_eq!(
            classify_fixture(&l, &[-1.0, 1.0, 1.0]).unwrap(),
            Classification::PartiallyHyperbolicContracting
        );
        assert!(matches!(classify_fixture(&l, &[1.0, -1.0, 1.0]), Err(Error::Precondition(_))));
        assert_eq!(
            classify_fixture(&[-3.0, -1.0, -0.5], &[-1.0, 1.0, 1.0]).unwrap(),
            Classification::PartiallyHyperbolicContracting
        );
    }

    #[test]
    fn mixed_slopes_are_inconclusive() {
        let f = diag(&[-3.0, -1.0, 2.0]);
        let c = check_separation(&form(&[-1.0, 1.0, 1.0]), &f, &[0.0; 3], None).unwrap();
        let certs = [c.clone(), c];
        let ev = ClassificationEvidence {
            certificates: &certs,
            delta_slopes: &[1.0, -1.0],
            domination_rate: None,
            sectional: None,
            singularities_ok: true,
        };
        assert!(matches!(classify_splitting(&ev), Err(Error::Inconclusive(_))));
        let ev = ClassificationEvidence { delta_slopes: &[1e-4, 0.0], domination_rate: Some(0.5), ..ev };
        assert_eq!(classify_splitting(&ev).unwrap(), Classification::DominatedOnly);
        let ev = ClassificationEvidence { domination_rate: Some(0.0), ..ev };
        assert_eq!(classify_splitting(&ev).unwrap(), Classification::None);
        let ev = ClassificationEvidence { delta_slopes: &[-1.0, -2.0], sectional: Some(true), ..ev };
        assert_eq!(classify_splitting(&ev).unwrap(), Classification::SectionalHyperbolic);
    }

    #[test]
    fn flow_direction_examples() {
        let f = diag(&[-3.0, -1.0, 2.0]);
        let on_axis = BundleSample { point: vec![0.0, 0.0, 1.0], f_minus: vec![unit(3, 0), unit(3, 1)], f_plus: vec![unit(3, 2)] };
        assert!(flow_direction_check(&f, &[on_axis.clone()], 1e-12).unwrap());
        let swapped = BundleSample { f_minus: on_axis.f_plus.clone(), f_plus: on_axis.f_minus.clone(), ..on_axis };
        assert!(!flow_direction_check(&f, &[swapped], 1e-3).unwrap());
    }

    #[test]
    fn dual_form_examples() {
        let a = [-3.0, -1.0, 2.0, 4.0];
        let j = form(&[-1.0, 1.0, 1.0, 1.0]);
        let g = form(&[-1.0, -1.0, 1.0, 1.0]);
        let pts = vec![vec![0.0, 1.0, 0.0, 0.0], vec![0.05, 1.0, -0.05, 0.02], vec![-0.1, -0.9, 0.1, 0.05]];
        let v = dual_form_hyperbolicity(&j, &g, &diag(&a), &pts).unwrap();
        assert!(v.hyperbolic, "{v:?}");
        let iv = v.forward[0].delta_interval.unwrap();
        assert!((iv.lower + 6.0).abs() < 1e-8 && (iv.upper + 2.0).abs() < 1e-8);
        let iv = v.backward[0].delta_interval.unwrap();
        assert!((iv.lower + 4.0).abs() < 1e-8 && (iv.upper - 2.0).abs() < 1e-8);

        let v = dual_form_hyperbolicity(&j, &g, &diag(&[0.0, -1.0, 2.0, 4.0]), &pts).unwrap();
        assert!(!v.hyperbolic);
        assert!(v.forward[0].delta_interval.is_none());

        let with_origin = vec![pts[0].clone(), vec![0.0; 4]];
        assert_eq!(
            dual_form_hyperbolicity(&j, &g, &diag(&a), &with_origin).unwrap_err(),
            Error::SingularityInRegion { index: 1 }
        );
        let bad_g = form(&[-1.0, -1.0, -1.0, 1.0]);
        assert!(matches!(dual_form_hyperbolicity(&j, &bad_g, &diag(&a), &pts), Err(Error::Precondition(_))));
    }
}
