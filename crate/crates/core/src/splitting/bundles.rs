//! Invariant bundles `F₋ ⊕ F₊` from iterated cone images, domination fits and
//! the empirical Grassmannian contraction check.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cocycle::{delta_area, integrate_cocycle, integrate_flow, TrajectoryCocycle};
use crate::error::{Error, Result};
use crate::fields::{Region, VectorFieldModel};
use crate::linalg::{dot, gap, inverse, norm, orthonormalize, span_basis, sym_eigen, Matrix};
use crate::qforms::QuadraticFormField;
use crate::scalar::Scalar;

/// Successive iterates closer than this count as converged.
pub const CONVERGED_GAP: f64 = 1e-8;
/// Final gaps above this are reported as non-convergence.
pub const STAGNATION_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionOptions<T> {
    /// Block time `T`.
    pub block_time: T,
    pub iters: usize,
    pub dt: T,
}

impl<T: Scalar> Default for ExtractionOptions<T> {
    fn default() -> Self {
        ExtractionOptions { block_time: T::one(), iters: 40, dt: T::c(1e-2) }
    }
}

/// Bundles at one point with the convergence history of both iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundles<T> {
    pub point: Vec<T>,
    /// Orthonormal basis of `F₋(x)` (`q` vectors).
    pub f_minus: Vec<Vec<T>>,
    /// Orthonormal basis of `F₊(x)` (`n − q` vectors).
    pub f_plus: Vec<Vec<T>>,
    /// Gaps between successive `F₊` iterates.
    pub plus_gaps: Vec<T>,
    /// Gaps between successive `F₋` iterates.
    pub minus_gaps: Vec<T>,
}

fn unbounded<T: Scalar>(vf: &VectorFieldModel<T>) -> VectorFieldModel<T> {
    vf.clone().with_region(Region::Unbounded).expect("unbounded region fits every dimension")
}

fn rescale<T: Scalar>(m: Matrix<T>) -> Matrix<T> {
    let s = m.max_abs();
    if s > T::zero() {
        m.scale(T::one() / s)
    } else {
        m
    }
}

/// Iterated images `B₁⋯B_k · seed(z_k)` where `z_k = φ^k(x)` for the map `φ`
/// given by `step_field` over one block, and `B_j` is the cocycle of
/// `block_field` from `z_j` back to `z_{j−1}`.
fn iterate_images<T: Scalar>(
    form: &QuadraticFormField<T>,
    step_field: &VectorFieldModel<T>,
    block_field: &VectorFieldModel<T>,
    x: &[T],
    negative: bool,
    opts: &ExtractionOptions<T>,
) -> Result<(Vec<Vec<T>>, Vec<T>)> {
    let n = form.dim();
    let seed_at = |z: &[T]| -> Result<Vec<Vec<T>>> {
        let b = form.lagrange_normalize(z)?;
        Ok(if negative { b.negative_axes() } else { b.positive_axes() })
    };
    let mut product = Matrix::identity(n);
    let mut z = x.to_vec();
    let mut current = span_basis(&seed_at(x)?);
    let mut gaps = Vec::with_capacity(opts.iters);
    for _ in 0..opts.iters {
        let path = integrate_flow(step_field, &z, opts.block_time, opts.dt)?;
        z = path.states.last().expect("non-empty").clone();
        let block = integrate_cocycle(block_field, &z, opts.block_time, opts.dt)?;
        product = rescale(&product * block.final_fundamental());
        let images: Vec<Vec<T>> = seed_at(&z)?.iter().map(|s| product.mul_vec(s)).collect();
        let next = orthonormalize(&images, T::c(1e-13));
        if next.len() != images.len() {
            return Err(Error::DegenerateSubspace);
        }
        let g = gap(&current, &next);
        gaps.push(g);
        current = next;
        if g < T::c(CONVERGED_GAP) {
            return Ok((current, gaps));
        }
    }
    let last = gaps.last().copied().unwrap_or_else(T::infinity);
    if !(last <= T::c(STAGNATION_GAP)) {
        return Err(Error::NoConvergence { gap: last.as_f64() });
    }
    Ok((current, gaps))
}

/// Checks that the form is not `Fail` along the orbit segment `[0, t]` from `x`.
fn separated_along<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    x: &[T],
    t: T,
    dt: T,
) -> Result<TrajectoryCocycle<T>> {
    let traj = integrate_cocycle(vf, x, t, dt)?;
    delta_area(form, vf, &traj, T::zero(), traj.final_time())?;
    Ok(traj)
}

/// `F₊(x)` from forward images of positive subspaces seeded on the backward
/// orbit, `F₋(x)` symmetrically from the reversed flow.
pub fn extract_bundles<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    x: &[T],
    opts: &ExtractionOptions<T>,
) -> Result<Bundles<T>> {
    if !(opts.block_time > T::zero()) || opts.iters == 0 {
        return Err(Error::Precondition("block time and iteration count must be positive".into()));
    }
    let fwd = unbounded(vf);
    let bwd = fwd.reversed();
    let block_cert = |z: &[T]| separated_along(form, &fwd, z, opts.block_time, opts.dt).map(|_| ());
    block_cert(x)?;
    let (f_plus, plus_gaps) = iterate_images(form, &bwd, &fwd, x, false, opts)?;
    let (f_minus, minus_gaps) = iterate_images(form, &fwd, &bwd, x, true, opts)?;
    Ok(Bundles { point: x.to_vec(), f_minus, f_plus, plus_gaps, minus_gaps })
}

/// Largest singular value of `m`.
pub(crate) fn spectral_norm<T: Scalar>(m: &Matrix<T>) -> T {
    sym_eigen(&(&m.transpose() * m)).max().max(T::zero()).sqrt()
}

/// Smallest singular value of a tall full-rank matrix, via `1/‖R⁻¹‖` of its QR factor.
pub(crate) fn min_singular<T: Scalar>(m: &Matrix<T>) -> T {
    let k = m.cols();
    let mut q: Vec<Vec<T>> = Vec::with_capacity(k);
    let mut r = Matrix::zeros(k, k);
    for j in 0..k {
        let mut v = m.col(j);
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let c = dot(qi, &v);
                r[(i, j)] = r[(i, j)] + c;
                v.iter_mut().zip(qi).for_each(|(a, &b)| *a = *a - c * b);
            }
        }
        let nv = norm(&v);
        if nv == T::zero() {
            return T::zero();
        }
        r[(j, j)] = nv;
        q.push(v.iter().map(|&a| a / nv).collect());
    }
    match inverse(&r) {
        Ok(ri) => T::one() / spectral_norm(&ri),
        Err(_) => T::zero(),
    }
}

/// `log(‖A_t|F₋‖ · ‖(A_t|F₊)⁻¹‖)` at every grid time.
pub fn domination_profile<T: Scalar>(
    traj: &TrajectoryCocycle<T>,
    f_minus: &[Vec<T>],
    f_plus: &[Vec<T>],
) -> Result<Vec<T>> {
    let qm = Matrix::from_cols(&span_basis(f_minus))?;
    let qp = Matrix::from_cols(&span_basis(f_plus))?;
    Ok(traj
        .fundamentals()
        .iter()
        .map(|a| (spectral_norm(&(a * &qm)) / min_singular(&(a * &qp))).ln())
        .collect())
}

/// Fitted `(K̂, λ̂)` of `‖A_t|F₋‖·‖(A_t|F₊)⁻¹‖ ≈ K̂ e^{−λ̂ t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationFit<T> {
    pub constant: T,
    pub rate: T,
}

/// Least-squares fit over the grid times inside `window`.
pub fn estimate_domination<T: Scalar>(
    traj: &TrajectoryCocycle<T>,
    f_minus: &[Vec<T>],
    f_plus: &[Vec<T>],
    window: (T, T),
) -> Result<DominationFit<T>> {
    let profile = domination_profile(traj, f_minus, f_plus)?;
    let pts: Vec<(T, T)> = traj
        .times()
        .iter()
        .copied()
        .zip(profile)
        .filter(|(t, y)| *t >= window.0 && *t <= window.1 && y.is_finite())
        .collect();
    if pts.len() < 2 {
        return Err(Error::Precondition("domination fit needs at least two grid points".into()));
    }
    let m = T::from_usize_lossy(pts.len());
    let tm = pts.iter().map(|p| p.0).sum::<T>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<T>() / m;
    let sxx: T = pts.iter().map(|p| (p.0 - tm) * (p.0 - tm)).sum();
    let sxy: T = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    let slope = sxy / sxx;
    Ok(DominationFit { constant: (ym - slope * tm).exp(), rate: -slope })
}

/// Random `p`-dimensional subspace of `C₊(x)`: the graph of a strict
/// contraction from the Lagrange positive axes into the negative ones.
pub fn random_positive_subspace<T: Scalar, R: Rng>(
    form: &QuadraticFormField<T>,
    x: &[T],
    rng: &mut R,
) -> Result<Vec<Vec<T>>> {
    let b = form.lagrange_normalize(x)?;
    let (neg, pos) = (b.negative_axes(), b.positive_axes());
    let c = Matrix::from_fn(neg.len(), pos.len(), |_, _| T::c(rng.gen_range(-1.0..1.0)));
    let norm = spectral_norm(&c);
    let target = T::c(rng.gen_range(0.0..0.95));
    let c = if norm > T::zero() { c.scale(target / norm) } else { c };
    Ok((0..pos.len())
        .map(|i| {
            let mut v = pos[i].clone();
            for (k, e) in neg.iter().enumerate() {
                for (vj, ej) in v.iter_mut().zip(e) {
                    *vj = *vj + c[(k, i)] * *ej;
                }
            }
            v
        })
        .collect())
}

/// Largest observed `gap(A_T S₁, A_T S₂) / gap(S₁, S₂)` over random pairs of
/// `p`-subspaces inside `C₊(x)`.
#[allow(clippy::too_many_arguments)]
pub fn cone_image_contraction<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    x: &[T],
    t: T,
    n_pairs: usize,
    seed: u64,
    dt: T,
) -> Result<T> {
    if n_pairs == 0 {
        return Err(Error::Precondition("n_pairs must be at least 1".into()));
    }
    let traj = separated_along(form, vf, x, t, dt)?;
    let a = traj.final_fundamental();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = T::zero();
    let mut done = 0;
    while done < n_pairs {
        let s1 = random_positive_subspace(form, x, &mut rng)?;
        let s2 = random_positive_subspace(form, x, &mut rng)?;
        let before = gap(&s1, &s2);
        if before < T::c(1e-6) {
            continue;
        }
        let image = |s: &[Vec<T>]| s.iter().map(|v| a.mul_vec(v)).collect::<Vec<_>>();
        worst = worst.max(gap(&image(&s1), &image(&s2)) / before);
        done += 1;
    }
    Ok(worst)
}
