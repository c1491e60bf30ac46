//! Flow and derivative-cocycle integration, the δ-area functional and
//! trajectory-level checks of the growth and quotient inequalities.

use std::collections::HashMap;
use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fields::{Region, VectorFieldModel};
use crate::linalg::{inverse, norm, Matrix};
use crate::qforms::{ConeClass, QuadraticFormField, DEFAULT_CONE_TOL};
use crate::scalar::Scalar;
use crate::separation::{certify_matrix, tilde_j, DeltaInterval, SeparationVerdict, TildeMode};

/// Default integration step.
pub const DEFAULT_DT: f64 = 1e-3;
/// Tolerance on the terminal-state self-consistency error used by [`refine_step`].
pub const SELF_CONSISTENCY_TOL: f64 = 1e-6;
/// Tolerance of the growth and quotient bound checks (log scale).
pub const BOUND_TOL: f64 = 1e-6;

/// Orbit points on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPath<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
}

/// States `X_{tᵢ}(x₀)` and fundamental matrices `Y(tᵢ) = A_{tᵢ}(x₀)` on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryCocycle<T> {
    times: Vec<T>,
    states: Vec<Vec<T>>,
    fundamentals: Vec<Matrix<T>>,
    step: T,
    method_order: usize,
}

impl<T: Scalar> TrajectoryCocycle<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn states(&self) -> &[Vec<T>] {
        &self.states
    }

    pub fn fundamentals(&self) -> &[Matrix<T>] {
        &self.fundamentals
    }

    pub fn time(&self, i: usize) -> T {
        self.times[i]
    }

    pub fn state(&self, i: usize) -> &[T] {
        &self.states[i]
    }

    pub fn fundamental(&self, i: usize) -> &Matrix<T> {
        &self.fundamentals[i]
    }

    pub fn final_state(&self) -> &[T] {
        self.states.last().expect("non-empty trajectory")
    }

    pub fn final_fundamental(&self) -> &Matrix<T> {
        self.fundamentals.last().expect("non-empty trajectory")
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn method_order(&self) -> usize {
        self.method_order
    }

    pub fn final_time(&self) -> T {
        *self.times.last().expect("non-empty trajectory")
    }

    /// Grid index of time `t`, if `t` lies on the grid (within half a step).
    pub fn index_of(&self, t: T) -> Option<usize> {
        if self.len() == 1 {
            return (t.abs() <= T::c(1e-12)).then_some(0);
        }
        let i = (t / self.step).round();
        let i = i.to_usize()?;
        if i >= self.len() || (self.times[i] - t).abs() > self.step * T::half() {
            return None;
        }
        Some(i)
    }

    /// Relative mismatch between `A_{t_k}` and `A_{t_k - t_m}(X_{t_m}) · A_{t_m}`,
    /// re-integrating from the grid state `mid`.
    pub fn cocycle_residual(&self, vf: &VectorFieldModel<T>, mid: usize) -> Result<T> {
        let k = self.len() - 1;
        let rest = integrate_cocycle(vf, &self.states[mid], self.times[k] - self.times[mid], self.step)?;
        let expected = &self.fundamentals[k] * &inverse(&self.fundamentals[mid])?;
        let diff = (rest.final_fundamental() - &expected).frobenius_norm();
        Ok(diff / expected.frobenius_norm().max(T::min_positive_value()))
    }

    /// CSV dump with header `t,x1..xn,Y11..Ynn` (fundamentals row-major).
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.dim();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        for r in 1..=n {
            header.extend((1..=n).map(|c| format!("Y{r}{c}")));
        }
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.len() {
            let mut row = vec![self.times[i].as_f64().to_string()];
            row.extend(self.states[i].iter().map(|v| v.as_f64().to_string()));
            row.extend(self.fundamentals[i].as_slice().iter().map(|v| v.as_f64().to_string()));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn grid<T: Scalar>(t_final: T, dt: T) -> Result<(usize, T)> {
    if !(dt > T::zero()) || !dt.is_finite() {
        return Err(Error::Precondition("dt must be positive".into()));
    }
    if !(t_final >= T::zero()) || !t_final.is_finite() {
        return Err(Error::Precondition("t_final must be a non-negative number".into()));
    }
    if t_final == T::zero() {
        return Ok((0, dt));
    }
    let steps = (t_final / dt - T::c(1e-9)).ceil().max(T::one());
    let steps = steps.to_usize().ok_or_else(|| Error::Precondition("too many steps".into()))?;
    Ok((steps, t_final / T::from_usize_lossy(steps)))
}

fn check_state<T: Scalar>(region: &Region<T>, x: &[T], t: T) -> Result<()> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { time: t.as_f64() });
    }
    if !region.contains(x) {
        return Err(Error::EscapedRegion { time: t.as_f64(), state: x.iter().map(|v| v.as_f64()).collect() });
    }
    Ok(())
}

fn shifted<T: Scalar>(x: &[T], k: &[T], h: T) -> Vec<T> {
    x.iter().zip(k).map(|(&a, &b)| a + h * b).collect()
}

fn rk4_state<T: Scalar>(vf: &VectorFieldModel<T>, x: &[T], h: T) -> Result<Vec<T>> {
    let half = h * T::half();
    let k1 = vf.eval(x)?;
    let k2 = vf.eval(&shifted(x, &k1, half))?;
    let k3 = vf.eval(&shifted(x, &k2, half))?;
    let k4 = vf.eval(&shifted(x, &k3, h))?;
    let sixth = h / T::c(6.0);
    Ok((0..x.len())
        .map(|i| x[i] + sixth * (k1[i] + T::two() * (k2[i] + k3[i]) + k4[i]))
        .collect())
}

/// Classical fourth-order integration of `ẋ = X(x)` over `[0, t_final]`.
pub fn integrate_flow<T: Scalar>(vf: &VectorFieldModel<T>, x0: &[T], t_final: T, dt: T) -> Result<FlowPath<T>> {
    crate::linalg::check_dim(x0, vf.dim())?;
    let (steps, h) = grid(t_final, dt)?;
    check_state(vf.region(), x0, T::zero())?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    times.push(T::zero());
    states.push(x0.to_vec());
    for i in 1..=steps {
        let t = T::from_usize_lossy(i) * h;
        let next = rk4_state(vf, states.last().expect("non-empty"), h)?;
        check_state(vf.region(), &next, t)?;
        times.push(t);
        states.push(next);
    }
    Ok(FlowPath { times, states })
}

/// Joint fourth-order integration of the state and of `Ẏ = DX(X_t(x₀))·Y`, `Y(0) = Id`.
pub fn integrate_cocycle<T: Scalar>(
    vf: &VectorFieldModel<T>,
    x0: &[T],
    t_final: T,
    dt: T,
) -> Result<TrajectoryCocycle<T>> {
    crate::linalg::check_dim(x0, vf.dim())?;
    let n = vf.dim();
    let (steps, h) = grid(t_final, dt)?;
    check_state(vf.region(), x0, T::zero())?;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut fundamentals = Vec::with_capacity(steps + 1);
    times.push(T::zero());
    states.push(x0.to_vec());
    fundamentals.push(Matrix::identity(n));
    let half = h * T::half();
    let sixth = h / T::c(6.0);
    for i in 1..=steps {
        let x = states.last().expect("non-empty");
        let y = fundamentals.last().expect("non-empty");
        let k1 = vf.eval(x)?;
        let m1 = &vf.jacobian(x)? * y;
        let x2 = shifted(x, &k1, half);
        let y2 = y + &m1.scale(half);
        let k2 = vf.eval(&x2)?;
        let m2 = &vf.jacobian(&x2)? * &y2;
        let x3 = shifted(x, &k2, half);
        let y3 = y + &m2.scale(half);
        let k3 = vf.eval(&x3)?;
        let m3 = &vf.jacobian(&x3)? * &y3;
        let x4 = shifted(x, &k3, h);
        let y4 = y + &m3.scale(h);
        let k4 = vf.eval(&x4)?;
        let m4 = &vf.jacobian(&x4)? * &y4;
        let next: Vec<T> = (0..n).map(|r| x[r] + sixth * (k1[r] + T::two() * (k2[r] + k3[r]) + k4[r])).collect();
        let incr = &(&m1 + &(&m2 + &m3).scale(T::two())) + &m4;
        let ynext = y + &incr.scale(sixth);
        let t = T::from_usize_lossy(i) * h;
        check_state(vf.region(), &next, t)?;
        if !ynext.is_finite() {
            return Err(Error::NonFinite { time: t.as_f64() });
        }
        times.push(t);
        states.push(next);
        fundamentals.push(ynext);
    }
    Ok(TrajectoryCocycle { times, states, fundamentals, step: h, method_order: 4 })
}

/// Halves `dt` until the terminal state at `dt` and `dt/2` agree within `tol`.
/// Returns the accepted step and the last self-consistency error.
pub fn refine_step<T: Scalar>(
    vf: &VectorFieldModel<T>,
    x0: &[T],
    t_final: T,
    dt: T,
    tol: T,
    max_halvings: usize,
) -> Result<(T, T)> {
    let mut dt = dt;
    let mut coarse = integrate_flow(vf, x0, t_final, dt)?;
    let mut err = T::infinity();
    for _ in 0..=max_halvings {
        let fine = integrate_flow(vf, x0, t_final, dt * T::half())?;
        let a = coarse.states.last().expect("non-empty");
        let b = fine.states.last().expect("non-empty");
        let diff: Vec<T> = a.iter().zip(b).map(|(&p, &q)| p - q).collect();
        err = norm(&diff);
        if err < tol {
            return Ok((dt, err));
        }
        dt = dt * T::half();
        coarse = fine;
    }
    Err(Error::NoConvergence { gap: err.as_f64() })
}

/// Memo of δ-intervals keyed by the bit patterns of `(J, J̃)`.
#[derive(Debug, Default)]
pub struct IntervalCache<T> {
    map: HashMap<Vec<u64>, (Option<DeltaInterval<T>>, SeparationVerdict)>,
}

impl<T: Scalar> IntervalCache<T> {
    pub fn new() -> Self {
        IntervalCache { map: HashMap::new() }
    }

    /// δ-interval and separation verdict at `x`.
    pub fn interval_at(
        &mut self,
        form: &QuadraticFormField<T>,
        vf: &VectorFieldModel<T>,
        x: &[T],
    ) -> Result<(Option<DeltaInterval<T>>, SeparationVerdict)> {
        let j = form.matrix_at(x);
        let tilde = tilde_j(form, vf, x, TildeMode::ConstantForm)?;
        let key: Vec<u64> = j.as_slice().iter().chain(tilde.as_slice()).map(|v| v.as_f64().to_bits()).collect();
        if let Some(hit) = self.map.get(&key) {
            return Ok(*hit);
        }
        let cert = certify_matrix(x.to_vec(), j, tilde, None);
        let value = (cert.delta_interval, cert.verdict);
        self.map.insert(key, value);
        Ok(value)
    }
}

/// `Δ_s^t` computed with `δ = r₋`, the midpoint and `δ = r₊`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaArea<T> {
    pub lower: T,
    pub midpoint: T,
    pub upper: T,
    pub horizon: (T, T),
}

/// Which admissible `δ` to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaChoice {
    Lower,
    Upper,
    Mid,
}

impl DeltaChoice {
    fn pick<T: Scalar>(self, iv: &DeltaInterval<T>) -> T {
        match self {
            DeltaChoice::Lower => iv.lower,
            DeltaChoice::Upper => iv.upper,
            DeltaChoice::Mid => iv.midpoint(),
        }
    }
}

/// δ-intervals at grid points `from..=to`; fails on the first empty interval.
fn orbit_intervals<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    traj: &TrajectoryCocycle<T>,
    from: usize,
    to: usize,
    cache: &mut IntervalCache<T>,
) -> Result<Vec<DeltaInterval<T>>> {
    (from..=to)
        .map(|i| match cache.interval_at(form, vf, traj.state(i))? {
            (Some(iv), v) if v != SeparationVerdict::Fail => Ok(iv),
            _ => Err(Error::SeparationFailedOnOrbit {
                index: i,
                time: traj.time(i).as_f64(),
                point: traj.state(i).iter().map(|v| v.as_f64()).collect(),
            }),
        })
        .collect()
}

/// Running trapezoidal integrals of the chosen `δ` along the grid, starting at 0.
fn cumulative<T: Scalar>(traj: &TrajectoryCocycle<T>, from: usize, ivs: &[DeltaInterval<T>], choice: DeltaChoice) -> Vec<T> {
    let mut acc = T::zero();
    let mut out = Vec::with_capacity(ivs.len());
    out.push(acc);
    for k in 1..ivs.len() {
        let h = traj.time(from + k) - traj.time(from + k - 1);
        acc = acc + (choice.pick(&ivs[k - 1]) + choice.pick(&ivs[k])) * h * T::half();
        out.push(acc);
    }
    out
}

fn grid_index<T: Scalar>(traj: &TrajectoryCocycle<T>, t: T) -> Result<usize> {
    traj.index_of(t)
        .ok_or_else(|| Error::Precondition(format!("time {} is not on the trajectory grid", t.as_f64())))
}

/// `Δ_s^t(x)` by composite trapezoidal quadrature on the trajectory grid.
pub fn delta_area<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    traj: &TrajectoryCocycle<T>,
    s: T,
    t: T,
) -> Result<DeltaArea<T>> {
    delta_area_cached(form, vf, traj, s, t, &mut IntervalCache::new())
}

pub fn delta_area_cached<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    traj: &TrajectoryCocycle<T>,
    s: T,
    t: T,
    cache: &mut IntervalCache<T>,
) -> Result<DeltaArea<T>> {
    if s > t {
        return Err(Error::Precondition("delta_area needs s <= t".into()));
    }
    let (i, k) = (grid_index(traj, s)?, grid_index(traj, t)?);
    let ivs = orbit_intervals(form, vf, traj, i, k, cache)?;
    let last = |c| *cumulative(traj, i, &ivs, c).last().expect("non-empty");
    Ok(DeltaArea {
        lower: last(DeltaChoice::Lower),
        midpoint: last(DeltaChoice::Mid),
        upper: last(DeltaChoice::Upper),
        horizon: (s, t),
    })
}

/// Outcome of a trajectory inequality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck<T> {
    pub holds: bool,
    /// Smallest slack over the grid, in log scale.
    pub margin: T,
    /// Grid index attaining the smallest slack.
    pub worst_index: usize,
}

fn summarize<T: Scalar>(margins: impl Iterator<Item = T>) -> BoundCheck<T> {
    let (worst_index, margin) = margins
        .enumerate()
        .fold((0, T::infinity()), |(bi, bm), (i, m)| if m < bm { (i, m) } else { (bi, bm) });
    BoundCheck { holds: margin >= -T::c(BOUND_TOL), margin, worst_index }
}

/// `|𝒥(A_t v)| ≥ |𝒥(v)|·exp Δ_0^t` along the whole trajectory.
pub fn verify_growth_bound<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    traj: &TrajectoryCocycle<T>,
    v: &[T],
    choice: DeltaChoice,
) -> Result<BoundCheck<T>> {
    let x0 = traj.state(0);
    let j0 = form.evaluate(x0, v)?;
    if !(j0 > T::zero()) {
        return Err(Error::Precondition("growth bound needs J(v) > 0".into()));
    }
    let ivs = orbit_intervals(form, vf, traj, 0, traj.len() - 1, &mut IntervalCache::new())?;
    let delta = cumulative(traj, 0, &ivs, choice);
    let margins = (0..traj.len()).map(|i| {
        let w = traj.fundamental(i).mul_vec(v);
        let ji = form.evaluate(traj.state(i), &w).unwrap_or_else(|_| T::nan()).abs();
        ji.ln() - j0.ln() - delta[i]
    });
    Ok(summarize(margins))
}

/// `|𝒥(A_t w)| / 𝒥(A_t v) ≤ (|𝒥(w)| / 𝒥(v))·exp(2Δ_0^t)` with `δ = r₊`.
pub fn verify_quotient_bound<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    traj: &TrajectoryCocycle<T>,
    w: &[T],
    v: &[T],
) -> Result<BoundCheck<T>> {
    let x0 = traj.state(0);
    let (jw, jv) = (form.evaluate(x0, w)?, form.evaluate(x0, v)?);
    if !(jv > T::zero()) || !(jw < T::zero()) {
        return Err(Error::Precondition("quotient bound needs J(v) > 0 and J(w) < 0".into()));
    }
    let ivs = orbit_intervals(form, vf, traj, 0, traj.len() - 1, &mut IntervalCache::new())?;
    let delta = cumulative(traj, 0, &ivs, DeltaChoice::Upper);
    let r0 = (-jw / jv).ln();
    let mut margins = Vec::with_capacity(traj.len());
    for i in 0..traj.len() {
        let a = traj.fundamental(i);
        let x = traj.state(i);
        let jwi = form.evaluate(x, &a.mul_vec(w))?;
        if jwi >= T::zero() {
            return Err(Error::NegativeVectorEscapedCone { time: traj.time(i).as_f64() });
        }
        let jvi = form.evaluate(x, &a.mul_vec(v))?;
        margins.push(r0 + T::two() * delta[i] - (-jwi / jvi).ln());
    }
    Ok(summarize(margins.into_iter()))
}

/// Result of pushing sampled positive-cone vectors through the cocycle.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeInvariance<T> {
    pub fraction: T,
    pub samples: usize,
    /// First violating vector and the first grid time its image left `C₊`.
    pub counterexample: Option<(Vec<T>, T)>,
}

/// Unit vector drawn uniformly from the sphere.
pub fn random_unit<T: Scalar, R: rand::Rng>(rng: &mut R, n: usize) -> Vec<T> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-12 {
            return v.iter().map(|x| T::c(x / r)).collect();
        }
    }
}

/// Unit vector drawn uniformly from the part of the sphere in the given cone at `x`.
pub fn random_cone_vector<T: Scalar, R: rand::Rng>(
    form: &QuadraticFormField<T>,
    x: &[T],
    class: ConeClass,
    rng: &mut R,
) -> Result<Vec<T>> {
    for _ in 0..100_000 {
        let v = random_unit(rng, form.dim());
        if form.cone_membership(x, &v, T::c(DEFAULT_CONE_TOL))? == class {
            return Ok(v);
        }
    }
    Err(Error::Precondition(format!("could not sample the {class:?} cone")))
}

/// Fraction of sampled unit vectors of `C₊(x₀)` whose image stays positive up to the horizon.
pub fn cone_invariance_test<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    x0: &[T],
    horizon: T,
    n_samples: usize,
    seed: u64,
    dt: T,
) -> Result<ConeInvariance<T>> {
    if n_samples == 0 {
        return Err(Error::Precondition("n_samples must be at least 1".into()));
    }
    let traj = integrate_cocycle(vf, x0, horizon, dt)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = T::c(DEFAULT_CONE_TOL);
    let mut kept = 0usize;
    let mut counterexample = None;
    for _ in 0..n_samples {
        let v = random_cone_vector(form, x0, ConeClass::Positive, &mut rng)?;
        let positive_at = |i: usize| -> Result<bool> {
            let w = traj.fundamental(i).mul_vec(&v);
            Ok(form.cone_membership(traj.state(i), &w, tol)? == ConeClass::Positive)
        };
        let mut left_at = None;
        for i in 0..traj.len() {
            if !positive_at(i)? {
                left_at = Some(traj.time(i));
                break;
            }
        }
        match left_at {
            None => kept += 1,
            Some(t) if counterexample.is_none() => counterexample = Some((v, t)),
            Some(_) => {}
        }
    }
    Ok(ConeInvariance {
        fraction: T::from_usize_lossy(kept) / T::from_usize_lossy(n_samples),
        samples: n_samples,
        counterexample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, unit};

    fn diag(l: &[f64]) -> VectorFieldModel<f64> {
        VectorFieldModel::builtin("linear_diag", l).unwrap()
    }

    fn form(d: &[f64]) -> QuadraticFormField<f64> {
        QuadraticFormField::diagonal(d).unwrap()
    }

    const LAMBDA: [f64; 3] = [-3.0, -1.0, 2.0];

    #[test]
    fn flow_examples() {
        let lorenz: VectorFieldModel<f64> = VectorFieldModel::builtin("lorenz", &[]).unwrap();
        let p = integrate_flow(&lorenz, &[0.0; 3], 2.0, 1e-3).unwrap();
        assert!(p.states.iter().all(|s| s.iter().all(|v| *v == 0.0)));

        let p = integrate_flow(&diag(&[-1.0]), &[1.0], 1.0, 1e-3).unwrap();
        assert!((p.states.last().unwrap()[0] - (-1.0f64).exp()).abs() < 1e-8);

        let rot = VectorFieldModel::linear(Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()).unwrap();
        let p = integrate_flow(&rot, &[1.0, 0.0], 2.0 * std::f64::consts::PI, 1e-3).unwrap();
        let end = p.states.last().unwrap();
        assert!((end[0] - 1.0).abs() < 1e-6 && end[1].abs() < 1e-6);
    }

    #[test]
    fn cocycle_matches_exponential() {
        let a = Matrix::from_rows(&[vec![-1.0, 2.0, 0.5], vec![0.3, -0.2, 1.0], vec![0.0, -1.0, 0.4]]).unwrap();
        let vf = VectorFieldModel::linear(a.clone()).unwrap();
        let traj = integrate_cocycle(&vf, &[0.1, 0.2, 0.3], 5.0, 1e-3).unwrap();
        for i in [0, 1000, 2500, traj.len() - 1] {
            let oracle = expm(&a.scale(traj.time(i)));
            let err = (traj.fundamental(i) - &oracle).frobenius_norm() / oracle.frobenius_norm();
            assert!(err < 1e-6, "t={} err={err}", traj.time(i));
        }
        let zero = integrate_cocycle(&vf, &[0.1, 0.2, 0.3], 0.0, 1e-3).unwrap();
        assert_eq!(zero.len(), 1);
        assert_eq!(zero.fundamental(0), &Matrix::identity(3));
    }

    #[test]
    fn lorenz_origin_cocycle_is_linearization_exponential() {
        let lorenz: VectorFieldModel<f64> = VectorFieldModel::builtin("lorenz", &[]).unwrap();
        let traj = integrate_cocycle(&lorenz, &[0.0; 3], 1.0, 1e-3).unwrap();
        let oracle = expm(&lorenz.jacobian(&[0.0; 3]).unwrap());
        let err = (traj.final_fundamental() - &oracle).frobenius_norm() / oracle.frobenius_norm();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn cocycle_property_and_orientation() {
        let lorenz: VectorFieldModel<f64> = VectorFieldModel::builtin("lorenz", &[]).unwrap();
        let traj = integrate_cocycle(&lorenz, &[1.0, 1.0, 20.0], 1.0, 1e-3).unwrap();
        assert!(traj.cocycle_residual(&lorenz, 400).unwrap() < 1e-6);
        assert!(traj.fundamentals().iter().all(|y| crate::linalg::det(y) > 0.0));
    }

    #[test]
    fn time_reversal_returns_to_start() {
        let lorenz: VectorFieldModel<f64> = VectorFieldModel::builtin("lorenz", &[]).unwrap();
        let x0 = [1.0, 2.0, 20.0];
        let fwd = integrate_flow(&lorenz, &x0, 0.5, 1e-4).unwrap();
        let back = integrate_flow(&lorenz.reversed(), fwd.states.last().unwrap(), 0.5, 1e-4).unwrap();
        let end = back.states.last().unwrap();
        assert!(end.iter().zip(&x0).all(|(a, b)| (a - b).abs() < 1e-5), "{end:?}");
    }

    #[test]
    fn escape_and_overflow_are_reported() {
        let vf = diag(&[1.0]).with_region(Region::Box(vec![(-2.0, 2.0)])).unwrap();
        assert!(matches!(integrate_flow(&vf, &[1.0], 1.0, 1e-3), Err(Error::EscapedRegion { .. })));
        let blow = VectorFieldModel::parse_field(&["x1*x1".to_string()], &Default::default()).unwrap();
        assert!(matches!(integrate_flow(&blow, &[1.0], 2.0, 1e-2), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn refine_step_accepts_default_step_for_linear_flow() {
        let (dt, err) = refine_step(&diag(&[-1.0]), &[1.0], 1.0, 1e-3, 1e-6, 4).unwrap();
        assert_eq!(dt, 1e-3);
        assert!(err < 1e-6);
    }

    #[test]
    fn delta_area_examples() {
        let f = diag(&LAMBDA);
        let t = 2.0;
        let traj = integrate_cocycle(&f, &[0.3, -0.2, 0.1], t, 1e-2).unwrap();
        let d = delta_area(&form(&[-1.0, 1.0, 1.0]), &f, &traj, 0.0, t).unwrap();
        assert!((d.lower + 6.0 * t).abs() < 1e-6 && (d.upper + 2.0 * t).abs() < 1e-6);
        assert!((d.midpoint + 4.0 * t).abs() < 1e-6);
        let d = delta_area(&form(&[-1.0, -1.0, 1.0]), &f, &traj, 0.0, t).unwrap();
        assert!((d.lower + 2.0 * t).abs() < 1e-6 && (d.upper - 4.0 * t).abs() < 1e-6);
        let d = delta_area(&form(&[-1.0, -1.0, 1.0]), &f, &traj, 1.0, 1.0).unwrap();
        assert_eq!((d.lower, d.midpoint, d.upper), (0.0, 0.0, 0.0));
        let e = delta_area(&form(&[1.0, -1.0, 1.0]), &f, &traj, 0.0, t).unwrap_err();
        assert!(matches!(e, Error::SeparationFailedOnOrbit { index: 0, .. }));
    }

    #[test]
    fn delta_area_is_additive_on_nonlinear_orbit() {
        let exprs = ["-3*x1", "-x2+x1^2", "2*x3"].map(String::from);
        let vf: VectorFieldModel<f64> = VectorFieldModel::parse_field(&exprs, &Default::default()).unwrap();
        let j = form(&[-1.0, -1.0, 1.0]);
        let traj = integrate_cocycle(&vf, &[0.5, 0.1, 0.1], 0.2, 1e-2).unwrap();
        let whole = delta_area(&j, &vf, &traj, 0.0, 0.2).unwrap();
        let a = delta_area(&j, &vf, &traj, 0.0, 0.1).unwrap();
        let b = delta_area(&j, &vf, &traj, 0.1, 0.2).unwrap();
        assert!(whole.lower < whole.midpoint && whole.midpoint < whole.upper);
        assert!((a.midpoint + b.midpoint - whole.midpoint).abs() < 1e-9);
        assert!(whole.lower <= whole.midpoint && whole.midpoint <= whole.upper);
    }

    #[test]
    fn growth_bound_examples() {
        let f = diag(&LAMBDA);
        let j2 = form(&[-1.0, -1.0, 1.0]);
        let t = 3.0;
        let traj = integrate_cocycle(&f, &[0.0; 3], t, 1e-3).unwrap();
        let e3 = unit(3, 2);
        let up = verify_growth_bound(&j2, &f, &traj, &e3, DeltaChoice::Upper).unwrap();
        assert!(up.holds && up.margin.abs() < 1e-6, "{up:?}");
        let lo = verify_growth_bound(&j2, &f, &traj, &e3, DeltaChoice::Lower).unwrap();
        assert!(lo.holds && (lo.margin - 0.0).abs() < 1e-9);
        assert_eq!(lo.worst_index, 0);
        assert!(matches!(
            verify_growth_bound(&j2, &f, &traj, &unit(3, 0), DeltaChoice::Lower),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn quotient_bound_examples() {
        let f = diag(&LAMBDA);
        let j2 = form(&[-1.0, -1.0, 1.0]);
        let traj = integrate_cocycle(&f, &[0.0; 3], 2.0, 1e-3).unwrap();
        let q = verify_quotient_bound(&j2, &f, &traj, &unit(3, 0), &unit(3, 2)).unwrap();
        assert!(q.holds && q.worst_index == 0 && q.margin.abs() < 1e-12);
        let last = traj.len() - 1;
        let expected = 2.0 * 4.0 * 2.0 + 10.0 * 2.0;
        let end_margin = {
            let a = traj.fundamental(last);
            let jw = j2.evaluate(&[0.0; 3], &a.mul_vec(&unit(3, 0))).unwrap();
            let jv = j2.evaluate(&[0.0; 3], &a.mul_vec(&unit(3, 2))).unwrap();
            16.0 - (-jw / jv).ln()
        };
        assert!((end_margin - expected).abs() < 1e-6);

        let j3 = form(&[1.0, -1.0, 1.0]);
        let e = verify_quotient_bound(&j3, &f, &traj, &unit(3, 1), &unit(3, 2)).unwrap_err();
        assert!(matches!(e, Error::SeparationFailedOnOrbit { .. }));
    }

    #[test]
    fn cone_invariance_examples() {
        let f = diag(&LAMBDA);
        let x0 = [0.2, 0.1, -0.3];
        let r = cone_invariance_test(&form(&[-1.0, -1.0, 1.0]), &f, &x0, 5.0, 200, 7, 1e-2).unwrap();
        assert_eq!(r.fraction, 1.0);
        assert!(r.counterexample.is_none());
        let r = cone_invariance_test(&form(&[1.0, -1.0, 1.0]), &f, &x0, 5.0, 200, 7, 1e-2).unwrap();
        assert!(r.fraction < 1.0);
        let (v, t) = r.counterexample.unwrap();
        assert!(t > 0.0);
        let traj = integrate_cocycle(&f, &x0, t, 1e-2).unwrap();
        let image = traj.final_fundamental().mul_vec(&v);
        assert!(form(&[1.0, -1.0, 1.0]).evaluate(&x0, &image).unwrap() <= 1e-10);
        let r = cone_invariance_test(&form(&[1.0, -1.0, 1.0]), &f, &x0, 0.0, 50, 7, 1e-2).unwrap();
        assert_eq!(r.fraction, 1.0);
    }

    #[test]
    fn trajectory_csv_layout() {
        let traj = integrate_cocycle(&diag(&[-1.0, 2.0]), &[1.0, 1.0], 0.01, 1e-3).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x1,x2,Y11,Y12,Y21,Y22");
        assert_eq!(lines.count(), traj.len());
    }
}
