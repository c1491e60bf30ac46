//! Dominated splittings: bundle extraction, rate estimates, J-polar
//! decomposition, classification, adapted forms and the dual-form test.

mod adapted;
mod bundles;
mod classify;
mod polar;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cocycle::IntervalCache;
use crate::error::{Error, Result};
use crate::fields::VectorFieldModel;
use crate::qforms::QuadraticFormField;
use crate::scalar::Scalar;
use crate::separation::{check_separation, SeparationCertificate, SeparationVerdict};

pub use adapted::{adapted_matrix, build_adapted_form, MIN_BUNDLE_ANGLE};
pub use bundles::{
    cone_image_contraction, domination_profile, estimate_domination, extract_bundles, random_positive_subspace,
    Bundles, DominationFit, ExtractionOptions, CONVERGED_GAP, STAGNATION_GAP,
};
pub use classify::{
    calibrate_sectional_time, check_sectional_expansion, classify_splitting, delta_trend, dual_form_hyperbolicity,
    flow_direction_check, free_trajectory, singularity_index_check, ClassificationEvidence, DualFormVerdict,
    SectionalCheck, SingularityInfo, CONTRACTION_TARGET, HYPERBOLICITY_TOL, SECTIONAL_THRESHOLD, SLOPE_TOL,
};
pub use polar::{
    j_polar_decompose, random_j_isometry, random_j_separated, sigma_d, sqrtm, standard_form, JPolarDecomposition,
    SEPARATION_PROBES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    DominatedOnly,
    PartiallyHyperbolicContracting,
    PartiallyHyperbolicExpanding,
    Hyperbolic,
    SectionalHyperbolic,
    None,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Bundle bases at one sample point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSample<T> {
    pub point: Vec<T>,
    pub f_minus: Vec<Vec<T>>,
    pub f_plus: Vec<Vec<T>>,
}

/// Sampled splitting with fitted rates and its classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplittingEstimate<T> {
    pub samples: Vec<BundleSample<T>>,
    /// `λ̂`; `None` unless every sample produced a fit.
    pub domination_rate: Option<T>,
    /// `K̂`.
    pub fit_constant: Option<T>,
    /// `None` when the classification is inconclusive.
    pub classification: Option<Classification>,
    pub flow_in_plus: bool,
    /// Midpoint `Δ` slopes, one per sample.
    pub delta_slopes: Vec<T>,
    pub sectional: Option<SectionalSummary<T>>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionalSummary<T> {
    pub holds: bool,
    pub worst_area: T,
    pub time: T,
    pub singularities_ok: bool,
}

impl<T: Scalar> SplittingEstimate<T> {
    /// Same estimate with `f64` entries.
    pub fn to_f64(&self) -> SplittingEstimate<f64> {
        let v = |x: &[T]| x.iter().map(|a| a.as_f64()).collect::<Vec<_>>();
        let vv = |b: &[Vec<T>]| b.iter().map(|x| v(x)).collect::<Vec<_>>();
        SplittingEstimate {
            samples: self
                .samples
                .iter()
                .map(|s| BundleSample { point: v(&s.point), f_minus: vv(&s.f_minus), f_plus: vv(&s.f_plus) })
                .collect(),
            domination_rate: self.domination_rate.map(Scalar::as_f64),
            fit_constant: self.fit_constant.map(Scalar::as_f64),
            classification: self.classification,
            flow_in_plus: self.flow_in_plus,
            delta_slopes: v(&self.delta_slopes),
            sectional: self.sectional.map(|s| SectionalSummary {
                holds: s.holds,
                worst_area: s.worst_area.as_f64(),
                time: s.time.as_f64(),
                singularities_ok: s.singularities_ok,
            }),
            notes: self.notes.clone(),
        }
    }
}

/// Settings of the per-sample splitting analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions<T> {
    /// Horizon of the `Δ` trend.
    pub horizon: T,
    pub dt: T,
    pub extraction: ExtractionOptions<T>,
    /// Fit window of the domination rate.
    pub fit_window: (T, T),
    pub n_planes: usize,
    pub seed: u64,
    /// Angle tolerance of the flow-direction check.
    pub flow_angle_tol: T,
}

impl<T: Scalar> Default for AnalysisOptions<T> {
    fn default() -> Self {
        AnalysisOptions {
            horizon: T::c(50.0),
            dt: T::c(1e-2),
            extraction: ExtractionOptions::default(),
            fit_window: (T::c(2.0), T::c(5.0)),
            n_planes: 20,
            seed: 0,
            flow_angle_tol: T::c(1e-3),
        }
    }
}

/// Everything computed at one sample point.
#[derive(Debug, Clone)]
pub struct SampleAnalysis<T> {
    pub certificate: SeparationCertificate<T>,
    pub delta_slope: Option<T>,
    pub bundles: Option<Bundles<T>>,
    pub domination: Option<DominationFit<T>>,
    pub sectional: Option<SectionalCheck<T>>,
    pub notes: Vec<String>,
}

/// Separation certificate, `Δ` trend, bundles, domination fit and sectional
/// check at `x`. Failures of the later stages are recorded as notes.
pub fn analyze_sample<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    x: &[T],
    opts: &AnalysisOptions<T>,
) -> Result<SampleAnalysis<T>> {
    let certificate = check_separation(form, vf, x, None)?;
    let mut out =
        SampleAnalysis { certificate, delta_slope: None, bundles: None, domination: None, sectional: None, notes: Vec::new() };
    if out.certificate.verdict != SeparationVerdict::Strict {
        out.notes.push("separation is not strict; splitting analysis skipped".into());
        return Ok(out);
    }
    let traj = match free_trajectory(vf, x, opts.horizon, opts.dt) {
        Ok(t) => t,
        Err(e) => {
            out.notes.push(format!("trajectory: {e}"));
            return Ok(out);
        }
    };
    match delta_trend(form, vf, &traj, &mut IntervalCache::new()) {
        Ok(s) => out.delta_slope = Some(s),
        Err(e) => out.notes.push(format!("delta trend: {e}")),
    }
    match extract_bundles(form, vf, x, &opts.extraction) {
        Ok(b) => out.bundles = Some(b),
        Err(e) => {
            out.notes.push(format!("bundle extraction: {e}"));
            return Ok(out);
        }
    }
    let b = out.bundles.as_ref().expect("bundles set above");
    match estimate_domination(&traj, &b.f_minus, &b.f_plus, opts.fit_window) {
        Ok(f) => out.domination = Some(f),
        Err(e) => out.notes.push(format!("domination fit: {e}")),
    }
    if b.f_plus.len() >= 2 {
        match calibrate_sectional_time(&traj, &b.f_minus)? {
            Some(t) => out.sectional = Some(check_sectional_expansion(&traj, &b.f_plus, opts.n_planes, t, opts.seed)?),
            None => out.notes.push("no block time contracts F- by 1/2 within the horizon".into()),
        }
    }
    Ok(out)
}

/// Ordered merge of per-sample analyses into a [`SplittingEstimate`].
pub fn summarize_splitting<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    analyses: &[SampleAnalysis<T>],
    opts: &AnalysisOptions<T>,
) -> Result<SplittingEstimate<T>> {
    let mut notes: Vec<String> = analyses
        .iter()
        .enumerate()
        .flat_map(|(i, a)| a.notes.iter().map(move |n| format!("sample {i}: {n}")))
        .collect();
    let samples: Vec<BundleSample<T>> = analyses
        .iter()
        .filter_map(|a| {
            a.bundles.as_ref().map(|b| BundleSample {
                point: b.point.clone(),
                f_minus: b.f_minus.clone(),
                f_plus: b.f_plus.clone(),
            })
        })
        .collect();
    let fits: Vec<DominationFit<T>> = analyses.iter().filter_map(|a| a.domination).collect();
    let (rate, constant) = match fits.iter().min_by(|a, b| a.rate.partial_cmp(&b.rate).expect("finite rate")) {
        Some(f) if fits.len() == analyses.len() => {
            (Some(f.rate), Some(fits.iter().fold(T::zero(), |m, f| m.max(f.constant))))
        }
        _ => (Option::None, Option::None),
    };
    let slopes: Vec<T> = analyses.iter().filter_map(|a| a.delta_slope).collect();
    let (sing_ok, _) = singularity_index_check(vf, form.index())?;
    let sectional = {
        let checks: Vec<SectionalCheck<T>> = analyses.iter().filter_map(|a| a.sectional).collect();
        (!checks.is_empty() && checks.len() == analyses.len()).then(|| {
            let worst = checks.iter().fold(checks[0], |w, c| if c.worst_area < w.worst_area { *c } else { w });
            SectionalSummary {
                holds: checks.iter().all(|c| c.holds),
                worst_area: worst.worst_area,
                time: worst.time,
                singularities_ok: sing_ok,
            }
        })
    };
    let certs: Vec<SeparationCertificate<T>> = analyses.iter().map(|a| a.certificate.clone()).collect();
    let complete = slopes.len() == analyses.len();
    let all_strict = certs.iter().all(|c| c.verdict == SeparationVerdict::Strict);
    let classification = if !all_strict {
        Some(Classification::None)
    } else if !complete {
        notes.push("missing delta trends; classification withheld".into());
        Option::None
    } else {
        let ev = ClassificationEvidence {
            certificates: &certs,
            delta_slopes: &slopes,
            domination_rate: rate,
            sectional: sectional.map(|s| s.holds),
            singularities_ok: sing_ok,
        };
        match classify_splitting(&ev) {
            Ok(c) => Some(c),
            Err(Error::Inconclusive(msg)) => {
                notes.push(msg);
                Option::None
            }
            Err(Error::Precondition(_)) => Some(Classification::None),
            Err(e) => return Err(e),
        }
    };
    let flow_in_plus = !samples.is_empty() && flow_direction_check(vf, &samples, opts.flow_angle_tol)?;
    Ok(SplittingEstimate {
        samples,
        domination_rate: rate,
        fit_constant: constant,
        classification,
        flow_in_plus,
        delta_slopes: slopes,
        sectional,
        notes,
    })
}

/// Sequential [`analyze_sample`] over `points` followed by [`summarize_splitting`].
pub fn analyze_splitting<T: Scalar>(
    form: &QuadraticFormField<T>,
    vf: &VectorFieldModel<T>,
    points: &[Vec<T>],
    opts: &AnalysisOptions<T>,
) -> Result<SplittingEstimate<T>> {
    let analyses = points.iter().map(|x| analyze_sample(form, vf, x, opts)).collect::<Result<Vec<_>>>()?;
    summarize_splitting(form, vf, &analyses, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(lambda: &[f64], j: &[f64]) -> SplittingEstimate<f64> {
        let f = VectorFieldModel::builtin("linear_diag", lambda).unwrap();
        let j = QuadraticFormField::diagonal(j).unwrap();
        let pts = vec![vec![0.1, 0.2, 0.3], vec![-0.5, 0.4, 0.0]];
        analyze_splitting(&j, &f, &pts, &AnalysisOptions::default()).unwrap()
    }

    #[test]
    fn pipeline_on_lorenz_like_fixtures() {
        let l = [-3.0, -1.0, 2.0];
        let e = run(&l, &[-1.0, -1.0, 1.0]);
        assert_eq!(e.classification, Some(Classification::Hyperbolic));
        assert!((e.domination_rate.unwrap() - 3.0).abs() < 1e-6, "{:?}", e.domination_rate);
        assert_eq!(e.samples.len(), 2);
        let e = run(&l, &[-1.0, 1.0, 1.0]);
        assert_eq!(e.classification, Some(Classification::PartiallyHyperbolicContracting));
        assert!(!e.sectional.unwrap().holds);
        let e = run(&l, &[1.0, -1.0, 1.0]);
        assert_eq!(e.classification, Some(Classification::None));
        assert!(e.samples.is_empty());
    }

    #[test]
    fn estimate_round_trips_through_serde() {
        let e = run(&[-3.0, -1.0, 2.0], &[-1.0, 1.0, 1.0]).to_f64();
        let back: SplittingEstimate<f64> = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        assert_eq!(back, e);
    }
}
