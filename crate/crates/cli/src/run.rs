//! Subcommand orchestration.

use std::time::Instant;

use cone_verify::linalg::norm;
use cone_verify::separation::{
    check_lpf_monotonicity, check_separation_with, CertificateDigest, SeparationVerdict, TildeMode, SINGULAR_SPEED,
};
use cone_verify::splitting::{
    analyze_sample, dual_form_hyperbolicity, extract_bundles, summarize_splitting, AnalysisOptions, BundleSample,
    ExtractionOptions, SplittingEstimate,
};
use cone_verify::{Error, Field64, Form64, Region64, SeparationCertificate64};
use rayon::prelude::*;

use crate::args::{Command, CommonArgs, Format};
use crate::catalog;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::{
    aggregate, AggregateVerdict, Counterexample, DualFormDigest, LpfDigest, ReportDocument, SampleRecord, Timing,
    TOOL_VERSION,
};
use crate::sampling::RegionSamplingPlan;

/// Finite-difference step for the derivative of space-dependent forms along `X`.
const FORM_DERIVATIVE_STEP: f64 = 1e-6;
/// Boundary samples of the empirical trapping check.
const TRAPPING_SAMPLES: usize = 200;

pub const THREADS_ENV: &str = "CONE_VERIFY_THREADS";

/// Rendered output of a run and its exit code.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub exit_code: i32,
    pub report: Option<ReportDocument>,
}

/// Worker count from `CONE_VERIFY_THREADS`, else the available cores.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    CheckPoint,
    CheckRegion,
    Classify,
    ExtractSplitting,
    LpfCheck,
}

impl Kind {
    fn name(self) -> &'static str {
        match self {
            Kind::CheckPoint => "check-point",
            Kind::CheckRegion => "check-region",
            Kind::Classify => "classify",
            Kind::ExtractSplitting => "extract-splitting",
            Kind::LpfCheck => "lpf-check",
        }
    }
}

pub fn execute(command: &Command) -> CliResult<Outcome> {
    let (kind, args) = match command {
        Command::CheckPoint(a) => (Kind::CheckPoint, a),
        Command::CheckRegion(a) => (Kind::CheckRegion, a),
        Command::Classify(a) => (Kind::Classify, a),
        Command::ExtractSplitting(a) => (Kind::ExtractSplitting, a),
        Command::LpfCheck(a) => (Kind::LpfCheck, a),
        Command::Catalog(a) => {
            let text = catalog::render(a.format.unwrap_or(Format::Json))?;
            return Ok(Outcome { text, exit_code: 0, report: None });
        }
    };
    let report = run_report(kind, args)?;
    let text = report.render(args.format.unwrap_or(Format::Json))?;
    Ok(Outcome { text, exit_code: report.exit_code(), report: Some(report) })
}

struct Context {
    cfg: RunConfig,
    vf: Field64,
    form: Form64,
}

impl Context {
    fn certify(&self, x: &[f64]) -> CliResult<SeparationCertificate64> {
        let mode = if self.form.is_constant() {
            TildeMode::ConstantForm
        } else {
            TildeMode::WithFlowDerivative { h: FORM_DERIVATIVE_STEP }
        };
        Ok(check_separation_with(&self.form, &self.vf, x, None, mode)?)
    }

    fn sample(&self, index: usize, x: &[f64], separation: bool, lpf: bool) -> CliResult<SampleRecord> {
        let v = self.vf.eval(x)?;
        let flow_value = self.form.evaluate(x, &v)?;
        let mut rec =
            SampleRecord { index, x: x.to_vec(), separation: None, flow_value, lpf: None, verdict: None, notes: Vec::new() };
        let worsen = |rec: &mut SampleRecord, v: AggregateVerdict| {
            rec.verdict = Some(rec.verdict.map_or(v, |w| w.max(v)));
        };
        if separation {
            let cert = self.certify(x)?;
            match cert.verdict {
                SeparationVerdict::Fail => rec.notes.push("no admissible delta: J~ - delta J is never positive semidefinite".into()),
                SeparationVerdict::NonStrict => rec.notes.push("separation holds only weakly".into()),
                SeparationVerdict::Strict => {}
            }
            worsen(&mut rec, cert.verdict.into());
            rec.separation = Some(CertificateDigest::from(&cert));
        }
        if lpf {
            if norm(&v) < SINGULAR_SPEED {
                rec.notes.push("singular point; LPF check skipped".into());
            } else if flow_value < -self.cfg.tol {
                rec.notes.push(format!("flow direction outside the positive cone: J(X(x)) = {flow_value:e}"));
                worsen(&mut rec, AggregateVerdict::Fail);
            } else {
                match check_lpf_monotonicity(&self.form, &self.vf, x) {
                    Ok(c) => {
                        if c.verdict != cone_verify::separation::MonotonicityVerdict::StrictlyMonotone {
                            rec.notes.push(format!("LPF monotonicity {:?} (alpha1 = {:e})", c.verdict, c.alpha1));
                        }
                        worsen(&mut rec, c.verdict.into());
                        rec.lpf = Some(LpfDigest::from(&c));
                    }
                    Err(e @ (Error::FlowDirectionNotPositive { .. } | Error::SingularPoint)) => {
                        rec.notes.push(format!("LPF check inconclusive: {e}"));
                        worsen(&mut rec, AggregateVerdict::NonStrict);
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Ok(rec)
    }
}

fn sample_points(cfg: &RunConfig, vf: &Field64, notes: &mut Vec<String>) -> CliResult<Vec<Vec<f64>>> {
    if let Some(p) = &cfg.point {
        if p.len() != vf.dim() {
            return Err(CliError::Usage(format!("--point has {} coordinates, the field has {}", p.len(), vf.dim())));
        }
        return Ok(vec![p.clone()]);
    }
    let region = match &cfg.region {
        Some(r) => Region64::from_config(r)?,
        None => return Err(CliError::Usage("no region given (--region or --point)".into())),
    };
    if let Some(t) = vf.check_trapping(TRAPPING_SAMPLES, cfg.dt, cfg.seed) {
        if !t.looks_trapping() {
            notes.push(format!(
                "region does not look trapping: {} of {} boundary samples flow outward",
                t.outward, t.samples
            ));
        }
    }
    let plan = RegionSamplingPlan {
        strategy: cfg.strategy,
        count: cfg.samples,
        seed: cfg.seed,
        skip_singularity_radius: cfg.skip_radius,
    };
    plan.samples(&region, vf.singularities())
}

fn analysis_options(cfg: &RunConfig) -> AnalysisOptions<f64> {
    AnalysisOptions {
        horizon: cfg.horizon,
        dt: cfg.dt,
        extraction: ExtractionOptions { dt: cfg.dt, ..ExtractionOptions::default() },
        seed: cfg.seed,
        ..AnalysisOptions::default()
    }
}

fn run_report(kind: Kind, args: &CommonArgs) -> CliResult<ReportDocument> {
    let start = Instant::now();
    let mut cfg = RunConfig::resolve(args)?;
    if kind == Kind::CheckPoint && cfg.point.is_none() {
        return Err(CliError::Usage("check-point needs --point".into()));
    }
    if kind == Kind::LpfCheck {
        cfg.lpf = true;
    }
    if kind == Kind::Classify {
        cfg.classify = true;
    }
    let vf = cfg.model()?;
    let form = cfg.primary_form()?;
    if form.dim() != vf.dim() {
        return Err(CliError::Usage(format!("form has dimension {}, the field {}", form.dim(), vf.dim())));
    }
    let mut notes = Vec::new();
    if !form.is_constant() {
        notes.push("space-dependent form: J~ includes the finite-difference derivative of J along X".into());
    }
    let points = sample_points(&cfg, &vf, &mut notes)?;
    let threads = thread_count();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let ctx = Context { cfg: cfg.clone(), vf, form };
    let separation = kind != Kind::LpfCheck;
    let mut samples: Vec<SampleRecord> = pool.install(|| {
        points
            .par_iter()
            .enumerate()
            .map(|(i, x)| ctx.sample(i, x, separation, ctx.cfg.lpf))
            .collect::<CliResult<Vec<_>>>()
    })?;

    let mut splitting = None;
    if cfg.classify {
        let opts = analysis_options(&cfg);
        let analyses = pool.install(|| {
            points.par_iter().map(|x| analyze_sample(&ctx.form, &ctx.vf, x, &opts)).collect::<Result<Vec<_>, _>>()
        })?;
        splitting = Some(summarize_splitting(&ctx.form, &ctx.vf, &analyses, &opts)?);
    } else if kind == Kind::ExtractSplitting {
        let opts = ExtractionOptions { dt: cfg.dt, ..ExtractionOptions::default() };
        let extracted: Vec<_> =
            pool.install(|| points.par_iter().map(|x| extract_bundles(&ctx.form, &ctx.vf, x, &opts)).collect());
        let mut bundle_samples = Vec::new();
        for (rec, b) in samples.iter_mut().zip(extracted) {
            match b {
                Ok(b) => bundle_samples.push(BundleSample { point: b.point, f_minus: b.f_minus, f_plus: b.f_plus }),
                Err(e) => {
                    rec.notes.push(format!("bundle extraction: {e}"));
                    rec.verdict = Some(rec.verdict.map_or(AggregateVerdict::NonStrict, |v| v.max(AggregateVerdict::NonStrict)));
                }
            }
        }
        splitting = Some(SplittingEstimate {
            samples: bundle_samples,
            domination_rate: None,
            fit_constant: None,
            classification: None,
            flow_in_plus: false,
            delta_slopes: Vec::new(),
            sectional: None,
            notes: Vec::new(),
        });
    }

    let dual_form = match cfg.secondary_form()? {
        Some(g) => Some(match dual_form_hyperbolicity(&ctx.form, &g, &ctx.vf, &points) {
            Ok(d) => DualFormDigest {
                hyperbolic: d.hyperbolic,
                forward_flow_ok: d.forward_flow_ok,
                backward_flow_ok: d.backward_flow_ok,
                forward: d.forward.iter().map(CertificateDigest::from).collect(),
                backward: d.backward.iter().map(CertificateDigest::from).collect(),
                error: None,
            },
            Err(e) => DualFormDigest {
                hyperbolic: false,
                forward_flow_ok: false,
                backward_flow_ok: false,
                forward: Vec::new(),
                backward: Vec::new(),
                error: Some(e.to_string()),
            },
        }),
        None => None,
    };

    let mut verdict = aggregate(&samples);
    if verdict == AggregateVerdict::Strict {
        if let Some(s) = &splitting {
            if cfg.classify && s.classification.is_none() {
                notes.push("classification inconclusive".into());
                verdict = AggregateVerdict::Inconclusive;
            }
        }
    }
    let counterexample = samples.iter().find(|s| s.verdict == Some(AggregateVerdict::Fail)).map(|s| Counterexample {
        index: s.index,
        x: s.x.clone(),
        reason: s.notes.first().cloned().unwrap_or_default(),
    });
    ReportDocument {
        tool_version: TOOL_VERSION.to_string(),
        command: kind.name().to_string(),
        seed: cfg.seed,
        config: cfg,
        samples,
        verdict,
        counterexample,
        splitting,
        dual_form,
        notes,
        timing: Timing { elapsed_seconds: start.elapsed().as_secs_f64(), threads },
        determinism_hash: String::new(),
    }
    .seal()
}
