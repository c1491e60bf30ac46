//! Report document, aggregate verdicts and emission.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cone_verify::separation::{CertificateDigest, MonotonicityCertificate, MonotonicityVerdict, SeparationVerdict};
use cone_verify::splitting::SplittingEstimate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::Format;
use crate::canonical::{format_float, to_canonical_string};
use crate::config::RunConfig;
use crate::error::CliResult;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AggregateVerdict {
    Strict,
    NonStrict,
    Inconclusive,
    Fail,
}

impl AggregateVerdict {
    pub fn exit_code(self) -> i32 {
        match self {
            AggregateVerdict::Strict => 0,
            AggregateVerdict::Fail => 2,
            AggregateVerdict::NonStrict | AggregateVerdict::Inconclusive => 3,
        }
    }
}

impl From<SeparationVerdict> for AggregateVerdict {
    fn from(v: SeparationVerdict) -> Self {
        match v {
            SeparationVerdict::Strict => AggregateVerdict::Strict,
            SeparationVerdict::NonStrict => AggregateVerdict::NonStrict,
            SeparationVerdict::Fail => AggregateVerdict::Fail,
        }
    }
}

impl From<MonotonicityVerdict> for AggregateVerdict {
    fn from(v: MonotonicityVerdict) -> Self {
        match v {
            MonotonicityVerdict::StrictlyMonotone => AggregateVerdict::Strict,
            MonotonicityVerdict::Monotone => AggregateVerdict::NonStrict,
            MonotonicityVerdict::Fail => AggregateVerdict::Fail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpfDigest {
    pub verdict: MonotonicityVerdict,
    pub alpha1: f64,
    pub restricted_spectrum: Vec<f64>,
}

impl From<&MonotonicityCertificate<f64>> for LpfDigest {
    fn from(c: &MonotonicityCertificate<f64>) -> Self {
        LpfDigest { verdict: c.verdict, alpha1: c.alpha1, restricted_spectrum: c.restricted_spectrum.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub index: usize,
    pub x: Vec<f64>,
    pub separation: Option<CertificateDigest>,
    /// `𝒥(X(x))`.
    pub flow_value: f64,
    pub lpf: Option<LpfDigest>,
    /// Worst verdict over the checks that ran; `None` when every check was skipped.
    pub verdict: Option<AggregateVerdict>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub index: usize,
    pub x: Vec<f64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualFormDigest {
    pub hyperbolic: bool,
    pub forward_flow_ok: bool,
    pub backward_flow_ok: bool,
    pub forward: Vec<CertificateDigest>,
    pub backward: Vec<CertificateDigest>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool_version: String,
    pub command: String,
    pub config: RunConfig,
    pub seed: u64,
    pub samples: Vec<SampleRecord>,
    pub verdict: AggregateVerdict,
    pub counterexample: Option<Counterexample>,
    pub splitting: Option<SplittingEstimate<f64>>,
    pub dual_form: Option<DualFormDigest>,
    pub notes: Vec<String>,
    /// Excluded from the determinism hash.
    pub timing: Timing,
    /// SHA-256 of the canonical JSON without `timing` and this field.
    pub determinism_hash: String,
}

/// Worst verdict of the checked samples; `Inconclusive` when there are none.
pub fn aggregate(samples: &[SampleRecord]) -> AggregateVerdict {
    samples.iter().filter_map(|s| s.verdict).max().unwrap_or(AggregateVerdict::Inconclusive)
}

impl ReportDocument {
    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }

    pub fn compute_hash(&self) -> CliResult<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timing");
            obj.remove("determinism_hash");
        }
        let digest = Sha256::digest(to_canonical_string(&v)?.as_bytes());
        Ok(digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        }))
    }

    pub fn seal(mut self) -> CliResult<Self> {
        self.determinism_hash = self.compute_hash()?;
        Ok(self)
    }

    pub fn to_json(&self) -> CliResult<String> {
        Ok(to_canonical_string(self)?)
    }

    /// One row per sample: index, coordinates, certificate, flow value and LPF result.
    pub fn to_csv(&self) -> String {
        let n = self.samples.first().map_or(0, |s| s.x.len());
        let mut header = vec!["index".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend(
            ["r_minus", "r_plus", "delta", "margin", "separation", "flow_value", "lpf", "alpha1", "verdict"]
                .map(String::from),
        );
        let mut out = header.join(",");
        out.push('\n');
        let num = |v: f64| if v.is_nan() { String::new() } else { format_float(v) };
        for s in &self.samples {
            let mut row = vec![s.index.to_string()];
            row.extend(s.x.iter().map(|&v| num(v)));
            match &s.separation {
                Some(d) => row.extend([
                    num(d.r_minus),
                    num(d.r_plus),
                    num(d.delta),
                    num(d.margin),
                    format!("{:?}", d.verdict),
                ]),
                None => row.extend(std::iter::repeat(String::new()).take(5)),
            }
            row.push(num(s.flow_value));
            match &s.lpf {
                Some(l) => row.extend([format!("{:?}", l.verdict), num(l.alpha1)]),
                None => row.extend([String::new(), String::new()]),
            }
            row.push(s.verdict.map_or(String::new(), |v| format!("{v:?}")));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => Ok(self.to_csv()),
        }
    }
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::Strategy;
    use cone_verify::fields::{BuiltinParams, FieldConfig};

    fn config() -> RunConfig {
        RunConfig {
            field: FieldConfig::Builtin { builtin: "linear_diag".into(), params: BuiltinParams::Positional(vec![-3.0, -1.0, 2.0]) },
            region: None,
            form: Some("diag:-1,-1,1".into()),
            form2: None,
            point: None,
            samples: 2,
            strategy: Strategy::Random,
            seed: 0,
            tol: 1e-10,
            horizon: 50.0,
            dt: 1e-2,
            skip_radius: 0.0,
            lpf: false,
            classify: false,
        }
    }

    fn sample(index: usize, verdict: SeparationVerdict) -> SampleRecord {
        let digest = CertificateDigest {
            x: vec![0.1 * index as f64, 0.2, 0.3],
            r_minus: -2.0,
            r_plus: 4.0,
            delta: 1.0,
            margin: 1.0 / 3.0,
            verdict,
        };
        SampleRecord {
            index,
            x: digest.x.clone(),
            separation: Some(digest),
            flow_value: 0.5,
            lpf: None,
            verdict: Some(verdict.into()),
            notes: vec![],
        }
    }

    fn report(samples: Vec<SampleRecord>) -> ReportDocument {
        ReportDocument {
            tool_version: TOOL_VERSION.into(),
            command: "check-region".into(),
            config: config(),
            seed: 0,
            verdict: aggregate(&samples),
            samples,
            counterexample: None,
            splitting: None,
            dual_form: None,
            notes: vec![],
            timing: Timing { elapsed_seconds: 0.25, threads: 1 },
            determinism_hash: String::new(),
        }
        .seal()
        .unwrap()
    }

    #[test]
    fn aggregate_is_the_worst_sample() {
        use SeparationVerdict::*;
        assert_eq!(aggregate(&[]), AggregateVerdict::Inconclusive);
        assert_eq!(aggregate(&[sample(0, Strict), sample(1, Strict)]), AggregateVerdict::Strict);
        assert_eq!(aggregate(&[sample(0, Strict), sample(1, NonStrict)]), AggregateVerdict::NonStrict);
        assert_eq!(aggregate(&[sample(0, Fail), sample(1, NonStrict)]), AggregateVerdict::Fail);
        let mut skipped = sample(0, Strict);
        skipped.verdict = None;
        assert_eq!(aggregate(&[skipped.clone()]), AggregateVerdict::Inconclusive);
        assert_eq!(aggregate(&[skipped, sample(1, Strict)]), AggregateVerdict::Strict);
        assert_eq!(AggregateVerdict::Fail.exit_code(), 2);
        assert_eq!(AggregateVerdict::Inconclusive.exit_code(), 3);
    }

    #[test]
    fn json_round_trips() {
        let r = report(vec![sample(0, SeparationVerdict::Strict), sample(1, SeparationVerdict::Strict)]);
        let text = r.to_json().unwrap();
        let back: ReportDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), text);
    }

    #[test]
    fn empty_report_is_inconclusive_json() {
        let r = report(vec![]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["verdict"], "Inconclusive");
        assert_eq!(v["samples"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn csv_has_header_and_one_row_per_sample() {
        let r = report(vec![sample(0, SeparationVerdict::Strict), sample(1, SeparationVerdict::Fail)]);
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "index,x1,x2,x3,r_minus,r_plus,delta,margin,separation,flow_value,lpf,alpha1,verdict");
        assert!(lines[2].ends_with(",Fail"));
    }

    #[test]
    fn hash_ignores_timing_only() {
        let a = report(vec![sample(0, SeparationVerdict::Strict)]);
        let mut b = a.clone();
        b.timing.elapsed_seconds = 99.0;
        assert_eq!(b.compute_hash().unwrap(), a.determinism_hash);
        b.seed = 1;
        assert_ne!(b.compute_hash().unwrap(), a.determinism_hash);
        assert_eq!(a.determinism_hash.len(), 64);
    }
}
