//! Run configuration: JSON config file merged with command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use cone_verify::fields::{BuiltinParams, FieldConfig, ModelConfig, ParamValue, RegionConfig};
use cone_verify::qforms::FormSpec;
use cone_verify::splitting::{build_adapted_form, SplittingEstimate};
use cone_verify::{Field64, Form64, Region64};
use serde::{Deserialize, Serialize};

use crate::args::{CommonArgs, Strategy};
use crate::error::{CliError, CliResult};

pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_HORIZON: f64 = 50.0;
pub const DEFAULT_DT: f64 = 1e-2;

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub field: Option<FieldConfig>,
    pub region: Option<RegionConfig>,
    pub form: Option<String>,
    pub form2: Option<String>,
    pub point: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub strategy: Option<Strategy>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub horizon: Option<f64>,
    pub dt: Option<f64>,
    pub skip_radius: Option<f64>,
    pub lpf: Option<bool>,
    pub classify: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Fully resolved settings; echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub field: FieldConfig,
    pub region: Option<RegionConfig>,
    pub form: Option<String>,
    pub form2: Option<String>,
    pub point: Option<Vec<f64>>,
    pub samples: usize,
    pub strategy: Strategy,
    pub seed: u64,
    pub tol: f64,
    pub horizon: f64,
    pub dt: f64,
    pub skip_radius: f64,
    pub lpf: bool,
    pub classify: bool,
}

fn parse_numbers(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| CliError::Usage(format!("bad number `{t}` in {what}"))))
        .collect()
}

fn parse_named(s: &str) -> CliResult<BTreeMap<String, f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|kv| {
            let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Usage(format!("expected name=value, got `{kv}`")))?;
            let v = v.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad value in `{kv}`")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn builtin_params(s: &str) -> CliResult<BuiltinParams> {
    if s.contains('=') {
        Ok(BuiltinParams::Named(parse_named(s)?.into_iter().map(|(k, v)| (k, ParamValue::Scalar(v))).collect()))
    } else {
        Ok(BuiltinParams::Positional(parse_numbers(s, "--params")?))
    }
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let field = match (&args.field, &args.expr) {
            (Some(name), _) => FieldConfig::Builtin {
                builtin: name.clone(),
                params: args.params.as_deref().map(builtin_params).transpose()?.unwrap_or_default(),
            },
            (None, Some(e)) => FieldConfig::Expr {
                expr: e.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
                params: args.params.as_deref().map(parse_named).transpose()?.unwrap_or_default(),
            },
            (None, None) => {
                let mut f = file.field.clone().ok_or_else(|| CliError::Usage("no field given (--field, --expr or config)".into()))?;
                if let Some(p) = &args.params {
                    match &mut f {
                        FieldConfig::Builtin { params, .. } => *params = builtin_params(p)?,
                        FieldConfig::Expr { params, .. } => *params = parse_named(p)?,
                    }
                }
                f
            }
        };
        let region = match &args.region {
            Some(r) => Some(
                Region64::parse(r)?
                    .to_config()
                    .ok_or_else(|| CliError::Usage("region must be bounded".into()))?,
            ),
            None => file.region.clone(),
        };
        let point = match &args.point {
            Some(p) => Some(parse_numbers(p, "--point")?),
            None => file.point.clone(),
        };
        let cfg = RunConfig {
            field,
            region,
            form: args.form.clone().or(file.form),
            form2: args.form2.clone().or(file.form2),
            point,
            samples: args.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
            strategy: args.strategy.or(file.strategy).unwrap_or(Strategy::Random),
            seed: args.seed.or(file.seed).unwrap_or(0),
            tol: args.tol.or(file.tol).unwrap_or(DEFAULT_TOL),
            horizon: args.horizon.or(file.horizon).unwrap_or(DEFAULT_HORIZON),
            dt: args.dt.or(file.dt).unwrap_or(DEFAULT_DT),
            skip_radius: args.skip_radius.or(file.skip_radius).unwrap_or(0.0),
            lpf: args.lpf || file.lpf.unwrap_or(false),
            classify: args.classify || file.classify.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        let positive = |v: f64, name: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Usage(format!("{name} must be positive")))
            }
        };
        positive(self.dt, "--dt")?;
        positive(self.horizon, "--horizon")?;
        if !(self.tol >= 0.0) {
            return Err(CliError::Usage("--tol must be non-negative".into()));
        }
        if !(self.skip_radius >= 0.0) {
            return Err(CliError::Usage("--skip-radius must be non-negative".into()));
        }
        Ok(())
    }

    pub fn model(&self) -> CliResult<Field64> {
        Ok(Field64::from_config(&ModelConfig { field: self.field.clone(), region: self.region.clone() })?)
    }

    pub fn primary_form(&self) -> CliResult<Form64> {
        let spec = self.form.as_deref().ok_or_else(|| CliError::Usage("no form given (--form)".into()))?;
        build_form(spec)
    }

    pub fn secondary_form(&self) -> CliResult<Option<Form64>> {
        self.form2.as_deref().map(build_form).transpose()
    }
}

/// Form from a specification string; `adapted:<path>` reads a splitting
/// written by `extract-splitting`.
pub fn build_form(spec: &str) -> CliResult<Form64> {
    match FormSpec::parse(spec)? {
        FormSpec::Adapted(None) => Err(CliError::Usage(
            "`adapted` needs a splitting file: run extract-splitting and pass --form adapted:<path>".into(),
        )),
        FormSpec::Adapted(Some(path)) => {
            let text = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
            let value: serde_json::Value = serde_json::from_str(&text)?;
            // Either a bare splitting or a full report carrying one.
            let splitting = match value.get("splitting") {
                Some(s) if !s.is_null() => s.clone(),
                _ => value,
            };
            let est: SplittingEstimate<f64> = serde_json::from_value(splitting)?;
            if est.samples.is_empty() {
                return Err(CliError::Usage(format!("{path} contains no bundle samples")));
            }
            Ok(build_adapted_form(&est.samples)?)
        }
        other => Ok(other.build_constant()?),
    }
}
