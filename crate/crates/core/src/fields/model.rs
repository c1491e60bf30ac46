use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::dual::Dual;
use super::expr::Expr;
use super::region::{Region, RegionConfig};
use crate::error::{Error, Result};
use crate::linalg::{check_dim, dot, norm, Matrix};
use crate::scalar::Scalar;

/// Names accepted by [`VectorFieldModel::builtin`].
pub const BUILTIN_NAMES: [&str; 4] = ["lorenz", "linear_diag", "linear_dense", "saddle_suspension_constant"];

#[derive(Debug, Clone, PartialEq)]
enum FieldKind<T> {
    Lorenz { sigma: T, rho: T, beta: T },
    Linear(Matrix<T>),
    Constant(Vec<T>),
    Parsed(Vec<Expr>),
}

/// Where a model came from; echoed into reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Builtin { name: String, params: Vec<f64> },
    Parsed { expressions: Vec<String>, params: BTreeMap<String, f64> },
}

/// Evaluators for `X(x)` and `DX(x)` plus singularities and a region.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldModel<T> {
    dim: usize,
    kind: FieldKind<T>,
    /// Multiplies both `X` and `DX`; `-1` gives the time-reversed field.
    scale: T,
    singularities: Vec<Vec<T>>,
    region: Region<T>,
    provenance: Provenance,
}

/// Builtin parameters: either positional or named.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BuiltinParams {
    Positional(Vec<f64>),
    Named(BTreeMap<String, ParamValue>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Scalar(f64),
    List(Vec<f64>),
}

impl Default for BuiltinParams {
    fn default() -> Self {
        BuiltinParams::Positional(Vec::new())
    }
}

/// `{"builtin": "...", "params": {...}}` or `{"expr": [...], "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldConfig {
    Builtin {
        builtin: String,
        #[serde(default)]
        params: BuiltinParams,
    },
    Expr {
        expr: Vec<String>,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

/// Field plus optional region, as read from a JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub field: FieldConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionConfig>,
}

impl BuiltinParams {
    /// Positional parameter list for the named builtin.
    pub fn positional(&self, name: &str) -> Result<Vec<f64>> {
        match self {
            BuiltinParams::Positional(v) => Ok(v.clone()),
            BuiltinParams::Named(map) => {
                let scalar = |k: &str| -> Result<Option<f64>> {
                    match map.get(k) {
                        None => Ok(None),
                        Some(ParamValue::Scalar(x)) => Ok(Some(*x)),
                        Some(ParamValue::List(_)) => Err(Error::InvalidParameters(format!("`{k}` must be a number"))),
                    }
                };
                let list = |k: &str| -> Result<Vec<f64>> {
                    match map.get(k) {
                        None => Ok(Vec::new()),
                        Some(ParamValue::List(v)) => Ok(v.clone()),
                        Some(ParamValue::Scalar(x)) => Ok(vec![*x]),
                    }
                };
                let allowed: &[&str] = match name {
                    "lorenz" => &["sigma", "rho", "beta"],
                    "linear_diag" => &["lambda"],
                    "linear_dense" => &["matrix"],
                    "saddle_suspension_constant" => &["vector"],
                    _ => &[],
                };
                if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
                    return Err(Error::InvalidParameters(format!("unknown parameter `{k}` for {name}")));
                }
                match name {
                    "lorenz" => Ok(vec![
                        scalar("sigma")?.unwrap_or(10.0),
                        scalar("rho")?.unwrap_or(28.0),
                        scalar("beta")?.unwrap_or(8.0 / 3.0),
                    ]),
                    "linear_diag" => list("lambda"),
                    "linear_dense" => list("matrix"),
                    "saddle_suspension_constant" => list("vector"),
                    _ => Err(Error::UnknownField(name.to_string())),
                }
            }
        }
    }
}

impl<T: Scalar> VectorFieldModel<T> {
    /// Catalogue fields: `lorenz(σ,ρ,β)`, `linear_diag(λ…)`, `linear_dense(a11…ann)`
    /// and `saddle_suspension_constant(v…)` (default `(0,1)`).
    pub fn builtin(name: &str, params: &[f64]) -> Result<Self> {
        let t = |x: f64| T::c(x);
        let provenance = Provenance::Builtin { name: name.to_string(), params: params.to_vec() };
        match name {
            "lorenz" => {
                let (s, r, b) = match params {
                    [] => (10.0, 28.0, 8.0 / 3.0),
                    [s, r, b] => (*s, *r, *b),
                    _ => return Err(Error::InvalidParameters(format!("lorenz takes 3 parameters, got {}", params.len()))),
                };
                let mut sing = vec![vec![T::zero(); 3]];
                if r > 1.0 && b > 0.0 {
                    let w = t(b * (r - 1.0)).sqrt();
                    sing.push(vec![w, w, t(r - 1.0)]);
                    sing.push(vec![-w, -w, t(r - 1.0)]);
                }
                let provenance = Provenance::Builtin { name: name.into(), params: vec![s, r, b] };
                Ok(Self::assemble(3, FieldKind::Lorenz { sigma: t(s), rho: t(r), beta: t(b) }, sing, provenance))
            }
            "linear_diag" => {
                if params.is_empty() {
                    return Err(Error::InvalidParameters("linear_diag needs at least one eigenvalue".into()));
                }
                let n = params.len();
                let m = Matrix::from_diag(&params.iter().map(|&x| t(x)).collect::<Vec<_>>());
                Ok(Self::assemble(n, FieldKind::Linear(m), vec![vec![T::zero(); n]], provenance))
            }
            "linear_dense" => {
                let n = (params.len() as f64).sqrt().round() as usize;
                if n == 0 || n * n != params.len() {
                    return Err(Error::InvalidParameters(format!("linear_dense needs n² entries, got {}", params.len())));
                }
                let m = Matrix::from_row_major(n, n, params.iter().map(|&x| t(x)).collect())?;
                let sing = if crate::linalg::Lu::new(&m).is_ok() { vec![vec![T::zero(); n]] } else { Vec::new() };
                Ok(Self::assemble(n, FieldKind::Linear(m), sing, provenance))
            }
            "saddle_suspension_constant" => {
                let v: Vec<f64> = if params.is_empty() { vec![0.0, 1.0] } else { params.to_vec() };
                if v.iter().all(|x| *x == 0.0) {
                    return Err(Error::InvalidParameters("constant field must be non-zero".into()));
                }
                let provenance = Provenance::Builtin { name: name.into(), params: v.clone() };
                Ok(Self::assemble(v.len(), FieldKind::Constant(v.iter().map(|&x| t(x)).collect()), Vec::new(), provenance))
            }
            _ => Err(Error::UnknownField(name.to_string())),
        }
    }

    /// Linear field `X(x) = A·x`.
    pub fn linear(a: Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
        }
        Self::builtin("linear_dense", &a.to_row_major_f64()).map(|mut m| {
            m.kind = FieldKind::Linear(a);
            m
        })
    }

    /// Field given by one expression per component over `x1…xn`.
    pub fn parse_field(expressions: &[String], params: &BTreeMap<String, f64>) -> Result<Self> {
        let n = expressions.len();
        if n == 0 {
            return Err(Error::InvalidSpec("at least one component expression is required".into()));
        }
        let exprs = expressions.iter().map(|s| Expr::parse(s, n, params)).collect::<Result<Vec<_>>>()?;
        let provenance = Provenance::Parsed { expressions: expressions.to_vec(), params: params.clone() };
        Ok(Self::assemble(n, FieldKind::Parsed(exprs), Vec::new(), provenance))
    }

    pub fn from_config(config: &ModelConfig) -> Result<Self> {
        let model = match &config.field {
            FieldConfig::Builtin { builtin, params } => Self::builtin(builtin, &params.positional(builtin)?)?,
            FieldConfig::Expr { expr, params } => Self::parse_field(expr, params)?,
        };
        match &config.region {
            Some(r) => model.with_region(Region::from_config(r)?),
            None => Ok(model),
        }
    }

    fn assemble(dim: usize, kind: FieldKind<T>, singularities: Vec<Vec<T>>, provenance: Provenance) -> Self {
        VectorFieldModel { dim, kind, scale: T::one(), singularities, region: Region::Unbounded, provenance }
    }

    pub fn with_region(mut self, region: Region<T>) -> Result<Self> {
        if let Some(d) = region.dim() {
            if d != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, found: d });
            }
        }
        self.region = region;
        Ok(self)
    }

    pub fn with_singularities(mut self, singularities: Vec<Vec<T>>) -> Self {
        self.singularities = singularities;
        self
    }

    /// The field `c·X`.
    pub fn scaled(&self, c: T) -> Self {
        let mut m = self.clone();
        m.scale = m.scale * c;
        m
    }

    /// The time-reversed field `-X`.
    pub fn reversed(&self) -> Self {
        self.scaled(-T::one())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn region(&self) -> &Region<T> {
        &self.region
    }

    pub fn singularities(&self) -> &[Vec<T>] {
        &self.singularities
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// `X(x)`.
    pub fn eval(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(x, self.dim)?;
        let out = match &self.kind {
            FieldKind::Lorenz { sigma, rho, beta } => vec![
                *sigma * (x[1] - x[0]),
                x[0] * (*rho - x[2]) - x[1],
                x[0] * x[1] - *beta * x[2],
            ],
            FieldKind::Linear(a) => a.mul_vec(x),
            FieldKind::Constant(v) => v.clone(),
            FieldKind::Parsed(exprs) => {
                let vars: Vec<Dual<T>> = x.iter().map(|&v| Dual::constant(v)).collect();
                exprs.iter().map(|e| e.eval(&vars).map(|d| d.re)).collect::<Result<Vec<T>>>()?
            }
        };
        Ok(out.into_iter().map(|v| v * self.scale).collect())
    }

    /// `DX(x)`; parsed fields are differentiated with forward-mode duals.
    pub fn jacobian(&self, x: &[T]) -> Result<Matrix<T>> {
        check_dim(x, self.dim)?;
        let n = self.dim;
        let m = match &self.kind {
            FieldKind::Lorenz { sigma, rho, beta } => Matrix::from_rows(&[
                vec![-*sigma, *sigma, T::zero()],
                vec![*rho - x[2], -T::one(), -x[0]],
                vec![x[1], x[0], -*beta],
            ])?,
            FieldKind::Linear(a) => a.clone(),
            FieldKind::Constant(_) => Matrix::zeros(n, n),
            FieldKind::Parsed(exprs) => {
                let mut jac = Matrix::zeros(n, n);
                let mut vars: Vec<Dual<T>> = x.iter().map(|&v| Dual::constant(v)).collect();
                for j in 0..n {
                    vars[j].eps = T::one();
                    for (i, e) in exprs.iter().enumerate() {
                        jac[(i, j)] = e.eval(&vars)?.eps;
                    }
                    vars[j].eps = T::zero();
                }
                jac
            }
        };
        if !m.is_finite() {
            return Err(Error::Domain("non-finite Jacobian".into()));
        }
        Ok(m.scale(self.scale))
    }

    /// True when `‖X(x)‖ < tol` (or the field cannot be evaluated).
    pub fn is_near_singular(&self, x: &[T], tol: T) -> bool {
        self.eval(x).map(|v| norm(&v) < tol).unwrap_or(true)
    }

    /// Fraction of boundary samples whose one-step image leaves the region.
    /// `None` for unbounded regions.
    pub fn check_trapping(&self, samples: usize, dt: T, seed: u64) -> Option<TrappingCheck> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut outward = 0;
        let mut evaluated = 0;
        for _ in 0..samples {
            let (x, normal) = self.region.sample_boundary(&mut rng)?;
            let Ok(v) = self.eval(&x) else { continue };
            evaluated += 1;
            let next: Vec<T> = x.iter().zip(&v).map(|(&a, &b)| a + dt * b).collect();
            if dot(&v, &normal) > T::zero() && !self.region.contains(&next) {
                outward += 1;
            }
        }
        Some(TrappingCheck { samples: evaluated, outward })
    }
}

/// Result of the empirical trapping-region check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrappingCheck {
    pub samples: usize,
    pub outward: usize,
}

impl TrappingCheck {
    pub fn looks_trapping(&self) -> bool {
        self.outward == 0
    }
}
