use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "cone-verify", version, about = "Cone-field certificates for dominated splittings of flows")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Separation certificate at a single point.
    CheckPoint(CommonArgs),
    /// Separation certificates over a sampled region.
    CheckRegion(CommonArgs),
    /// Bundle extraction, rates and a splitting classification.
    Classify(CommonArgs),
    /// Sampled bundles `F-`/`F+`, reusable through `--form adapted:<path>`.
    ExtractSplitting(CommonArgs),
    /// Monotonicity of the linear Poincaré flow.
    LpfCheck(CommonArgs),
    /// Builtin vector fields and their parameters.
    Catalog(CatalogArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Grid,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; command-line flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Builtin field name (see `catalog`).
    #[arg(long, conflicts_with = "expr")]
    pub field: Option<String>,
    /// Parameters: `a,b,c` (positional) or `name=value,...`.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Component expressions over `x1..xn`, separated by `;`.
    #[arg(long, allow_hyphen_values = true)]
    pub expr: Option<String>,
    /// Quadratic form: `diag:a,b,...`, `matrix:[...]` or `adapted:<splitting.json>`.
    #[arg(long)]
    pub form: Option<String>,
    /// Second form for the dual-form hyperbolicity test.
    #[arg(long)]
    pub form2: Option<String>,
    /// `box:lo1,hi1,...` or `ball:c1,...,cn,r`.
    #[arg(long, allow_hyphen_values = true)]
    pub region: Option<String>,
    /// Single point `x1,...,xn` (overrides region sampling).
    #[arg(long, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub strategy: Option<Strategy>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tolerance for `J(X(x)) >= -tol`.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Samples closer than this to a listed singularity are skipped.
    #[arg(long)]
    pub skip_radius: Option<f64>,
    /// Also check linear Poincaré flow monotonicity.
    #[arg(long)]
    pub lpf: bool,
    /// Also classify the splitting.
    #[arg(long)]
    pub classify: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CatalogArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
