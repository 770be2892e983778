use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use postedge::models::BuiltinModel;
use postedge::report::Grid;

#[derive(Debug, Parser)]
#[command(
    name = "postedge",
    version,
    about = "Edgeworth expansions of one-parameter posteriors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Posterior mean, sd and invariant cumulants kappa_3..kappa_5.
    Cumulants(CumulantsArgs),
    /// Approximate posterior density on a grid.
    Density(SeriesArgs),
    /// Approximate posterior distribution function on a grid.
    Cdf(SeriesArgs),
    /// Every approximation next to the exact posterior, with error norms.
    Compare(CompareArgs),
    /// Error decay over a sequence of sample sizes.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    BetaBinomial,
    NormalNormal,
    GammaExponential,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: Family,
    /// Beta prior first shape.
    #[arg(long)]
    pub a: Option<f64>,
    /// Beta prior second shape.
    #[arg(long)]
    pub b: Option<f64>,
    /// Number of observations.
    #[arg(long)]
    pub n: Option<u64>,
    /// Number of successes.
    #[arg(long)]
    pub x: Option<u64>,
    #[arg(long)]
    pub prior_mean: Option<f64>,
    /// Prior variance; `inf` gives a flat prior.
    #[arg(long)]
    pub prior_var: Option<f64>,
    #[arg(long)]
    pub noise_var: Option<f64>,
    #[arg(long)]
    pub data_mean: Option<f64>,
    /// Gamma prior shape.
    #[arg(long)]
    pub shape: Option<f64>,
    /// Gamma prior rate.
    #[arg(long)]
    pub rate: Option<f64>,
}

impl ModelArgs {
    /// The selected model; `n` falls back to `default_n` and missing
    /// required values are reported together.
    pub fn model(&self, default_n: Option<u64>) -> Result<BuiltinModel, Vec<String>> {
        let mut missing = Vec::new();
        let mut req = |name: &str, v: Option<f64>| {
            v.unwrap_or_else(|| {
                missing.push(format!("--{name} is required for this model"));
                f64::NAN
            })
        };
        let n = self.n.or(default_n);
        let m = match self.model {
            Family::BetaBinomial => {
                let a = req("a", self.a);
                let b = req("b", self.b);
                let x = match (self.x, default_n) {
                    (Some(x), _) => x,
                    (None, Some(_)) => 0,
                    (None, None) => {
                        missing.push("--x is required for this model".into());
                        0
                    }
                };
                BuiltinModel::BetaBinomial {
                    a,
                    b,
                    n: n.unwrap_or(0),
                    x,
                }
            }
            Family::NormalNormal => BuiltinModel::NormalNormal {
                prior_mean: req("prior-mean", self.prior_mean),
                prior_var: req("prior-var", self.prior_var),
                noise_var: req("noise-var", self.noise_var),
                n: n.unwrap_or(0),
                data_mean: req("data-mean", self.data_mean),
            },
            Family::GammaExponential => BuiltinModel::GammaExponential {
                shape: req("shape", self.shape),
                rate: req("rate", self.rate),
                n: n.unwrap_or(0),
                data_mean: req("data-mean", self.data_mean),
            },
        };
        if n.is_none() {
            missing.push("--n is required".into());
        }
        if missing.is_empty() {
            Ok(m)
        } else {
            Err(missing)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Source {
    Exact,
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Oracle {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CenteringArg {
    PosteriorMean,
    Mle,
    Recentered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Density,
    Cdf,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write data here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long, value_enum, default_value = "closed-form")]
    pub oracle: Oracle,
    /// Relative tolerance of the quadrature oracle.
    #[arg(long, default_value_t = 1e-10)]
    pub quad_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Evaluation grid `lo:hi:points`, in posterior standard deviations
    /// around the posterior mean unless `--theta-grid` is given.
    #[arg(long, default_value = "-3:3:241", allow_hyphen_values = true)]
    pub grid: Grid,
    /// Read the grid in parameter units.
    #[arg(long)]
    pub theta_grid: bool,
    /// Report standardized values and densities.
    #[arg(long)]
    pub standardized: bool,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct CumulantsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "exact")]
    pub cumulants: Source,
    /// Comma-separated sample sizes; one row each.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<u64>>,
    /// Success ratio used to scale `x` along a sweep.
    #[arg(long)]
    pub ratio: Option<f64>,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, value_enum, default_value = "posterior-mean")]
    pub centering: CenteringArg,
    #[arg(long, value_enum, default_value = "exact")]
    pub cumulants: Source,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct CompareArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, value_enum, default_value = "density")]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value = "exact")]
    pub cumulants: Source,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    /// Comma-separated, strictly increasing sample sizes.
    #[arg(long, value_delimiter = ',', conflicts_with = "sweep_file")]
    pub sweep: Option<Vec<u64>>,
    /// TOML file with `ns` and optionally `ratio`, `order` and `grid`.
    #[arg(long)]
    pub sweep_file: Option<PathBuf>,
    /// Success ratio used to scale `x` along the sweep.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Standardized grid for the error norms.
    #[arg(long, default_value = "-4:4:2001", allow_hyphen_values = true)]
    pub grid: Grid,
    #[command(flatten)]
    pub oracle: OracleArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}
