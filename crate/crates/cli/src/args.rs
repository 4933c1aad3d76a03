use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mdep", version, about = "Dependence measures: mutual dependence, Pearson, distance correlation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a sample from a generating model and write it as CSV.
    Gen(GenArgs),
    /// Estimate dependence measures on a CSV sample or a freshly drawn one.
    Estimate(EstimateArgs),
    /// Theoretical value of a measure for a generating model.
    Theory(TheoryArgs),
    /// Monte-Carlo sweep over families, nonlinearities, rho and n.
    Sweep(SweepArgs),
    /// IMSE per (family, nonlinearity, measure, n) from a sweep CSV.
    Imse(ImseArgs),
    /// Runtime scaling of the estimators.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// normal, bandlimited or normal(mu=..;sigma=..)
    #[arg(long, default_value = "normal")]
    pub family: String,
    /// linear, quadratic, cubic or sine
    #[arg(long = "g", default_value = "linear")]
    pub nonlinearity: String,
    /// Spread in [0, 1)
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureChoice {
    Pearson,
    Dcorr,
    Mdep,
    All,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Two-column CSV sample (`#` lines are metadata)
    #[arg(long = "in", conflicts_with_all = ["n", "seed"])]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "all")]
    pub measure: MeasureChoice,
    /// Cut-off frequency of the band-limited fits
    #[arg(long, conflicts_with = "fc_rule")]
    pub fc: Option<f64>,
    /// `rho`: use 1/(1 - rho^2) with rho from the model or the file metadata
    #[arg(long)]
    pub fc_rule: Option<String>,
    /// Bin samples on the grid of spacing 1/(2 fc) before fitting
    #[arg(long)]
    pub quick: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoryMeasure {
    Mi,
    Pearson,
    Dcorr,
    Mdep,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum)]
    pub measure: TheoryMeasure,
    /// Sample size of each distance-correlation oracle repetition
    #[arg(long, default_value_t = 100_000)]
    pub oracle_n: usize,
    #[arg(long, default_value_t = 20)]
    pub oracle_reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub rel_tol: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// key=value file with the same keys as the long flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated families
    #[arg(long)]
    pub families: Option<String>,
    /// Comma-separated nonlinearities
    #[arg(long)]
    pub nonlinearities: Option<String>,
    /// Comma-separated rho values
    #[arg(long)]
    pub rho_grid: Option<String>,
    /// Comma-separated sample sizes
    #[arg(long)]
    pub n_grid: Option<String>,
    #[arg(long)]
    pub mc_runs: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `rho` or a fixed cut-off frequency
    #[arg(long)]
    pub fc_rule: Option<String>,
    /// Comma-separated measures (pearson, dcorr, mdep)
    #[arg(long)]
    pub measures: Option<String>,
    /// Fit on the raw samples instead of binning them
    #[arg(long)]
    pub unbinned: bool,
    #[arg(long)]
    pub oracle_n: Option<usize>,
    #[arg(long)]
    pub oracle_reps: Option<usize>,
    /// Fill the runtime_ns column (makes the output machine-dependent)
    #[arg(long)]
    pub record_runtime: bool,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON-lines summary sidecar
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ImseArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "2048,4096,8192,16384")]
    pub n_grid: String,
    #[arg(long, default_value_t = 5)]
    pub reps: usize,
    #[arg(long, default_value = "rho")]
    pub fc_rule: String,
    #[arg(long, default_value = "pearson,dcorr,mdep")]
    pub measures: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
