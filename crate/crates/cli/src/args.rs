use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "mismatch-sampler",
    version,
    about = "Output probabilities and scalability bounds for boson samplers with partially indistinguishable photons",
    args_override_self = true
)]
pub struct Cli {
    /// Worker threads (0 = all cores). Results do not depend on this value.
    #[arg(long, global = true, env = "MISMATCH_SAMPLER_THREADS")]
    pub threads: Option<usize>,

    /// JSON object of flag values for the subcommand; command-line flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Table of g_1..g_N for a source.
    Gk(GkArgs),
    /// Output probability for one input/output configuration.
    Prob(ProbArgs),
    /// Rescaled variance V and the Chebyshev success bounds.
    Variance(VarianceArgs),
    /// V^{1/3} against N for a family of Gaussian sources.
    Curve(CurveArgs),
    /// Largest mode mismatch compatible with given eps and delta.
    Budget(BudgetArgs),
    /// Monte Carlo check of the Gaussian-ensemble mean and variance.
    Verify(VerifyArgs),
    /// Haar-averaged bunching mass against the number of modes.
    Birthday(BirthdayArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Gaussian,
    Density,
    Gvector,
    Ideal,
    Classical,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Source selection. Without `--model` the model follows from the
/// parameters given, and defaults to ideal photons.
#[derive(Args, Debug, Clone, Serialize)]
pub struct SourceArgs {
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// Two-photon indistinguishability of the Gaussian model, in (0, 1].
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long)]
    pub g2: Option<f64>,
    /// Classicality parameter of the Gaussian model.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long)]
    pub eta: Option<f64>,
    /// Internal parameter gamma = 2 eta^2 / (1 + 2 eta^2), in [0, 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// One-particle density matrix as JSON {rows, cols, re, im}.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, value_name = "FILE")]
    pub rho_file: Option<PathBuf>,
    /// Explicit g_1..g_K, comma separated.
    #[serde(skip_serializing_if = "Option::is_none")]
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub g: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GkArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Number of photons.
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathChoice {
    /// Permanent paths for ideal or classical sources, otherwise general.
    Auto,
    General,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ProbArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Network matrix as JSON {rows, cols, re, im}.
    #[arg(long, value_name = "FILE", group = "network_choice")]
    pub network: Option<PathBuf>,
    /// Haar-random network with this many modes (see --seed).
    #[arg(long, value_name = "M", group = "network_choice")]
    pub haar: Option<usize>,
    /// Balanced two-mode beam splitter.
    #[arg(long, group = "network_choice")]
    pub beam_splitter: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Input modes, 1-based, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
    pub inputs: Vec<usize>,
    /// Output occupation numbers m_1..m_M.
    #[arg(long, value_delimiter = ',', num_args = 1.., conflicts_with = "outputs")]
    pub occupations: Option<Vec<u32>>,
    /// Distinct output modes, 1-based (instead of --occupations).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub outputs: Option<Vec<usize>>,
    #[arg(long, value_enum, default_value = "auto")]
    pub path: PathChoice,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VarianceArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, requires = "epsilon")]
    pub delta: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct CurveArgs {
    /// g2 values, one curve each.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = mismatch_core::variance::FIG2_G2)]
    pub g2_list: Vec<f64>,
    #[arg(long, default_value_t = mismatch_core::variance::FIG2_N_RANGE.0)]
    pub n_min: usize,
    #[arg(long, default_value_t = mismatch_core::variance::FIG2_N_RANGE.1)]
    pub n_max: usize,
    /// Also write the uncubed cubic approximation as column V_approx.
    #[arg(long)]
    pub approx: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BudgetArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub delta: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub n: usize,
    /// Number of modes setting the ensemble variance 1/M.
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also check the tail frequency of |P_0 - P_eta| < eps N!/M^N.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct BirthdayArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub n: usize,
    /// Mode counts; sorted in the output.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_values_t = [10usize, 20, 40])]
    pub m_list: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub haar_samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutputArgs,
}
