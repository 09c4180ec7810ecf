use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Orthonormal-system experiments with CSV/JSON output and replayable manifests.
#[derive(Debug, Parser)]
#[command(name = "onskit", version, about)]
pub struct Cli {
    /// Directory for CSV, JSON and manifest files.
    #[arg(long, global = true, env = "ONSKIT_OUT_DIR", default_value = ".")]
    pub out: PathBuf,

    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// JSON file: a run manifest to replay, or flat parameters overriding the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Fourier coefficients C_1..C_N of a function.
    Coeffs(CoeffsArgs),
    /// M_n of a coefficient sequence.
    Mn(MnArgs),
    /// Summation-by-parts split of ∫ f P_n.
    Decomp(DecompArgs),
    /// Extremal function g_n, its sign partition and h-terms.
    Extremal(ExtremalArgs),
    /// Subsystem with small primitive tails.
    Subsystem(SubsystemArgs),
    #[command(subcommand)]
    Verify(VerifyCommand),
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Debug, Clone, Subcommand)]
pub enum VerifyCommand {
    /// M_n ≤ c‖a‖₂(Σk⁻²)^½ with measured primitive decay c.
    T7(T7Args),
    /// Levelwise Haar bound at n = 2^p.
    T8(T8Args),
    /// Parseval deficiency of the first N functions.
    Parseval(ParsevalArgs),
    /// C_n(g, Φ) = ½ C_n(f) for the doubled function and system.
    Doubling(DoublingArgs),
}

#[derive(Debug, Clone, Subcommand)]
pub enum ExperimentCommand {
    /// Tail oscillation of rearranged, randomly signed partial sums.
    Mr(MrArgs),
    /// Partial sums of Σ|C_n|^{2−ε}.
    Decay(DecayArgs),
    /// M_n over a list of n with running maximum.
    Mnscan(MnScanArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Adaptive,
    Fixed,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Dyadic,
    Uniform,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct QuadArgs {
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Scheme::Adaptive)]
    pub scheme: Scheme,
    /// Panels for the fixed scheme.
    #[arg(long, default_value_t = 256)]
    pub panels: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct CoeffsArgs {
    #[arg(long, default_value = "trig")]
    pub system: String,
    /// Function spec: const:c, linear, banach-seed, doubled:<f>, file:path.
    #[arg(long = "f")]
    #[serde(rename = "f")]
    pub function: String,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub count: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MnArgs {
    #[arg(long, default_value = "trig")]
    pub system: String,
    /// Sequence spec: unit:k, power:α, list:a,b,…, file:path, zero.
    #[arg(long)]
    pub seq: String,
    /// n values: 8, 2,4,8, 2..=64 or pow2:1..=10.
    #[arg(long)]
    pub n: String,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DecompArgs {
    #[arg(long, default_value = "trig")]
    pub system: String,
    #[arg(long = "f")]
    #[serde(rename = "f")]
    pub function: String,
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExtremalArgs {
    #[arg(long, default_value = "trig")]
    pub system: String,
    #[arg(long)]
    pub seq: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SubsystemArgs {
    #[arg(long, default_value = "haar")]
    pub system: String,
    /// Weights: sqrt, const:c or list:d1,d2,….
    #[arg(long, default_value = "sqrt")]
    pub weights: String,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub k_max: usize,
    #[arg(long, default_value_t = 14)]
    pub grid_log2: u32,
    #[arg(long, default_value_t = 16)]
    pub certify_log2: u32,
    #[arg(long, default_value_t = 1 << 16)]
    pub max_index: usize,
    /// Coefficients for the weighted M_n column.
    #[arg(long, default_value = "power:1")]
    pub seq: String,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct T7Args {
    #[arg(long, default_value = "trig")]
    pub system: String,
    #[arg(long, default_value = "power:0.75")]
    pub seq: String,
    #[arg(long, default_value = "pow2:1..=11")]
    pub n: String,
    /// Cells of the grid on which primitive sups are measured.
    #[arg(long, default_value_t = 1 << 14)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct T8Args {
    #[arg(long, default_value = "power:0.75")]
    pub seq: String,
    #[arg(long, default_value_t = 12)]
    pub p_max: u32,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ParsevalArgs {
    #[arg(long, default_value = "haar")]
    pub system: String,
    #[arg(long = "N", default_value_t = 1 << 12)]
    #[serde(rename = "N")]
    pub count: usize,
    #[arg(long, default_value_t = 1 << 14)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DoublingArgs {
    #[arg(long, default_value = "haar")]
    pub base: String,
    #[arg(long = "f", default_value = "banach-seed")]
    #[serde(rename = "f")]
    pub function: String,
    #[arg(long = "N", default_value_t = 64)]
    #[serde(rename = "N")]
    pub count: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MrArgs {
    #[arg(long, default_value = "haar")]
    pub system: String,
    #[arg(long, default_value = "power:1.2")]
    pub seq: String,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value = "64,1024")]
    pub n: String,
    /// Sequence length; defaults to twice the largest n.
    #[arg(long)]
    pub len: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1 << 10)]
    pub grid: usize,
    #[arg(long, value_enum, default_value_t = Model::Dyadic)]
    pub model: Model,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct DecayArgs {
    #[arg(long, default_value = "haar")]
    pub system: String,
    #[arg(long = "f")]
    #[serde(rename = "f")]
    pub function: String,
    /// Comma-separated ε values in (0,1).
    #[arg(long, default_value = "0.25,0.5,0.75")]
    pub eps: String,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub count: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub quad: QuadArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MnScanArgs {
    #[arg(long, default_value = "trig")]
    pub system: String,
    #[arg(long)]
    pub seq: String,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value = "pow2:1..=11")]
    pub n: String,
}
