//! Command-line driver: argument model, input parsing and the five run modes.
//!
//! Every mode produces a JSON envelope and an exit code: 0 pass, 1 a residual
//! or identity failure, 2 bad input (including refused inputs), 3 inconclusive.

pub mod commands;
pub mod input;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{run, Outcome};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tsl", version, about = "Opposite series, rational accumulation and pole duality for tame power series")]
pub struct Cli {
    #[command(subcommand)]
    pub mode: Mode,
}

#[derive(Debug, Subcommand)]
pub enum Mode {
    /// Detect finite rational accumulation of the opposite-series space.
    Analyze(AnalyzeArgs),
    /// Compare the opposite denominator with the top boundary poles.
    Duality(DualityArgs),
    /// List the strata of positive initial tuples of period h with samples.
    Stratify(StratifyArgs),
    /// Residue-class sections of a rational function and the operator identities.
    Sections(SectionsArgs),
    /// Growth series of a free product against direct word counting.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    /// `√((1+t)/(1-t))`, meromorphic nowhere on its circle of convergence.
    Sqrt,
}

#[derive(Debug, Args)]
#[group(id = "input", required = true, multiple = false)]
pub struct InputArgs {
    /// Free product of cyclic groups, e.g. `2,3`.
    #[arg(long)]
    pub group: Option<String>,
    /// Rational function `n0,n1,...;d0,d1,...` with exact `p/q` coefficients.
    #[arg(long, allow_hyphen_values = true)]
    pub rational: Option<String>,
    /// CSV of coefficients with header `n,numerator,denominator`.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Oscillating model `set=<squares|explicit:..|mod:H:..>;a=<x+yi>;b=<x+yi>`.
    #[arg(long, allow_hyphen_values = true)]
    pub model: Option<String>,
    /// Series specification as JSON.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// A built-in test series.
    #[arg(long, value_enum)]
    pub fixture: Option<Fixture>,
}

#[derive(Debug, Args)]
pub struct NumericArgs {
    /// Number of coefficients examined.
    #[arg(long, default_value_t = 512)]
    pub horizon: usize,
    /// Working precision in bits.
    #[arg(long, env = "TSL_PRECISION_BITS", default_value_t = 256)]
    pub precision: usize,
    /// Convergence tolerance for class limits.
    #[arg(long, default_value_t = 1e-30)]
    pub tolerance: f64,
    /// Largest candidate period.
    #[arg(long, default_value_t = 24)]
    pub h_max: usize,
    /// Repeat the run at doubled precision and require agreement.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
    /// Write the ratio sequence as CSV `n,class,ratio_re,ratio_im`.
    #[arg(long)]
    pub emit_ratios: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DualityArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub numeric: NumericArgs,
    /// Residual threshold for a pass.
    #[arg(long, default_value_t = 1e-20)]
    pub threshold: f64,
    #[arg(long)]
    pub emit_ratios: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StratifyArgs {
    /// Period, between 1 and 8.
    #[arg(long)]
    pub h: usize,
    /// Radius `r` of the samples, so that `A = r^h`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub radius: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Attempts per label before giving up.
    #[arg(long, default_value_t = 64)]
    pub budget: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SectionsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Modulus of the residue classes.
    #[arg(long)]
    pub modulus: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Orders of the cyclic factors, e.g. `2,3`.
    #[arg(long)]
    pub group: String,
    /// Longest word length compared.
    #[arg(long, default_value_t = 12)]
    pub length: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Analyze(_) => "analyze",
            Mode::Duality(_) => "duality",
            Mode::Stratify(_) => "stratify",
            Mode::Sections(_) => "sections",
            Mode::Oracle(_) => "oracle",
        }
    }

    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            Mode::Analyze(a) => a.out.as_ref(),
            Mode::Duality(a) => a.out.as_ref(),
            Mode::Stratify(a) => a.out.as_ref(),
            Mode::Sections(a) => a.out.as_ref(),
            Mode::Oracle(a) => a.out.as_ref(),
        }
    }
}
