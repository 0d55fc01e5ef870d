//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "qsample",
    version,
    about = "Quantum Fourier sampling of Walsh spectra: exact classical spectra, \
             an example-oracle learner, and sample-complexity experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the exact Walsh spectrum of a function file (the O(2^n) classical baseline)
    Spectrum(SpectrumArgs),
    /// Run the sampling learner against one target function
    Learn(LearnArgs),
    /// Run the scaling experiment grid and write records + summary
    Scale(ScaleArgs),
    /// Generate a random DNF formula file
    GenDnf(GenDnfArgs),
    /// Run the cross-module verification suites
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Function file: DNF or truth-table JSON
    #[arg(long)]
    pub input: PathBuf,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit the JSON spectrum format instead of CSV
    #[arg(long)]
    pub json: bool,
    /// Qubit cap override (default 26, or QSAMPLE_QUBIT_CAP)
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct LearnArgs {
    /// Truth-table JSON target
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// DNF JSON target
    #[arg(long)]
    pub dnf: Option<PathBuf>,
    /// Parity target on the given mask bits, e.g. 000101
    #[arg(long)]
    pub parity: Option<String>,
    /// Generate a random DNF target with this arity
    #[arg(long)]
    pub gen_n: Option<usize>,
    /// Terms for --gen-n
    #[arg(long, default_value_t = 4)]
    pub gen_terms: usize,
    /// Literals per term for --gen-n
    #[arg(long, default_value_t = 2)]
    pub gen_literals: usize,
    /// Example rule: "sqrt" (ceil(sqrt(2^n)) draws), "full", or a draw count
    #[arg(long, default_value = "sqrt")]
    pub m: String,
    /// Fixed sample budget (default: sequential gap test)
    #[arg(long)]
    pub budget: Option<u64>,
    /// Confidence for the sequential gap test
    #[arg(long)]
    pub gap_delta: Option<f64>,
    /// Sample cap for the sequential gap test
    #[arg(long, default_value_t = 4_000_000)]
    pub max_samples: u64,
    /// Fresh examples for the classical coefficient estimate
    #[arg(long)]
    pub m_est: Option<usize>,
    /// Target precision parameter p; default m_est = ceil(16 p^2)
    #[arg(long, default_value_t = 10.0)]
    pub precision: f64,
    /// Ignore the all-zero index when selecting
    #[arg(long)]
    pub exclude_zero: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub cap: Option<usize>,
    /// Also write the result JSON to this path
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScaleArgs {
    /// Experiment config JSON (defaults apply for omitted fields)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Built-in config preset: "default" or "headline" (n=30 projection)
    #[arg(long)]
    pub preset: Option<String>,
    /// Output directory for records.csv and summary.json
    #[arg(long, default_value = "scale-out")]
    pub out: PathBuf,
    /// Worker threads (0 = one per CPU)
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Base seed override
    #[arg(long)]
    pub seed: Option<u64>,
    /// Include per-trial wall times in the CSV
    #[arg(long)]
    pub timings: bool,
    #[arg(long)]
    pub cap: Option<usize>,
}

#[derive(Args, Debug)]
pub struct GenDnfArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub terms: usize,
    #[arg(long, default_value_t = 2)]
    pub literals: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
