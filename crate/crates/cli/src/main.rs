//! `qquasi` command-line front end.
//!
//! Every command prints one JSON document on stdout. Exit codes: 0 success,
//! 2 invalid command line, 3 unmet precondition (bad input file, unknown
//! function, wrong kind, ...), 4 mathematical failure (a test that does not
//! pass, a rejected representation, a pole).

mod commands;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::failure::Failure;

#[derive(Debug, Parser)]
#[command(name = "qquasi", version, about = "Quasiadditive and quasimultiplicative digit functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a catalog function at n.
    Eval {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        n: String,
    },
    /// Split n after each maximal run of at least r zeros.
    Split(SplitArgs),
    /// Check the defining identity on random and exhaustive triples.
    Verify {
        #[arg(long = "fn")]
        function: String,
        /// Parameter to test (default: the declared one).
        #[arg(long)]
        r: Option<u32>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Classify a linear representation read from a JSON file.
    ClassifyLinrep {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 16)]
        rmax: u32,
        /// Minimize before testing (the multiplicative test rejects
        /// non-minimal input otherwise).
        #[arg(long)]
        minimize: bool,
        /// Replace v by a fixpoint of M_0 if the input is not zero-insensitive.
        #[arg(long)]
        stabilize: bool,
    },
    /// Run the reset-sequence test on a transducer read from a JSON file.
    ClassifyTransducer {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value_t = 16)]
        rmax: u32,
    },
    /// Mean and variance constants of the limit law.
    Constants(ConstantsArgs),
    /// Sample, standardize and compare with the standard normal law.
    Experiment(ExperimentArgs),
    /// List the built-in functions.
    Catalog,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long)]
    n: String,
    /// Take base and parameter from this catalog function and also evaluate
    /// it part by part.
    #[arg(long = "fn")]
    function: Option<String>,
    #[arg(long, required_unless_present = "function")]
    q: Option<u32>,
    #[arg(long, required_unless_present = "function")]
    r: Option<u32>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    #[value(alias = "additive")]
    Add,
    #[value(alias = "multiplicative")]
    Mult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Truncated,
    Runlength,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, Args)]
struct SeedArg {
    /// Random seed; falls back to QQUASI_SEED, then 0.
    #[arg(long, env = "QQUASI_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ConstantsArgs {
    #[arg(long = "fn")]
    function: String,
    #[arg(long, value_enum, default_value = "exact")]
    method: MethodArg,
    /// Zero-run parameter of the block decomposition (default: declared).
    #[arg(long)]
    r: Option<u32>,
    /// Longest block length summed by the truncated method.
    #[arg(long, default_value_t = 24)]
    truncation: usize,
    /// Flag truncated results whose error bound exceeds this.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Largest run length summed by the run length closed forms.
    #[arg(long, default_value_t = 60)]
    cutoff: u32,
    /// Digits per Monte Carlo sample.
    #[arg(long, default_value_t = 1000)]
    k: u32,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long = "fn")]
    function: String,
    /// Sample uniformly from [0, q^k).
    #[arg(long, conflicts_with = "bound", required_unless_present = "bound")]
    k: Option<u32>,
    /// Sample uniformly from [0, K); accepts `1000`, `10^18` or `1e18`.
    #[arg(long)]
    bound: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[command(flatten)]
    seed: SeedArg,
    /// Write the histogram as CSV to this path.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Reference mean constant (default: computed).
    #[arg(long, requires = "sigma2")]
    mu: Option<f64>,
    /// Reference variance constant (default: computed).
    #[arg(long, requires = "mu")]
    sigma2: Option<f64>,
    /// Truncation used when the reference constants come from the series.
    #[arg(long, default_value_t = 24)]
    truncation: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure { output, error, code }) => {
            if let Some(out) = output {
                println!("{out}");
            }
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
