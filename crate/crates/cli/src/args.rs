//! Command-line grammar. Every option can also come from a `QCARTIER_*`
//! environment variable; flags win over the environment, which wins over the
//! built-in defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "qcartier", version, about = "Exact q-series lab for level-3 Frobenius congruences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the level-3 dictionary and its identity checks.
    Dict,
    /// Print A_n and the Eisenstein divisor sums.
    Sequence,
    /// Run one named check at one prime.
    Check {
        /// Check name, e.g. ClosureScalars.
        #[arg(long, env = "QCARTIER_ID")]
        id: String,
    },
    /// Run every applicable check over a set of primes.
    Suite,
    /// Time dictionary and defect construction per prime.
    Bench,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Exact,
    Residue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Human,
    Json,
    Tsv,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Primes for `suite` and `bench` (comma separated).
    #[arg(long, global = true, env = "QCARTIER_PRIMES", value_delimiter = ',')]
    pub primes: Option<Vec<u64>>,
    /// Prime for `check` and `dict`.
    #[arg(long, global = true, env = "QCARTIER_PRIME")]
    pub prime: Option<u64>,
    /// Layers l to examine (subset of 1,2,3).
    #[arg(long, global = true, env = "QCARTIER_ELL", value_delimiter = ',')]
    pub ell: Option<Vec<u32>>,
    #[arg(long, global = true, env = "QCARTIER_M_MAX")]
    pub m_max: Option<usize>,
    #[arg(long, global = true, env = "QCARTIER_R_MAX")]
    pub r_max: Option<u32>,
    /// q-precision replacing the default 5p^2 (at least p+1).
    #[arg(long, global = true, env = "QCARTIER_PRECISION")]
    pub precision: Option<usize>,
    #[arg(long, global = true, env = "QCARTIER_BACKEND", value_enum, default_value_t = BackendArg::Residue)]
    pub backend: BackendArg,
    /// Directory for the content-addressed artifact cache (memory only if unset).
    #[arg(long, global = true, env = "QCARTIER_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,
    #[arg(long, global = true, env = "QCARTIER_FORMAT", value_enum, default_value_t = FormatArg::Human)]
    pub format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, env = "QCARTIER_OUT")]
    pub out: Option<PathBuf>,
    /// Seed for the randomized inputs of `bench`.
    #[arg(long, global = true, env = "QCARTIER_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true, env = "QCARTIER_JOBS")]
    pub jobs: Option<usize>,
    /// Record wall-clock timings in reports.
    #[arg(long, global = true, env = "QCARTIER_TIMINGS")]
    pub timings: bool,
    /// Number of coefficients or sequence terms to print.
    #[arg(long, global = true, env = "QCARTIER_TERMS", default_value_t = 12)]
    pub terms: usize,
}
