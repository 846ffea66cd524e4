mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{FamilyKind, Format};

/// Convolution-recursion CLT solver and lace-expansion toolkit.
///
/// Exit codes: 0 success, 2 invalid configuration, 3 numerical
/// non-convergence, 4 statistical failure (some |z| > 5), 1 anything else.
#[derive(Debug, Parser)]
#[command(name = "lacelab", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// TOML file with run parameters; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker thread cap; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Validate the configuration, print it and write nothing.
    #[arg(long, global = true)]
    pub dry_run: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar sequence c_n, a_n and the constants mu, alpha, delta.
    Seq(SeqArgs),
    /// Frequency-space recursion, CLT error and bound profiles.
    VerifyClt(CltArgs),
    /// Lace enumeration and identities on random paths.
    Lace {
        #[command(subcommand)]
        action: LaceAction,
    },
    /// Monte Carlo for the weakly self-avoiding walk.
    Saw {
        #[command(subcommand)]
        action: SawAction,
    },
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long = "family", value_enum)]
    pub kind: Option<FamilyKind>,
    /// Power-law exponent.
    #[arg(long)]
    pub a: Option<f64>,
    /// SAW majorant prefactor.
    #[arg(long)]
    pub k: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SeqArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct CltArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Comma-separated n values for the ratio report.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
}

#[derive(Debug, Subcommand)]
pub enum LaceAction {
    /// List the laces with a given number of bonds on [0, n].
    Enumerate(LaceArgs),
    /// Check the K/J recursion identity on random paths.
    Check(LaceArgs),
    /// Compare brute-force and lace-resummed J on random paths.
    Oracle(LaceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LaceArgs {
    #[arg(long)]
    pub n_bonds: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub paths: Option<u64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long)]
    pub rho: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum SawAction {
    /// c_m for m = 1..=n.
    Cn(SawArgs),
    /// pi_m, its second moment and its radial transform.
    Pi(SawArgs),
    /// Endpoint density of x_n.
    Density(SawArgs),
    /// Monte Carlo kernels fed to the solver and compared with c_n.
    Crosscheck(SawArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SawArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_samples: Option<u64>,
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long)]
    pub k_max: Option<f64>,
    #[arg(long)]
    pub k_points: Option<usize>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub r_points: Option<usize>,
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long)]
    pub n_batches: Option<usize>,
    #[arg(long)]
    pub fit_m: Option<usize>,
    #[arg(long)]
    pub k_cut: Option<f64>,
}

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Convergence(String),
    Statistical(String),
    Other(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Config(_) => 2,
            Failure::Convergence(_) => 3,
            Failure::Statistical(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Convergence(m) => write!(f, "numerical failure: {m}"),
            Failure::Statistical(m) => write!(f, "statistical failure: {m}"),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<lacelab::Error> for Failure {
    fn from(e: lacelab::Error) -> Self {
        use lacelab::Error as E;
        match e {
            E::InvalidParameter(_) | E::Unsupported(_) | E::TooLarge(_) | E::Disconnected { .. } => {
                Failure::Config(e.to_string())
            }
            E::Unsolvable { .. } | E::NonConvergence { .. } | E::DegenerateDenominator(_) | E::InsufficientDecay(_) => {
                Failure::Convergence(e.to_string())
            }
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lacelab: {e}");
            ExitCode::from(e.code())
        }
    }
}
