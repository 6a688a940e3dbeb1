//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "srrw", version, about = "Step-reinforced random walks on groups")]
pub struct Cli {
    /// Flat TOML file of defaults; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads. Falls back to the config file, then SRRW_THREADS, then all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Output file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo point masses or ball probabilities.
    Simulate(SimulateArgs),
    /// Exact law of S_n by enumeration.
    Exact(ExactArgs),
    /// Elephant polynomials.
    Poly {
        #[command(subcommand)]
        command: PolyCommand,
    },
    /// Evolving sets.
    Evoset {
        #[command(subcommand)]
        command: EvosetCommand,
    },
    /// Runs an acceptance suite and prints a JSON report.
    Verify(VerifyArgs),
}

#[derive(Debug, Default, Args)]
pub struct WalkArgs {
    /// e.g. z2, cycle:5, zd:2, tree:3, free:2, lamplighter, s3xz.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// uniform, lazy, lazy:q, or a JSON list of [element, weight].
    #[arg(long)]
    pub mu: Option<String>,
    /// identity, negation, iid_sign:q, erw_rotation[:d], echo:<json>.
    #[arg(long)]
    pub transform: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Horizons, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Element whose point mass is estimated. Defaults to the identity.
    #[arg(long, conflicts_with = "ball_r")]
    pub target: Option<String>,
    /// Estimate P(|S_n| < r) instead of a point mass.
    #[arg(long)]
    pub ball_r: Option<f64>,
    /// direct or forest.
    #[arg(long)]
    pub route: Option<String>,
}

#[derive(Debug, Default, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long)]
    pub n: Option<usize>,
    /// Largest horizon accepted.
    #[arg(long)]
    pub cap: Option<usize>,
    /// Exact rational arithmetic; adds a `rational` column.
    #[arg(long)]
    pub rational: bool,
    /// auto, tree or counts.
    #[arg(long)]
    pub enumeration: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum PolyCommand {
    /// Table of λ_{n,k} with the two-sided bound check.
    Lambda(PolyArgs),
    /// |R_n(x)| against its decay bound.
    Decay(PolyArgs),
    /// Law of the walk on Z_L from Fourier inversion.
    Cycle(PolyArgs),
}

#[derive(Debug, Default, Args)]
pub struct PolyArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Evaluation points, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Vec<f64>,
    /// Cycle length.
    #[arg(long)]
    pub l: Option<u32>,
    /// Horizon for `cycle`.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum EvosetCommand {
    /// |W_j| along one evolving-set run over a sampled forest.
    Trace(TraceArgs),
    /// Isoperimetric profiles Φ(r) and ψ(r).
    Profile(ProfileArgs),
}

#[derive(Debug, Default, Args)]
pub struct TraceArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Number of steps.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Starting element; defaults to the identity.
    #[arg(long)]
    pub start: Option<String>,
    /// Run the Doob-transformed chain.
    #[arg(long)]
    pub doob: bool,
}

#[derive(Debug, Default, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub rmax: Option<usize>,
    /// exhaustive or connected[:cap].
    #[arg(long)]
    pub scope: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Suite name, or `all`.
    pub suite: String,
    /// Base seed for the Monte Carlo parts.
    #[arg(long)]
    pub seed: Option<u64>,
}
