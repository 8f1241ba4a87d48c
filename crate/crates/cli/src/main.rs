//! `betawalk`: exact beta-moment identities and lattice walk return probabilities.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Parser)]
#[command(name = "betawalk", version, about = "Verify beta-moment identities and compute walk return probabilities")]
struct Cli {
    /// Output format for data records.
    #[arg(long, value_enum, global = true, default_value = "plain")]
    format: Format,

    /// Worker threads (defaults to the logical CPU count).
    #[arg(long, global = true, env = "BETAWALK_THREADS")]
    threads: Option<usize>,

    /// Include wall-clock timings in JSON payloads.
    #[arg(long, global = true)]
    timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an identity over a parameter range.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Exact values.
    #[command(subcommand)]
    Compute(ComputeCmd),
    /// Count returning paths by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Monte Carlo estimates of the return probability.
    #[command(subcommand)]
    Simulate(SimulateCmd),
    /// The registry of standalone identities.
    #[command(subcommand)]
    Catalog(CatalogCmd),
    /// Partial sums of the Pochhammer series for C(2n,n)^2/16^n.
    Series402(SeriesArgs),
}

#[derive(Subcommand)]
pub enum VerifyCmd {
    /// Both expansions of E[(c1 U1 + ... + ck Uk)^(2n)].
    Master(MasterArgs),
    /// The equal-coefficient form and its c^(2n) scaling.
    EqualCoeff(EqualCoeffArgs),
}

#[derive(Args)]
pub struct MasterArgs {
    /// Moment order, `n` or `a..b`.
    #[arg(long, default_value = "1")]
    pub n: String,
    /// Comma-separated coefficients, e.g. `1/3,1/3,1/3`.
    #[arg(long, conflicts_with = "k")]
    pub coeffs: Option<String>,
    /// Number of coefficients, `k` or `a..b`; each equals `--c` (default 1/k).
    #[arg(long)]
    pub k: Option<String>,
    /// Common coefficient used with `--k`.
    #[arg(long, requires = "k")]
    pub c: Option<String>,
    /// Shape parameter: a half-integer `a/b` in exact mode, any positive real in float mode.
    #[arg(long, default_value = "1/2")]
    pub p: String,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = betawalk_core::numeric::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

#[derive(Args)]
pub struct EqualCoeffArgs {
    #[arg(long, default_value = "1")]
    pub n: String,
    #[arg(long, default_value = "1")]
    pub k: String,
    #[arg(long, default_value = "1/2")]
    pub p: String,
}

#[derive(Subcommand)]
pub enum ComputeCmd {
    /// P(return to the origin after `--steps` steps) on Z^dim.
    ReturnProb(WalkArgs),
    /// E[U^(2n)] for U = 2X - 1, X ~ Beta(p, p).
    Moment(MomentArgs),
    /// Number of closed paths of length `--steps` on Z^dim.
    PathCount(WalkArgs),
}

#[derive(Args)]
pub struct WalkArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
    /// Walk length `n` or `a..b`.
    #[arg(long)]
    pub steps: String,
    /// Accept odd lengths (the answer is exactly 0).
    #[arg(long)]
    pub allow_odd: bool,
}

#[derive(Args)]
pub struct MomentArgs {
    #[arg(long, default_value = "1")]
    pub n: String,
    #[arg(long, default_value = "1/2")]
    pub p: String,
}

#[derive(Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
    #[arg(long)]
    pub steps: u32,
    /// Maximum number of paths to enumerate.
    #[arg(long, default_value_t = betawalk_core::walk::DEFAULT_PATH_BUDGET)]
    pub budget: u64,
}

#[derive(Subcommand)]
pub enum SimulateCmd {
    /// Simulate the walk itself.
    Walk(SimArgs),
    /// Sample arcsine variables and average ((V1 + ... + Vk)/k)^(2n).
    Beta(SimArgs),
}

#[derive(Args)]
pub struct SimArgs {
    #[arg(long, default_value_t = 1)]
    pub dim: u32,
    /// Half the walk length.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 1_000_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand)]
pub enum CatalogCmd {
    /// Show every entry.
    List,
    /// Verify an entry (or `all`) over its declared range.
    Verify {
        name: String,
    },
}

#[derive(Args)]
pub struct SeriesArgs {
    #[arg(long, default_value_t = 0)]
    pub n: u64,
    /// printed, overKFactorial, overKFactorialSquared, or all.
    #[arg(long, default_value = "all")]
    pub variant: String,
    #[arg(long, default_value_t = betawalk_core::series::DEFAULT_MAX_TERMS)]
    pub max_terms: u64,
    #[arg(long, default_value_t = betawalk_core::series::DEFAULT_CUTOFF)]
    pub cutoff: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match cli.threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    // a second initialization only happens in tests; ignoring it is harmless
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();

    let ctx = commands::Context { threads };
    let result = match cli.command {
        Command::Verify(VerifyCmd::Master(a)) => commands::verify_master(&ctx, &a),
        Command::Verify(VerifyCmd::EqualCoeff(a)) => commands::verify_equal_coeff(&ctx, &a),
        Command::Compute(ComputeCmd::ReturnProb(a)) => commands::return_prob(&ctx, &a),
        Command::Compute(ComputeCmd::PathCount(a)) => commands::path_count(&ctx, &a),
        Command::Compute(ComputeCmd::Moment(a)) => commands::moment(&ctx, &a),
        Command::Oracle(a) => commands::oracle(&ctx, &a),
        Command::Simulate(SimulateCmd::Walk(a)) => commands::simulate(&ctx, &a, false),
        Command::Simulate(SimulateCmd::Beta(a)) => commands::simulate(&ctx, &a, true),
        Command::Catalog(CatalogCmd::List) => commands::catalog_list(&ctx),
        Command::Catalog(CatalogCmd::Verify { name }) => commands::catalog_verify(&ctx, &name),
        Command::Series402(a) => commands::series(&ctx, &a),
    };
    match result {
        Ok((mut records, code)) => {
            if let Err(e) = output::emit(&mut records, cli.format, cli.timing) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(code)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
