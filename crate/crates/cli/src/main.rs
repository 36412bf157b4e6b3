mod commands;
mod output;
mod params;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qlax_core::parallel::{configure_threads, Execution};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Parser, Debug)]
#[command(name = "qlax", version, about = "Exact Lax pair verification for the A5 q-Painlevé systems")]
pub struct Cli {
    /// Run every campaign on the calling thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    /// Report `elapsed_ms` as 0 so reports are byte-reproducible.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verification campaigns.
    #[command(subcommand)]
    Verify(Verify),
    /// Orbit and patch evolution.
    #[command(subcommand)]
    Evolve(Evolve),
    /// Comparisons between maps.
    #[command(subcommand)]
    Compare(Compare),
}

#[derive(Subcommand, Debug)]
pub enum Verify {
    /// Compatibility of the spectral and deformation problems.
    Theorem(TheoremArgs),
    /// Constant and leading matrices of A, det A, and the B factorization.
    Regularity(RegularityArgs),
    /// 3D consistency of the H3/D4 cubes and random Z^4 evolutions.
    Consistency(ConsistencyArgs),
    /// Lax pair of the Z^4 system.
    Lax4d(Lax4dArgs),
    /// Geometric reduction to the ω-lattice and the IV bridge.
    Reduction(ReductionArgs),
}

#[derive(Subcommand, Debug)]
pub enum Evolve {
    /// Orbit of one of the maps, as CSV.
    Painleve(PainleveArgs),
    /// Z^4 evolution of a box from axes data, with audit.
    Lattice(LatticeArgs),
}

#[derive(Subcommand, Debug)]
pub enum Compare {
    /// SIII twice against III in projective mode.
    Projective(ProjectiveArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Iv,
    Iii,
    Siii,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Symbolic,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Exact,
    Float,
}

#[derive(Args, Debug)]
pub struct TheoremArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub case: CaseArg,
    #[arg(long, value_enum, default_value = "symbolic")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Also solve the residual for the updates and compare with the map.
    #[arg(long)]
    pub converse: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RegularityArgs {
    /// Exact parameter values; symbolic when omitted.
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConsistencyArgs {
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Check the cubes with symbolic vertices and parameters instead.
    #[arg(long)]
    pub symbolic: bool,
    /// Random Z^4 evolutions audited in a 3×3×3×2 box.
    #[arg(long, default_value_t = 50)]
    pub instances: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Lax4dArgs {
    /// Base point `l1,l2,l3,l4`.
    #[arg(long, default_value = "0,0,0,0", allow_hyphen_values = true)]
    pub at: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReductionArgs {
    /// Random ω-patches lifted and checked.
    #[arg(long, default_value_t = 20)]
    pub patches: usize,
    /// Random instances for the IV bridge.
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PainleveArgs {
    #[arg(long, value_enum)]
    pub case: CaseArg,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "exact")]
    pub backend: Backend,
    #[arg(long)]
    pub params: PathBuf,
    /// Float backend: denominators at or below this modulus are singular.
    #[arg(long, default_value_t = 1e-14)]
    pub guard: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct LatticeArgs {
    /// Box extent `n1,n2,n3,n4`.
    #[arg(long = "box", default_value = "3,3,3,2")]
    pub extent: String,
    /// Lower corner `l1,l2,l3,l4`.
    #[arg(long, default_value = "0,0,0,0", allow_hyphen_values = true)]
    pub lo: String,
    /// Patch JSON with the axes data and parameter tables; random when omitted.
    #[arg(long)]
    pub init: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// The evolved patch.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// The audit report; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ProjectiveArgs {
    /// Parameters with `p` set.
    #[arg(long)]
    pub params: PathBuf,
    /// III steps; the SIII orbit runs twice as long.
    #[arg(long, default_value_t = 5)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// How a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Verified,
    Failed,
    Singular,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Verified => 0,
            Outcome::Failed => 1,
            Outcome::Singular => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = std::env::var("QLAX_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        configure_threads(n);
    }
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match commands::run(&cli.command, exec, !cli.no_timing) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code())
        }
    }
}
