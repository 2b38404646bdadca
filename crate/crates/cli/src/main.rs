use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

mod commands;
mod scenario;

use scenario::Kind;

/// Graph assembly, tile assembly and processor-network simulation.
#[derive(Parser, Debug)]
#[command(name = "graphasm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Root seed; every run seed is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Event budget per simulated run.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub max_steps: usize,
    /// State budget for exhaustive searches.
    #[arg(long, global = true, default_value_t = 100_000)]
    pub max_states: usize,
    /// Depth bound for explorations.
    #[arg(long, global = true, default_value_t = 64)]
    pub depth: usize,
    #[arg(long, global = true, value_enum, default_value_t = Target::Z2)]
    pub target: Target,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Seeded runs per simulation.
    #[arg(long, global = true, default_value_t = 10)]
    pub runs: usize,
    /// Scenario kind, when the file extension does not say.
    #[arg(long, global = true, value_enum)]
    pub kind: Option<Kind>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Topo,
    Z2,
    Z3,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reachable sets, languages, terminal assemblies and result oracles.
    Explore { scenario: PathBuf },
    /// Local determinism of a GDS, grammar or tile set.
    CheckLd { scenario: PathBuf },
    /// Compile a processor system and check seeded runs against it.
    CompileSim { scenario: PathBuf },
    /// Search planar layouts for a blocked message.
    Blockage { scenario: PathBuf },
    /// Box growth from appending a synchronized MIS.
    SurfaceCost { scenario: PathBuf },
    /// ASCII and SVG pictures of a seeded run.
    Render { scenario: PathBuf },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("io: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("bound: {0}")]
    Bound(String),
    #[error("violation: {0}")]
    Violation(String),
    #[error("not in class C: {0}")]
    NotInClassC(String),
    #[error("ids: {0}")]
    Ids(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Bound(_) => 3,
            CliError::Violation(_) => 4,
            CliError::NotInClassC(_) => 5,
            CliError::Ids(_) => 6,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = &cli.opts;
    let result = match &cli.command {
        Command::Explore { scenario } => commands::explore(scenario, o),
        Command::CheckLd { scenario } => commands::check_ld(scenario, o),
        Command::CompileSim { scenario } => commands::compile_sim(scenario, o),
        Command::Blockage { scenario } => commands::blockage(scenario, o),
        Command::SurfaceCost { scenario } => commands::surface_cost(scenario, o),
        Command::Render { scenario } => commands::render(scenario, o),
    };
    match result {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
