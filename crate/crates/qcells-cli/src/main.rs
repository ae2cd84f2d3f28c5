mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Cell systems on SU(3) fusion graphs: solve, verify, classify.
#[derive(Debug, Parser)]
#[command(name = "qcells", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Catalog listings.
    Graphs {
        #[command(subcommand)]
        action: GraphsAction,
    },
    /// Inspect one graph.
    Graph {
        #[command(subcommand)]
        action: GraphAction,
    },
    /// Solve the coherence equations of a graph.
    Solve(SolveArgs),
    /// Check a cell file against every Type I and Type II equation.
    Verify(VerifyArgs),
    /// Gauge invariants of a cell file.
    Invariants(CellsArgs),
    /// Rhombus matrices and Hecke relations from a cell file.
    Hecke(HeckeArgs),
    /// SU(3) fusion matrices at a level.
    Fusion(FusionArgs),
    /// Check that a graph's annular matrices form a nimrep.
    Nimrep(GraphArgs),
    /// Analytic certificate that Z9 admits no cell system.
    #[command(name = "certify-z9")]
    CertifyZ9(CertifyArgs),
}

#[derive(Debug, Subcommand)]
pub enum GraphsAction {
    /// Every catalog graph with its counts.
    List(OutputArgs),
}

#[derive(Debug, Subcommand)]
pub enum GraphAction {
    /// Vertices, dimensions, triangle and frame counts.
    Show(GraphArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the machine report here as JSON.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Catalog name (E5, E9, E21, Z9, A_k, A_inf_L) or a graph file.
    pub graph: String,
    /// Significant digits; 15 or fewer uses binary64, up to 31 double-double.
    #[arg(long)]
    pub precision: Option<u32>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Residual below which a system counts as solved.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Best residual above which the graph is reported infeasible.
    #[arg(long, default_value_t = 1e-4)]
    pub infeasible: f64,
}

#[derive(Debug, Args)]
pub struct CellsArgs {
    #[command(flatten)]
    pub graph: GraphArgs,
    /// Cell file, or a report written by `solve -o`.
    #[arg(long)]
    pub cells: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub cells: CellsArgs,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct HeckeArgs {
    #[command(flatten)]
    pub cells: CellsArgs,
    /// Longest path length for the relation checks.
    #[arg(long, default_value_t = 4)]
    pub pmax: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct FusionArgs {
    #[arg(long)]
    pub level: u32,
    /// Show one matrix, as `l,m`.
    #[arg(long, value_parser = parse_weight)]
    pub weight: Option<(u32, u32)>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub precision: Option<u32>,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn parse_weight(s: &str) -> Result<(u32, u32), String> {
    let (l, m) = s.split_once(',').ok_or_else(|| format!("expected `l,m`, got `{s}`"))?;
    let p = |x: &str| x.trim().parse::<u32>().map_err(|e| format!("`{x}`: {e}"));
    Ok((p(l)?, p(m)?))
}

/// Process exit status; a total function of the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok = 0,
    Fail = 1,
    Infeasible = 2,
    InputError = 3,
    Inconclusive = 4,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Outcome::InputError } else { Outcome::Ok };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let outcome = match commands::run(cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            Outcome::InputError
        }
    };
    ExitCode::from(outcome as u8)
}
