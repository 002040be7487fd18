//! `simmap`: solve for seamless similarity maps, verify texture coordinates,
//! and inspect the homology basis of a mesh.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "simmap", version, about = "Seamless similarity maps with prescribed holonomy")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for a metric with the given signature and export a cut,
    /// parametrized mesh.
    Solve(SolveArgs),
    /// Check the texture coordinates of an OBJ against a signature.
    Verify(VerifyArgs),
    /// Print genus, excluded vertex and the homology loops of a mesh.
    Basis(BasisArgs),
    /// Write one of the built-in test meshes.
    Fixture(FixtureArgs),
}

#[derive(Debug, clap::Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// JSON signature; all vertices default to k = 4 when omitted.
    #[arg(long)]
    pub signature: Option<PathBuf>,
    #[arg(long, default_value = "out.obj")]
    pub out: PathBuf,
    #[arg(long, default_value = "report.json")]
    pub report: PathBuf,
    /// Defaults to `trace.csv` next to the report.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long)]
    pub flip_budget: Option<usize>,
    #[arg(long)]
    pub excluded_vertex: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    /// OBJ with texture coordinates, as written by `solve`.
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub signature: Option<PathBuf>,
    /// Where to write the report; printed to stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = simmap::layout::SEAMLESS_TOLERANCE)]
    pub tol: f64,
}

#[derive(Debug, clap::Args)]
pub struct BasisArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub excluded_vertex: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FixtureKind {
    Tetrahedron,
    Torus,
    Icosphere,
    Pillow,
    GenusTwo,
}

#[derive(Debug, clap::Args)]
pub struct FixtureArgs {
    #[arg(value_enum)]
    pub kind: FixtureKind,
    #[arg(long, default_value = "fixture.obj")]
    pub out: PathBuf,
    /// Grid size for the torus, subdivision level for the icosphere.
    #[arg(long, default_value_t = 8)]
    pub size: usize,
    /// Maximum random displacement of each vertex position.
    #[arg(long, default_value_t = 0.0)]
    pub jitter: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve(args) => commands::solve(&args),
        Command::Verify(args) => commands::verify(&args),
        Command::Basis(args) => commands::basis(&args),
        Command::Fixture(args) => commands::fixture(&args),
    };
    ExitCode::from(code)
}
