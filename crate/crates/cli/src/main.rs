mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hbm::HbmError;
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "hbm", version, about = "Support functions, mixed volumes and the Hilbert-Brunn-Minkowski operator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Write JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Write CSV (17 significant digits).
    #[arg(long, global = true)]
    pub csv: bool,
    /// Seed for random corpora that do not name one.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (written once, by rename); standard output otherwise.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Leave out the run metadata (version, threads, timestamp, timing).
    #[arg(long, global = true)]
    pub no_meta: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Human,
}

impl Global {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            Format::Human
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of −L_K (full or even).
    Spectrum(commands::SpectrumArgs),
    /// Local p-BM check from the even gap, optionally with a concavity sweep.
    PbmCheck(commands::PbmArgs),
    /// Pairwise mixed-volume table.
    Mixed(commands::MixedArgs),
    /// Boundary Poincaré estimates and bounds.
    Boundary(commands::BoundaryArgs),
    /// Stability margins and deficits for a pair or a random corpus.
    Stability(commands::StabilityArgs),
    /// Second Steklov eigenvalue of the ball on degree-k harmonics.
    Steklov(commands::SteklovArgs),
    /// Reilly identity residual for a polynomial.
    Reilly(commands::ReillyArgs),
}

fn guard(e: &HbmError) -> &'static str {
    match e {
        HbmError::Input(_) | HbmError::Parse { .. } | HbmError::GridMismatch(_) | HbmError::Unsupported(_) => "input",
        HbmError::SingularNode { .. } => "singular_direction",
        HbmError::Invariant { .. } => "field_invariant",
        HbmError::Conditioning { .. } => "conditioning",
        HbmError::DegenerateHull(_) => "degenerate_hull",
        HbmError::NoConvergence { .. } => "eigensolver_convergence",
        HbmError::Numerical(_) => "numerical",
    }
}

fn configure_threads() -> Result<(), HbmError> {
    let Ok(v) = std::env::var("HBM_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| HbmError::Input(format!("HBM_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| HbmError::Input(format!("cannot size the thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), HbmError> {
    configure_threads()?;
    let start = std::time::Instant::now();
    let g = &cli.global;
    let out = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a)?,
        Command::PbmCheck(a) => commands::pbm_check(a)?,
        Command::Mixed(a) => commands::mixed(a)?,
        Command::Boundary(a) => commands::boundary(a)?,
        Command::Stability(a) => commands::stability(a, g)?,
        Command::Steklov(a) => commands::steklov(a)?,
        Command::Reilly(a) => commands::reilly(a)?,
    };
    let text = output::render(&out, g, start.elapsed());
    output::write_once(g.output.as_deref(), &text).map_err(|e| HbmError::Input(format!("cannot write output: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let g = guard(&e);
            eprintln!("hbm: error [{g}]: {e}");
            ExitCode::from(if e.is_input() { 2 } else { 3 })
        }
    }
}
