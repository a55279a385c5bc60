//! `spectral-lattice`: compare Hermitian matrices in the spectral order,
//! compute spectral suprema/infima, run the limit formulas and the
//! verification suites.
//!
//! Exit codes: 0 success, 1 verification failures, 2 usage or input error,
//! 3 numerical backend failure, 4 non-convergence.

mod commands;
mod document;
mod error;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spectral_lattice::harness::generate::{InstanceKind, InstanceSpec};
use spectral_lattice::{LatticeMode, Tolerances};

use crate::commands::{Formula, LimitOptions};
use crate::document::MatrixSetDocument;
use crate::error::CliError;
use crate::report::Report;

#[derive(Parser)]
#[command(name = "spectral-lattice", version, about = "Spectral order and spectral lattice of Hermitian matrices")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Eigenvalues closer than this are merged [default: 1e-9]
    #[arg(long, global = true)]
    tol_cluster: Option<f64>,

    /// Relative slack for Loewner comparisons [default: 1e-9]
    #[arg(long, global = true)]
    tol_psd: Option<f64>,

    /// Cauchy stopping tolerance of the power iterations [default: 1e-9]
    #[arg(long, global = true)]
    tol_conv: Option<f64>,

    /// Largest doubling of the exponent schedule [default: 48]
    #[arg(long, global = true)]
    max_doublings: Option<u32>,

    #[arg(long, global = true, env = "SPECTRAL_LATTICE_SEED", default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report (for `lattice` and `gen`: the matrix document) here
    /// instead of stdout
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct InputArgs {
    /// Matrix set document
    #[arg(long)]
    input: PathBuf,

    /// Comma-separated matrix names; all matrices when omitted
    #[arg(long, value_delimiter = ',')]
    names: Vec<String>,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long, default_value = "generic")]
    kind: InstanceKind,

    #[arg(long, default_value_t = 3)]
    dim: usize,

    #[arg(long, default_value_t = 2)]
    count: usize,

    /// Minimum eigenvalue gap (identity shift for positive_definite)
    #[arg(long, default_value_t = 0.1)]
    spread: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two matrices in the Loewner and spectral orders
    Compare(InputArgs),

    /// Spectral supremum or infimum of a set
    Lattice {
        #[command(flatten)]
        input: InputArgs,

        #[arg(long, default_value = "sup")]
        mode: LatticeMode,
    },

    /// Run a limit formula and compare it with the lattice answer
    Limits {
        #[command(flatten)]
        input: InputArgs,

        #[arg(long, value_enum)]
        formula: Formula,

        /// Shift; defaults to the smallest eigenvalue (shifted) or
        /// max(0, 1 - smallest eigenvalue) (inverse)
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<f64>,

        /// Divide the power sum by the number of matrices
        #[arg(long)]
        normalize: bool,

        /// sup or inf, for `orthosum`
        #[arg(long, default_value = "sup")]
        mode: LatticeMode,
    },

    /// Run a verification suite
    Verify {
        /// order_laws, sup_inf_routes, sublattice_closure, vigier,
        /// monotone_characterization, orthogonal, affine_covariance or
        /// projection_lattice_laws
        suite: String,

        #[arg(long, default_value_t = 20)]
        cases: usize,

        #[command(flatten)]
        spec: SpecArgs,
    },

    /// Generate a seeded matrix set document
    Gen(SpecArgs),
}

impl GlobalArgs {
    fn tolerances(&self) -> Result<Tolerances, CliError> {
        let d = Tolerances::default();
        let t = Tolerances {
            cluster_tol: self.tol_cluster.unwrap_or(d.cluster_tol),
            psd_tol: self.tol_psd.unwrap_or(d.psd_tol),
            conv_tol: self.tol_conv.unwrap_or(d.conv_tol),
            max_power_doublings: self.max_doublings.unwrap_or(d.max_power_doublings),
        };
        t.validate()?;
        Ok(t)
    }

    fn render(&self, report: &Report) -> String {
        match self.format {
            Format::Json => report.json(),
            Format::Text => report.text(),
        }
    }
}

impl SpecArgs {
    fn spec(&self, seed: u64) -> InstanceSpec {
        InstanceSpec::new(self.dim, seed, self.kind, self.count, self.spread)
    }
}

fn write_to(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes `text` to `--output` if given, else to stdout.
fn emit(global: &GlobalArgs, text: &str) -> Result<(), CliError> {
    match &global.output {
        Some(path) => write_to(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let g = &cli.global;
    let tol = g.tolerances()?;
    let load = |input: &InputArgs| commands::load(&MatrixSetDocument::read(&input.input)?, &input.names, &tol);
    match &cli.command {
        Command::Compare(input) => {
            let report = commands::compare(&load(input)?, g.seed, &tol)?;
            emit(g, &g.render(&report))?;
        }
        Command::Lattice { input, mode } => {
            let (report, doc) = commands::lattice(&load(input)?, *mode, &tol)?;
            if let Some(path) = &g.output {
                write_to(path, &doc.to_json())?;
            }
            print!("{}", g.render(&report));
        }
        Command::Limits {
            input,
            formula,
            delta,
            normalize,
            mode,
        } => {
            let opts = LimitOptions {
                formula: *formula,
                delta: *delta,
                normalize: *normalize,
                mode: *mode,
            };
            let (report, converged) = commands::limits(&load(input)?, &opts, &tol)?;
            emit(g, &g.render(&report))?;
            if !converged {
                return Ok(ExitCode::from(4));
            }
        }
        Command::Verify { suite, cases, spec } => {
            let (report, passed) = commands::verify(suite, &spec.spec(g.seed), *cases, &tol)?;
            emit(g, &g.render(&report))?;
            if !passed {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Gen(spec) => {
            emit(g, &commands::gen(&spec.spec(g.seed))?.to_json())?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
