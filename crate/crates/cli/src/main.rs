//! `mpnodes`: node generation, cubature checks, Lebesgue constants and mesh
//! certification from the command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 usage error, 3 a mathematical
//! invariant failed.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "mpnodes", version, about = "Morrow-Patterson interpolation nodes on the square")]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Seed for randomised commands.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyArg {
    Mp,
    Padua,
    Emp,
    MeshA,
    MeshB,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpFamily {
    Mp,
    Emp,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridArg {
    Cl,
    Equi,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Direct,
    Fast,
    Auto,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariantArg {
    A,
    B,
    Mp2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a node set or admissible mesh.
    Nodes {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Degree: n for mp/emp, N for padua, nu for the meshes.
        #[arg(long)]
        n: i64,
    },
    /// Lebesgue function on a tensor grid: per-point CSV and a JSON report.
    Lebesgue(LebesgueArgs),
    /// Lebesgue constants over a range of degrees.
    Growth(GrowthArgs),
    /// Exactness of the cubature rule on the basis U_i(x) U_j(y), i + j <= 2n.
    CubatureCheck {
        #[arg(long)]
        n: i64,
        /// Check every even degree from 2 up to n.
        #[arg(long)]
        sweep: bool,
    },
    /// Certified sup-norm bounds for random polynomials against a fine grid.
    MeshCertify {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        mu: f64,
        #[arg(long, value_enum, default_value_t = VariantArg::A)]
        variant: VariantArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Points per side of the Chebyshev-Lobatto reference grid.
        #[arg(long, default_value_t = 201)]
        fine: usize,
    },
    /// Samples of the Lissajous curve through the Padua points of degree n + 2.
    Curve {
        #[arg(long)]
        n: i64,
        #[arg(long, default_value_t = 2001)]
        samples: usize,
    },
}

#[derive(Args, Debug, Clone)]
pub struct GridOpts {
    #[arg(long, value_enum, default_value_t = GridArg::Cl)]
    pub grid: GridArg,
    /// Points per side; max(101, 4n+1) when omitted.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = InterpFamily::Mp)]
    pub family: InterpFamily,
}

#[derive(Args, Debug, Clone)]
pub struct LebesgueArgs {
    #[arg(long)]
    pub n: i64,
    #[command(flatten)]
    pub grid: GridOpts,
    /// Report path; defaults to the CSV path with a `.report.json` extension.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GrowthArgs {
    #[arg(long, default_value_t = 2)]
    pub n_min: i64,
    #[arg(long, default_value_t = 30)]
    pub n_max: i64,
    #[arg(long, default_value_t = 2)]
    pub step: i64,
    #[command(flatten)]
    pub grid: GridOpts,
    /// Fill the `seconds` column with wall-clock timings instead of zeros.
    #[arg(long)]
    pub timings: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.common.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global()
        {
            eprintln!("error: cannot configure the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let c = &cli.common;
    let result = match cli.command {
        Command::Nodes { family, n } => commands::nodes(c, family, n),
        Command::Lebesgue(args) => commands::lebesgue(c, &args),
        Command::Growth(args) => commands::growth(c, &args),
        Command::CubatureCheck { n, sweep } => commands::cubature_check(c, n, sweep),
        Command::MeshCertify {
            n,
            mu,
            variant,
            trials,
            fine,
        } => commands::mesh_certify(c, n, mu, variant, trials, fine),
        Command::Curve { n, samples } => commands::curve(c, n, samples),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.code())
        }
    }
}
