//! `qdefect`: build HGP codes from alist files, apply punctures and wormholes,
//! run deformation scripts, check traceability and audit bundles.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

mod bundle;
mod commands;
mod lists;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qdefect::par::Execution;

#[derive(Parser, Debug)]
#[command(name = "qdefect", version, about = "Defects and deformations on hypergraph product codes")]
struct Cli {
    /// Read node lists as 1-indexed; checks may also be given as letters a, b, c, ...
    #[arg(long, global = true)]
    paper_indexing: bool,
    /// Run every scan on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the product code of a classical alist code.
    Build {
        #[arg(long)]
        alist: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Largest weight tried by the distance search.
        #[arg(long, default_value_t = qdefect::hgp::DEFAULT_DISTANCE_BUDGET)]
        distance_budget: usize,
    },
    /// Apply a smooth or rough puncture.
    Puncture {
        #[command(flatten)]
        target: DefectArgs,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// Apply a wormhole (paired smooth and rough punctures).
    Wormhole {
        #[command(flatten)]
        target: DefectArgs,
    },
    /// Run a puncture deformation script and track logical operators.
    Deform {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Pairs with a member lighter than this are labelled bad.
        #[arg(long)]
        threshold: Option<usize>,
    },
    /// Eulerian traceability of a logical operator's graph.
    Trace {
        #[arg(long)]
        code: PathBuf,
        /// Row of the embedded logical basis.
        #[arg(long, conflicts_with = "support", required_unless_present = "support")]
        logical: Option<usize>,
        /// Explicit qubit support.
        #[arg(long)]
        support: Option<String>,
        #[arg(long, value_enum, default_value_t = BasisArg::Z)]
        basis: BasisArg,
    },
    /// Audit a bundle: commutation, counts and generator weights.
    Verify {
        #[arg(long)]
        code: PathBuf,
    },
}

#[derive(Args, Debug)]
struct DefectArgs {
    #[arg(long)]
    code: PathBuf,
    /// Comma-separated variable nodes (S).
    #[arg(long, allow_hyphen_values = true)]
    vars: String,
    /// Comma-separated check nodes (T).
    #[arg(long, allow_hyphen_values = true)]
    checks: String,
    #[arg(long)]
    out: PathBuf,
    /// Write the bundle even if the correctability conditions fail.
    #[arg(long)]
    force: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Smooth,
    Rough,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BasisArg {
    X,
    Z,
}

/// Failure classes mapped onto the exit-code contract.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Verification(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

pub fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

/// A JSON report and whether every check it carries passed.
pub struct Outcome {
    pub report: serde_json::Value,
    pub ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        one_based: cli.paper_indexing,
        exec: if cli.sequential { Execution::Sequential } else { Execution::default() },
    };
    let result = match cli.command {
        Command::Build { alist, out, distance_budget } => commands::build(&ctx, &alist, &out, distance_budget),
        Command::Puncture { target, kind } => {
            let kind = match kind {
                KindArg::Smooth => qdefect::defect::PunctureKind::Smooth,
                KindArg::Rough => qdefect::defect::PunctureKind::Rough,
            };
            commands::puncture(&ctx, &target.code, kind, &target.vars, &target.checks, &target.out, target.force)
        }
        Command::Wormhole { target } => {
            commands::wormhole(&ctx, &target.code, &target.vars, &target.checks, &target.out, target.force)
        }
        Command::Deform { code, script, out, threshold } => commands::deform(&ctx, &code, &script, &out, threshold),
        Command::Trace { code, logical, support, basis } => {
            let basis = match basis {
                BasisArg::X => qdefect::defect::Basis::X,
                BasisArg::Z => qdefect::defect::Basis::Z,
            };
            commands::trace(&ctx, &code, logical, support.as_deref(), basis)
        }
        Command::Verify { code } => commands::verify(&ctx, &code),
    };
    match result {
        Ok(outcome) => {
            println!("{}", serde_json::to_string_pretty(&outcome.report).expect("reports serialize"));
            if outcome.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let (CliError::Input(msg) | CliError::Verification(msg)) = &e;
            eprintln!("qdefect: {msg}");
            ExitCode::from(e.code())
        }
    }
}
