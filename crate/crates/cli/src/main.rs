use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use cover_sampler::trials::init_threads_from_env;

mod mpc;
mod output;
mod solve;
mod verify;

/// Solvers and statistical checks for sampling-based set cover and
/// hypergraph matching.
#[derive(Debug, Parser)]
#[command(name = "cover-sampler", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one instance and report size, validity and work counters.
    Solve(solve::SolveArgs),
    /// Run the Monte Carlo checks and print a pass/fail table.
    VerifyLemmas(verify::VerifyArgs),
    /// Plan round-compressed phases, or simulate them on an instance.
    Mpc(mpc::MpcArgs),
    /// Write a random instance or hypergraph.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    /// Set cover instance (`p sc`).
    Sc,
    /// Hypergraph (`p hg`).
    Hg,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Sets (sc) or vertices (hg).
    #[arg(long)]
    left: usize,
    /// Elements (sc) or edges (hg).
    #[arg(long)]
    right: usize,
    /// Sets per element (sc) or vertices per edge (hg).
    #[arg(long)]
    degree: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    VerificationFailed = 2,
    StatisticalFailure = 3,
}

fn generate(args: &GenerateArgs) -> anyhow::Result<Status> {
    let text = match args.kind {
        Kind::Sc => cover_sampler::instance::generate_random_instance(args.left, args.right, args.degree, args.seed)?
            .serialize(),
        Kind::Hg => cover_sampler::instance::generate_random_hypergraph(args.left, args.right, args.degree, args.seed)?
            .serialize(),
    };
    match &args.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(Status::Ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    init_threads_from_env();
    let result = match &cli.command {
        Command::Solve(a) => solve::run(a),
        Command::VerifyLemmas(a) => verify::run(a),
        Command::Mpc(a) => mpc::run(a),
        Command::Generate(a) => generate(a),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

pub(crate) fn read_input(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}
