mod commands;
mod config;
mod record;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use commands::{
    CliError, DilateArgs, DiscretizeArgs, NormArgs, QgramArgs, ReportArgs, SchoenbergArgs, SearchArgs, SemigroupArgs,
    SigmaArgs, WickArgs,
};

#[derive(Parser, Debug)]
#[command(
    name = "matsaev",
    version,
    about = "Truncated p-norms of shift polynomials, multiplier dilations, Wick and Schoenberg checks"
)]
struct Cli {
    /// Seed for every randomized step (restarts, Monte-Carlo, search).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// JSON config file. Top-level keys apply to any command that knows them,
    /// an object under the command name applies to that command only. Flags
    /// take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Directory receiving `<command>.json` (the run record) and, where
    /// available, `<command>.csv`.
    #[arg(long, global = true, env = "MATSAEV_OUT")]
    out: Option<PathBuf>,

    /// What to print on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// The full run record.
    Json,
    /// The command's table, if it has one.
    Csv,
    /// A short human summary.
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Truncated norm profile of P(S) on l^p (or l^p(S^p_m) with --block).
    Norm(NormArgs),
    /// `norm` with a Schatten block (default m = 4).
    Cbnorm(NormArgs),
    /// Scalar norm against the norm of P(σ) on S^p_n.
    Sigma(SigmaArgs),
    /// Build a dilation and check M^k = E U^k J.
    Dilate(DilateArgs),
    /// Wick formula against the Fock-space matrix route.
    Wick(WickArgs),
    /// q-deformed Gram matrix of a family of simple tensors.
    Qgram(QgramArgs),
    /// Conditional negative definiteness of a zero-diagonal kernel.
    Schoenberg(SchoenbergArgs),
    /// Gaussian dilation of exp(-t|α_i-α_j|²), optionally convolved with a kernel.
    Semigroup(SemigroupArgs),
    /// Coefficients a_{n,k} of a kernel.
    Discretize(DiscretizeArgs),
    /// Heuristic search for polynomials with a scalar/Schatten gap.
    Search(SearchArgs),
    /// Summarize run records, optionally replaying them.
    Report(ReportArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Norm(_) => "norm",
            Command::Cbnorm(_) => "cbnorm",
            Command::Sigma(_) => "sigma",
            Command::Dilate(_) => "dilate",
            Command::Wick(_) => "wick",
            Command::Qgram(_) => "qgram",
            Command::Schoenberg(_) => "schoenberg",
            Command::Semigroup(_) => "semigroup",
            Command::Discretize(_) => "discretize",
            Command::Search(_) => "search",
            Command::Report(_) => "report",
        }
    }

    fn flags(&self) -> Result<Value, CliError> {
        match self {
            Command::Norm(a) | Command::Cbnorm(a) => config::flag_map(a),
            Command::Sigma(a) => config::flag_map(a),
            Command::Dilate(a) => a.flag_map(),
            Command::Wick(a) => config::flag_map(a),
            Command::Qgram(a) => config::flag_map(a),
            Command::Schoenberg(a) => config::flag_map(a),
            Command::Semigroup(a) => config::flag_map(a),
            Command::Discretize(a) => config::flag_map(a),
            Command::Search(a) => config::flag_map(a),
            Command::Report(a) => config::flag_map(a),
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let name = cli.command.name();
    let file = match &cli.config {
        Some(path) => Some(config::read_json_file(path)?),
        None => None,
    };
    let mut flags = cli.command.flags()?;
    if let Some(seed) = cli.seed {
        flags["seed"] = Value::from(seed);
    }
    let merged = config::merge(&commands::defaults(name)?, file.as_ref(), name, &flags)?;
    let (snapshot, outcome) = commands::execute(name, &merged)?;
    let rec = record::RunRecord::new(name, snapshot, outcome.results.clone());

    if let Some(dir) = &cli.out {
        record::write_outputs(dir, &rec, outcome.csv.as_deref())?;
    }
    match cli.format {
        Format::Json => println!("{}", rec.to_json()?),
        Format::Csv => match &outcome.csv {
            Some(csv) => print!("{csv}"),
            None => return Err(CliError::Usage(format!("`{name}` has no CSV output"))),
        },
        Format::Text => {
            for line in &outcome.summary {
                println!("{line}");
            }
        }
    }
    if let Some(failure) = &outcome.failure {
        eprintln!("{failure}");
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
