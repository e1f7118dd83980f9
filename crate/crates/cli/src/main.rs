//! `regreal`: build, convert, evaluate and check regular real functions.

mod commands;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use regreal_core::buchi::DEFAULT_STATE_CAP;
use regreal_core::convert::pipeline::DEFAULT_DELAY_CAP;

#[derive(Parser, Debug)]
#[command(name = "regreal", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a PWL, automaton or transducer artifact from a corpus name or a PWL file.
    Build(BuildArgs),
    /// Apply one conversion step to an artifact.
    Convert(ConvertArgs),
    /// Evaluate an artifact at a point.
    Eval(EvalArgs),
    /// Run an analysis check; exit 0 on pass, 1 on fail.
    Check(CheckArgs),
    /// Print an automaton or transducer artifact as a DOT digraph.
    ExportDot(ExportDotArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("from").required(true).args(["corpus", "pwl"])))]
struct BuildArgs {
    /// Corpus entry, e.g. `tooth:1/4,1/2,1/8`, `constant:1/3`, `fz:{3,5}`, `step`.
    #[arg(long)]
    corpus: Option<String>,
    /// JSON file with `{"breakpoints": [["x", "y"], ...]}` or a PWL artifact.
    #[arg(long)]
    pwl: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    /// Graph automaton.
    Buchi,
    /// Deterministic graph automaton.
    Detbuchi,
    /// Nondeterministic binary transducer.
    Fst,
    /// Deterministic transducer with signed-digit output.
    #[value(name = "det-signed", alias = "detfst")]
    DetSigned,
    /// Deterministic transducer followed by the signed-to-binary adapter.
    #[value(alias = "fst-binary")]
    Binary,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    input: PathBuf,
    #[arg(long, value_enum)]
    to: Target,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Largest delay tried when discovering one.
    #[arg(long, default_value_t = DEFAULT_DELAY_CAP)]
    delay_cap: usize,
    /// Use this delay instead of discovering one.
    #[arg(long)]
    delay: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
    /// Map the range into [1/4, 1/2] before building the graph automaton.
    #[arg(long)]
    normalize: bool,
    /// Prediction chain length of the nondeterministic transducer.
    #[arg(long, default_value_t = regreal_core::convert::ahat::DEFAULT_CHAIN_LEN)]
    chain_len: usize,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("point").required(true).args(["x", "lasso"])))]
#[command(group(ArgGroup::new("mode").required(true).args(["digits", "exact"])))]
struct EvalArgs {
    artifact: PathBuf,
    /// Rational input such as `1/3` or `0.101`.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// Input lasso `prefix(period)`; `m` is the digit -1.
    #[arg(long)]
    lasso: Option<String>,
    /// Print this many output digits.
    #[arg(long)]
    digits: Option<usize>,
    /// Print the exact rational output.
    #[arg(long)]
    exact: bool,
    /// Read the output of a graph automaton off its accepting runs.
    #[arg(long)]
    graph_lookup: bool,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("check").required(true).args(
    ["equiv", "invariants", "obstruction", "lipschitz", "modulus", "rational"]
)))]
struct CheckArgs {
    /// Compare two functions on the dyadic grid.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    equiv: Option<Vec<String>>,
    /// Run the construction monitors on a det-signed artifact.
    #[arg(long, value_name = "A")]
    invariants: Option<String>,
    /// Search for a non-regularity witness against a state budget.
    #[arg(long, value_name = "F")]
    obstruction: Option<String>,
    /// Estimate the Lipschitz constant on the dyadic grid.
    #[arg(long, value_name = "F")]
    lipschitz: Option<String>,
    /// Find a modulus of continuity of a transducer.
    #[arg(long, value_name = "A")]
    modulus: Option<String>,
    /// Check that a deterministic transducer maps rationals to rationals.
    #[arg(long, value_name = "A")]
    rational: Option<String>,
    #[arg(long, default_value_t = 6)]
    depth: u32,
    #[arg(long, default_value = "1/256")]
    tol: String,
    /// State budget for the obstruction search.
    #[arg(long, default_value_t = 8)]
    budget: usize,
    /// Lipschitz bound the estimate must not exceed.
    #[arg(long)]
    bound: Option<String>,
    /// Output precision exponent for the modulus check.
    #[arg(long, default_value_t = 6)]
    j0: usize,
    /// Largest input denominator for the rational check.
    #[arg(long, default_value_t = 16)]
    max_den: u32,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
}

#[derive(Args, Debug)]
struct ExportDotArgs {
    artifact: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// States materialized from a lazily stored transducer.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Build(args) => commands::build(&args).map(|()| true),
        Command::Convert(args) => commands::convert(&args).map(|()| true),
        Command::Eval(args) => commands::eval(&args).map(|()| true),
        Command::Check(args) => commands::check(&args),
        Command::ExportDot(args) => commands::export_dot(&args).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
