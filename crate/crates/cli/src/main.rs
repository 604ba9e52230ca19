//! `graphcode`: encode, erase, decode and verify codes over graphs.

mod commands;
mod family;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use graphcode::Error;

use family::FamilyArg;

#[derive(Parser, Debug)]
#[command(name = "graphcode", version, about = "Erasure codes over complete graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct CodeOpts {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Field order; defaults to the smallest field the family supports.
    #[arg(long)]
    pub q: Option<u32>,
    /// Seed for random choices (extreme generator, verification codewords).
    #[arg(long, env = "GRAPHCODE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "claims1-2")]
    Claims12,
    #[value(name = "claims3-4")]
    Claims34,
    Schedule,
    Counting,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parameters of a code and how they compare with other constructions.
    Info {
        #[command(flatten)]
        code: CodeOpts,
        #[arg(long)]
        n: usize,
        /// Failures to compare against; defaults to the family's capability.
        #[arg(long)]
        rho: Option<usize>,
    },
    /// Encode information symbols into a graph file.
    Encode {
        #[command(flatten)]
        code: CodeOpts,
        #[arg(long)]
        n: usize,
        /// Information file: JSON map {"i:j": v}, JSON array, or whitespace
        /// separated values in lexicographic edge order. Reads stdin if absent.
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Fail nodes of a graph file.
    Erase {
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Comma separated node list.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        fail: Vec<usize>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Recover the erased edges of a graph file.
    Decode {
        #[command(flatten)]
        code: CodeOpts,
        #[arg(short, long)]
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the recovery log as JSON.
        #[arg(long)]
        provenance: Option<PathBuf>,
    },
    /// Decode every failure pattern against random codewords.
    Verify {
        #[command(flatten)]
        code: CodeOpts,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: Option<usize>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Also compare every decode with the reference solver.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_enum)]
        suite: Vec<Suite>,
        /// Monte Carlo samples for the counting suite when exhaustive
        /// enumeration is too large.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Time encoding and decoding.
    Bench {
        #[command(flatten)]
        code: CodeOpts,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

/// Process exit status for a library error.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Underdetermined | Error::UnderdeterminedSystem => 2,
        Error::Inconsistent | Error::InconsistentSystem | Error::CorruptedInput => 3,
        _ => 1,
    }
}

#[derive(Debug)]
pub enum Failure {
    Code(Error),
    Io(String),
    /// Verification found failing patterns; the report was already printed.
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Code(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Info { code, n, rho } => commands::info(&code, n, rho),
        Command::Encode { code, n, input, output } => commands::encode(&code, n, input, output),
        Command::Erase { input, output, fail, format } => commands::erase(input, output, &fail, format),
        Command::Decode { code, input, output, provenance } => commands::decode(&code, input, output, provenance),
        Command::Verify { code, n, rho, trials, jobs, oracle, suite, samples } => {
            commands::verify(&code, n, rho, trials, jobs, oracle, &suite, samples)
        }
        Command::Bench { code, n, trials } => commands::bench(&code, n, trials),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Code(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verify) => ExitCode::from(1),
    }
}
