use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod output;

use output::Format;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Overrides the worker thread count.
pub const THREADS_ENV: &str = "RATAPPROX_THREADS";

#[derive(Parser, Debug)]
#[command(name = "ratapprox", version, about = "Rational approximation with one numerator per prime")]
struct Cli {
    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count (and optionally list) the primes up to a bound.
    Primes {
        #[arg(long)]
        bound: u64,
        #[arg(long)]
        list: bool,
    },
    /// Numerator sequence files.
    #[command(subcommand)]
    Seq(SeqCommand),
    /// Exact uncovered measure of the arcs for primes in (X, Y].
    Coverage {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
        /// Also list the covered arcs.
        #[arg(long)]
        union: bool,
    },
    /// Level sets, second moment and the expectation of the uncovered set.
    Sievelab {
        #[arg(long)]
        seq: Option<PathBuf>,
        #[arg(long)]
        x: u64,
        #[arg(long)]
        y: u64,
        /// Required without --seq.
        #[arg(long)]
        c: Option<String>,
        /// Exact expectation over all sequences.
        #[arg(long)]
        exact: bool,
        /// Monte-Carlo trials.
        #[arg(long)]
        mc: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Primes p <= bound with x within c/p of a_p/p.
    Hits {
        #[arg(long)]
        seq: PathBuf,
        #[command(flatten)]
        x: RealArg,
        #[arg(long)]
        bound: u64,
    },
    /// Primes p <= bound with {x p} < c.
    Fracparts {
        #[command(flatten)]
        x: RealArg,
        #[arg(long)]
        c: String,
        #[arg(long)]
        bound: u64,
    },
    /// Twisted averages s_p(x, y) along the primes.
    Ergodic {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
        #[arg(long)]
        primes_up_to: u64,
        /// Restrict to a sparse prime set: geometric, log, loglog or sqrt.
        #[arg(long)]
        sparse: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum SeqCommand {
    /// Construct a sequence over the primes up to a bound.
    Build {
        #[arg(long, value_enum)]
        method: BuildMethod,
        /// Prime bound; for blocks, the largest prime the search may use.
        #[arg(long)]
        bound: u64,
        #[arg(long, default_value = "1/2")]
        c: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Block tolerances, comma separated.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<String>,
        /// Where to write the block schedule; standard output when omitted
        /// and --out is given.
        #[arg(long)]
        schedule: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BuildMethod {
    Greedy,
    Random,
    Blocks,
    Constant,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct RealArg {
    /// A rational or exact decimal, e.g. 1/3 or 0.125.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    /// A built-in irrational: sqrt2 or golden.
    #[arg(long)]
    x_named: Option<String>,
    /// Certified error of the approximant for --x-named.
    #[arg(long, default_value = "1e-14")]
    eta: String,
}

fn init_threads() -> Result<(), commands::CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| commands::CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(commands::CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got 0")));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| commands::CliError::Usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = init_threads().and_then(|()| commands::run(cli.command, cli.format, cli.out.as_deref()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
