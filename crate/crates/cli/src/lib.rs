//! Batch front-end for `entroplab`.
//!
//! Every command prints one JSON document (or a CSV table for `fuzz --format csv`).
//! Exit codes: 0 verified or reported, 1 a checked property is false under
//! `--strict`, 2 bad input or usage, 3 a theorem verifier returned `FAIL`.

mod commands;
pub mod fuzz;
mod graph;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use fuzz::{run_fuzz, FuzzRow, FuzzSummary, Target};

/// Result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommandOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutcome {
    pub(crate) fn json(code: i32, doc: &serde_json::Value) -> Self {
        let mut stdout = serde_json::to_string_pretty(doc).expect("serializable");
        stdout.push('\n');
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    pub(crate) fn usage(msg: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_THEOREM_FAILED: i32 = 3;

/// Environment variable capping the exhaustive oracles.
pub const LIMIT_ENV: &str = "ENTROPLAB_LIMIT";

#[derive(Parser, Debug)]
#[command(
    name = "entroplab",
    version,
    about = "Exact checks of conditional information inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate distributions and graphs.
    Catalog {
        #[command(subcommand)]
        command: CatalogCommand,
    },
    /// Information measures and verdicts of one distribution.
    Info {
        #[command(subcommand)]
        command: InfoCommand,
    },
    /// Check one support condition, or all of them.
    Check(CheckArgs),
    /// Run a theorem or lemma verifier.
    Verify(VerifyArgs),
    /// Run a verifier over many seeded random distributions.
    Fuzz(FuzzArgs),
    /// Matching partitions, biclique covers and bounds.
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCommand {
    Gen(GenArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// distinct-pairs, disjoint-sets, field-lines, gnk-graph, random-full,
    /// random-support or random-cond2c
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long = "q-exp")]
    q_exp: Option<u32>,
    /// Coupling strength as a rational, e.g. `1/2`.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    /// Alphabet sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
    /// Add a random `B` column with this many values.
    #[arg(long = "b-size")]
    b_size: Option<usize>,
    /// For `gnk-graph`, emit the edge distribution instead of the graph.
    #[arg(long = "edge-distribution")]
    edge_distribution: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum InfoCommand {
    Report {
        #[arg(long)]
        dist: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Condition {
    Independence,
    Ci,
    #[value(name = "cond-1")]
    Cond1,
    #[value(name = "cond-2-B")]
    Cond2B,
    #[value(name = "cond-2-C")]
    Cond2C,
    Eq3,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long)]
    dist: PathBuf,
    #[arg(long, required_unless_present = "all", conflicts_with = "all")]
    condition: Option<Condition>,
    #[arg(long)]
    all: bool,
    /// Variables playing `X` (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "X")]
    x: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "Y")]
    y: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "A")]
    a: Vec<String>,
    /// Exit 1 when a checked condition is false.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Theorem {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Lemma1,
    Lemma2,
    Lemma3,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    dist: PathBuf,
    #[arg(long)]
    theorem: Theorem,
    /// Conditioning events for `lemma3`.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Required by `lemma3`.
    #[arg(long)]
    seed: Option<u64>,
    /// Exit 1 when the hypothesis does not hold.
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct FuzzArgs {
    #[arg(long)]
    target: Target,
    #[arg(long)]
    trials: usize,
    /// Trial `i` uses seed `seed + i`.
    #[arg(long)]
    seed: u64,
    /// Largest alphabet size.
    #[arg(long = "max-size", default_value_t = 4)]
    max_size: usize,
    /// Conditioning events per distribution for `lemma3`.
    #[arg(long, default_value_t = 100)]
    events: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum GraphCommand {
    /// Check a matching partition and the bound it implies.
    VerifyPartition {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Smallest valid matching partition by exhaustive search.
    MinPartition {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Check a biclique cover.
    VerifyCover {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Lower bounds on, and the exact value of, the biclique covering number.
    Bcc {
        #[arg(long)]
        graph: PathBuf,
        /// Any of entropy, dual, color, exact (comma separated).
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "entropy,dual,color,exact"
        )]
        method: Vec<BccMethod>,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Extend the edge distribution by a biclique index.
    ZExtend {
        #[arg(long)]
        graph: PathBuf,
        /// Defaults to an optimal cover from the exact solver.
        #[arg(long)]
        cover: Option<PathBuf>,
        #[arg(long)]
        limit: Option<usize>,
        /// Also write the extended distribution here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BccMethod {
    Entropy,
    Dual,
    Color,
    Exact,
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<S: AsRef<str>>(argv: &[S]) -> CommandOutcome {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandOutcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CommandOutcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let result = match cli.command {
        Command::Catalog {
            command: CatalogCommand::Gen(args),
        } => commands::catalog_gen(args),
        Command::Info {
            command: InfoCommand::Report { dist },
        } => commands::info_report(&dist),
        Command::Check(args) => commands::check(args),
        Command::Verify(args) => commands::verify(args),
        Command::Fuzz(args) => commands::fuzz(args),
        Command::Graph { command } => graph::run(command),
    };
    result.unwrap_or_else(CommandOutcome::usage)
}

/// Input or usage failure, reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub(crate) String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<entroplab::Error> for UsageError {
    fn from(e: entroplab::Error) -> Self {
        UsageError(e.to_string())
    }
}

impl From<String> for UsageError {
    fn from(s: String) -> Self {
        UsageError(s)
    }
}

pub(crate) type CmdResult = Result<CommandOutcome, UsageError>;

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, UsageError> {
    std::fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

pub(crate) fn write_file(path: &std::path::Path, text: &str) -> Result<(), UsageError> {
    std::fs::write(path, text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}

/// `--limit`, else `ENTROPLAB_LIMIT`, else the default.
pub(crate) fn oracle_limit(flag: Option<usize>, default: usize) -> Result<usize, UsageError> {
    if let Some(l) = flag {
        return Ok(l);
    }
    match std::env::var(LIMIT_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            UsageError(format!(
                "{LIMIT_ENV} must be a non-negative integer, got `{v}`"
            ))
        }),
        Err(_) => Ok(default),
    }
}
