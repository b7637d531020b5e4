//! `snirkit` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

mod commands;
mod error;
pub mod input;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use error::{CliError, CliResult};
use input::MissingPolicy;
use snirkit::netcore::GeneratorSpec;
use snirkit::snir::ScreenConfig;
use snirkit::FitConfig;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "SNIRKIT_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "snirkit",
    version,
    about = "Find the nodes of a follower network that drive their followers' responses",
    after_help = "Set SNIRKIT_THREADS to cap the number of worker threads and RUST_LOG to change log verbosity."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the model to a network and a response; prints the coefficient table.
    Fit(FitCmd),
    /// Run a simulation study and write one CSV row per network size.
    Simulate(SimulateCmd),
    /// Generate a synthetic network and write it as an edge list.
    Generate(GenerateCmd),
    /// Write in-degree, betweenness and harmonic centrality per node.
    Centrality(CentralityCmd),
    /// Compare the model's selection with centrality and response rankings.
    Compare(CompareCmd),
    /// Detection rate of one added influential node over a coefficient grid.
    Sweep(SweepCmd),
    /// Two-period fit with nodes assigned to periods.
    Dynamic(DynamicCmd),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NetworkArgs {
    /// Edge list, one "follower followee" pair per line.
    #[arg(long)]
    pub edges: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ResponseArgs {
    /// Node-keyed response table (node id in the first column).
    #[arg(long)]
    pub responses: PathBuf,
    /// Response column, by header name or 1-based position (default: the second column).
    #[arg(long)]
    pub response_col: Option<String>,
    /// Apply log(1 + y) to the responses.
    #[arg(long)]
    pub log: bool,
    /// What to do with nodes that have no response.
    #[arg(long, value_enum, default_value_t = MissingPolicy::Error)]
    pub missing: MissingPolicy,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// Candidate set size |M| = floor(N^gamma). Default 2/3; theory needs gamma >= 5/9.
    #[arg(long, conflicts_with = "m")]
    pub gamma: Option<f64>,
    /// Explicit candidate set size |M|.
    #[arg(long)]
    pub m: Option<usize>,
    /// Minimum number of forward-addition steps (default floor(N^(5/9))).
    #[arg(long = "K")]
    pub k: Option<usize>,
}

impl ModelArgs {
    pub fn fit_config(&self) -> CliResult<FitConfig> {
        let screen = match (self.gamma, self.m) {
            (Some(g), _) => {
                if !(g > 0.0 && g <= 1.0) {
                    return Err(CliError::Usage(format!("--gamma {g} is not in (0, 1]")));
                }
                ScreenConfig::gamma(g)
            }
            (None, Some(0)) => return Err(CliError::Usage("--m must be at least 1".into())),
            (None, Some(m)) => ScreenConfig::fixed(m),
            (None, None) => ScreenConfig::default(),
        };
        if self.k == Some(0) {
            return Err(CliError::Usage("--K must be at least 1".into()));
        }
        Ok(FitConfig { screen, k: self.k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    Er,
    Sbm,
    Powerlaw,
}

impl Preset {
    pub fn spec(self, n: usize, seed: u64) -> GeneratorSpec {
        match self {
            Preset::Er => GeneratorSpec::er(n, seed),
            Preset::Sbm => GeneratorSpec::sbm(n, seed),
            Preset::Powerlaw => GeneratorSpec::powerlaw(n, seed),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitCmd {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub response: ResponseArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Node-keyed covariate table; covariate effects are profiled out first.
    #[arg(long)]
    pub covariates: Option<PathBuf>,
    /// Recorded in the report; the fit itself is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON report path (default: stdout, with the table on stderr).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateCmd {
    /// Network family.
    #[arg(long, value_enum, required_unless_present = "config")]
    pub preset: Option<Preset>,
    /// Network sizes; repeat for several rows.
    #[arg(long, num_args = 1..)]
    pub n: Vec<usize>,
    /// Number of influential nodes [default: 10].
    #[arg(long)]
    pub s1: Option<usize>,
    /// Replications per network size [default: 100].
    #[arg(long)]
    pub reps: Option<usize>,
    /// [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Full study configuration (JSON or TOML); other flags override it when given.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV path (default: stdout); the resolved configuration goes next to it as <out>.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenerateCmd {
    #[arg(long, value_enum)]
    pub preset: Preset,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge list path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CentralityCmd {
    #[command(flatten)]
    pub network: NetworkArgs,
    /// CSV path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareCmd {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub response: ResponseArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Nodes per method (default: the size of the model's selection).
    #[arg(long)]
    pub size: Option<usize>,
    /// JSON report path (default: stdout, with the table on stderr).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepCmd {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub response: ResponseArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Noise standard deviation of the simulated responses.
    #[arg(long, default_value_t = 1.0)]
    pub sd: f64,
    /// CSV path (default: stdout); the resolved configuration goes next to it as <out>.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DynamicCmd {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[command(flatten)]
    pub response: ResponseArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Node-keyed table of posting periods (1 or 2).
    #[arg(long)]
    pub periods: PathBuf,
    /// JSON report path (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV}={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| commands::dispatch(&cli.command)) {
        Ok(()) | Err(CliError::Closed) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
