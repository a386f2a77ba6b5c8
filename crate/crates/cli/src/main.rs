//! `mapgenus`: exact tables, verification suites and asymptotic sweeps for
//! rooted maps.
//!
//! Every flag can also be set through a `MAPGENUS_*` environment variable;
//! flags win over the environment.

mod commands;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mapgenus::Error;

#[derive(Debug, Parser)]
#[command(name = "mapgenus", version, about = "Counts and asymptotics of rooted maps by genus")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv", env = "MAPGENUS_FORMAT")]
    format: Format,
    /// Write data here instead of stdout.
    #[arg(long, global = true, env = "MAPGENUS_OUT")]
    out: Option<PathBuf>,
    /// Size of the worker pool (default: all cores).
    #[arg(long, global = true, env = "MAPGENUS_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the genus table of rooted cubic maps and export it.
    Table(TableArgs),
    /// Run the cross-pipeline, oracle and bound checks.
    Verify(VerifyArgs),
    /// Estimate K(y) on a grid of y values.
    Kestimate(KArgs),
    /// Moments, normality diagnostics, high-genus ratios and moment jets.
    Stats(StatsArgs),
    /// Exact and asymptotic counts of rooted maps disregarding genus.
    Count(CountArgs),
}

#[derive(Debug, Args)]
pub struct TableOpts {
    /// Largest n (maps with 2n vertices).
    #[arg(long = "max-n", env = "MAPGENUS_MAX_N", value_parser = clap::value_parser!(u64).range(1..))]
    pub max_n: u64,
    /// Checkpoint file; resumed from when present.
    #[arg(long, env = "MAPGENUS_CHECKPOINT")]
    pub checkpoint: Option<PathBuf>,
    /// Rows between checkpoint writes.
    #[arg(long, default_value_t = 25, env = "MAPGENUS_STRIDE", value_parser = clap::value_parser!(u64).range(1..))]
    pub stride: u64,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub table: TableOpts,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest n for the table-based checks.
    #[arg(long = "max-n", default_value_t = 30, env = "MAPGENUS_MAX_N")]
    pub max_n: usize,
    /// Largest n for the bound sweep.
    #[arg(long, default_value_t = 1000, env = "MAPGENUS_N")]
    pub n: usize,
    /// Sequence length for the K(1) check.
    #[arg(long = "N", default_value_t = 100_000, env = "MAPGENUS_SEQ_LEN")]
    pub seq_len: usize,
}

#[derive(Debug, Args)]
pub struct KArgs {
    /// Comma-separated y values in (0, 2).
    #[arg(long, value_delimiter = ',', default_value = "1.0", env = "MAPGENUS_Y")]
    pub y: Vec<f64>,
    /// Sequence length.
    #[arg(long = "N", default_value_t = mapgenus::asymptotics::DEFAULT_K_LENGTH, env = "MAPGENUS_SEQ_LEN")]
    pub seq_len: usize,
    /// Error indicator above which an estimate is reported as unconverged.
    #[arg(long, default_value_t = mapgenus::asymptotics::DEFAULT_K_THRESHOLD, env = "MAPGENUS_THRESHOLD")]
    pub threshold: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StatsKind {
    Moments,
    Normality,
    Ratios,
    Jets,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub table: TableOpts,
    #[arg(long, value_enum, default_value = "moments", env = "MAPGENUS_KIND")]
    pub kind: StatsKind,
    /// Comma-separated n values to report (default: every n up to max-n).
    #[arg(long, value_delimiter = ',', env = "MAPGENUS_N")]
    pub n: Vec<usize>,
    /// Margin of the (n - 2g)/ln n window used for ratios.
    #[arg(long, default_value_t = mapgenus::asymptotics::DEFAULT_EPSILON, env = "MAPGENUS_EPSILON")]
    pub epsilon: f64,
    /// Sequence length for K estimates (ratios) or number of jets (jets).
    #[arg(long = "N", default_value_t = mapgenus::asymptotics::DEFAULT_K_LENGTH, env = "MAPGENUS_SEQ_LEN")]
    pub seq_len: usize,
    /// Comma-separated t values for normality reports.
    #[arg(long = "t", value_delimiter = ',', allow_negative_numbers = true, env = "MAPGENUS_T")]
    pub t_grid: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    /// `all`, `cubic`, or a vertex degree such as `4`.
    #[arg(long, default_value = "all", env = "MAPGENUS_FAMILY")]
    pub family: String,
    /// Largest size: edges for `all`, the family size parameter otherwise.
    #[arg(long = "max-n", default_value_t = 10, env = "MAPGENUS_MAX_N", value_parser = clap::value_parser!(u64).range(1..))]
    pub max_n: u64,
}

/// Why a command stopped.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Verification(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. }
            | Error::InvalidArgument(_)
            | Error::OutsideWindow { .. }
            | Error::InvalidFamily(_)
            | Error::OutOfRange { .. }
            | Error::CensusTooLarge { .. }
            | Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

pub type CmdResult = Result<(), Failure>;

/// Where data goes.
pub struct Output {
    pub format: Format,
    sink: Box<dyn Write>,
}

impl Output {
    fn open(format: Format, path: Option<&PathBuf>) -> io::Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Output { format, sink })
    }

    pub fn writer(&mut self) -> &mut dyn Write {
        &mut self.sink
    }

    pub fn json(&mut self, value: &serde_json::Value) -> CmdResult {
        serde_json::to_writer_pretty(&mut self.sink, value)?;
        writeln!(self.sink)?;
        Ok(())
    }

    fn finish(mut self) -> io::Result<()> {
        self.sink.flush()
    }
}

fn run(cli: Cli) -> CmdResult {
    if let Some(w) = cli.global.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w as usize)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let mut out = Output::open(cli.global.format, cli.global.out.as_ref())?;
    let result = match &cli.command {
        Command::Table(a) => commands::table(a, &mut out),
        Command::Verify(a) => verify::run(a, &mut out),
        Command::Kestimate(a) => commands::kestimate(a, &mut out),
        Command::Stats(a) => commands::stats(a, &mut out),
        Command::Count(a) => commands::count(a, &mut out),
    };
    out.finish()?;
    result
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
