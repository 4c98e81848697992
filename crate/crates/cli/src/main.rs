use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use tracing_subscriber::EnvFilter;

mod commands;
mod config;
mod failure;
mod report;
mod svg;

/// Detect the outbreak of online firestorms in time-stamped short texts.
///
/// Stages exchange CSV and JSONL files; every subcommand can be run on its
/// own. Set FS_LOG (e.g. `FS_LOG=debug`) to control log verbosity.
#[derive(Parser, Debug)]
#[command(name = "firestorm", version, about, long_about = None)]
pub struct Cli {
    /// TOML configuration file. Flags given on the command line win over it.
    #[arg(long, global = true, value_name = "TOML")]
    pub config: Option<PathBuf>,

    /// Worker threads used across events and categories (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a JSONL tweet file and write it back as a normalized dataset.
    Ingest(IngestArgs),
    /// Generate synthetic firestorm events with ground truth.
    Synth(SynthArgs),
    /// Score tweets with a lexicon and emit per-slice category means.
    Score(ScoreArgs),
    /// Compute windowed mention or retweet network metrics per slice.
    Networks(NetworksArgs),
    /// Find change points in one column of a CSV series.
    Detect(DetectArgs),
    /// Replay a dataset through the streaming detector.
    Stream(StreamArgs),
    /// Evaluate one or more events: offsets, t-tests, predictor relevance.
    Evaluate(EvaluateArgs),
    /// Render SVG charts from the CSV outputs of `evaluate`.
    Report(ReportArgs),
}

/// Options shared by every subcommand that reads a dataset.
#[derive(Args, Debug, Clone)]
pub struct DatasetOpts {
    /// Event token (`#hashtag` or `@handle`); overrides the dataset meta line.
    #[arg(long, value_name = "TOKEN")]
    pub label: Option<String>,

    /// First instant of the event span (ISO-8601 UTC); overrides the meta line.
    #[arg(long, value_name = "ISO")]
    pub span_start: Option<String>,

    /// Length of the event span in days [default: 15].
    #[arg(long, value_name = "DAYS")]
    pub span_days: Option<u32>,

    /// Fail on the first malformed record instead of skipping it.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// JSONL tweet file.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Normalized dataset (JSONL with a leading meta line).
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    #[command(flatten)]
    pub dataset: DatasetOpts,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Random seed; overrides `synth.seed` (or `suite.seed` with --events).
    #[arg(long)]
    pub seed: Option<u64>,

    /// Dataset output for a single event.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["events", "out_dir"])]
    pub out: Option<PathBuf>,

    /// Ground-truth JSON for a single event.
    #[arg(long, value_name = "FILE", requires = "out")]
    pub truth: Option<PathBuf>,

    /// Generate a jittered suite of N events instead of one.
    #[arg(long, value_name = "N", requires = "out_dir")]
    pub events: Option<usize>,

    /// Directory receiving `eventNN.jsonl` and `eventNN.truth.json`.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Peak burst magnitude; 1 generates a burst-free null stream.
    #[arg(long)]
    pub magnitude: Option<f64>,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    /// Dataset (JSONL).
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Lexicon file; the built-in demo lexicon is used when omitted.
    #[arg(long, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,

    /// Comma-separated categories [default: every lexicon column].
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub categories: Option<Vec<String>>,

    /// Emit one row per tweet instead of per-slice means.
    #[arg(long)]
    pub per_tweet: bool,

    /// Output CSV.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    #[command(flatten)]
    pub dataset: DatasetOpts,
}

#[derive(Args, Debug)]
pub struct NetworksArgs {
    /// Dataset (JSONL).
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Edge definition: `mention` or `retweet` [default: mention].
    #[arg(long)]
    pub kind: Option<String>,

    /// Trailing window in slices [default: 24].
    #[arg(long, value_name = "SLICES")]
    pub window: Option<usize>,

    /// Emit `slice,value` for a single metric.
    #[arg(long, conflicts_with = "all_metrics")]
    pub metric: Option<String>,

    /// Emit one column per metric (the default when --metric is absent).
    #[arg(long)]
    pub all_metrics: bool,

    /// Output CSV.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    #[command(flatten)]
    pub dataset: DatasetOpts,
}

#[derive(Args, Debug)]
pub struct DetectArgs {
    /// CSV file holding the series.
    #[arg(long, value_name = "CSV")]
    pub series: PathBuf,

    /// Column to segment [default: the last column].
    #[arg(long)]
    pub column: Option<String>,

    /// `auto` (elbow over 2..10) or a fixed positive penalty.
    #[arg(long, default_value = "auto")]
    pub penalty: String,

    /// Output CSV of change points.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Penalty-sweep counts [default: `<out stem>.counts.csv`].
    #[arg(long, value_name = "FILE")]
    pub counts: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StreamArgs {
    /// Dataset (JSONL).
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Lexicon file; the built-in demo lexicon is used when omitted.
    #[arg(long, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,

    /// Comma-separated monitored categories [default: netspeak,I,posemo,emo,assent].
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub categories: Option<Vec<String>>,

    /// Categories that must report a fresh change point to alert [default: 4].
    #[arg(long, value_name = "K")]
    pub min_categories: Option<usize>,

    /// Slices a change point stays fresh [default: 2].
    #[arg(long, value_name = "SLICES")]
    pub recency: Option<usize>,

    /// Per-tick report CSV.
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Write a JSON detection summary around a reference slice.
    #[arg(long, value_name = "FILE")]
    pub summary: Option<PathBuf>,

    /// Reference slice for --summary [default: truth start, else the
    /// first slice where the event token is the top entity].
    #[arg(long, value_name = "SLICE")]
    pub reference: Option<usize>,

    /// Ground-truth JSON from `synth`, used for the reference slice.
    #[arg(long, value_name = "FILE")]
    pub truth: Option<PathBuf>,

    #[command(flatten)]
    pub dataset: DatasetOpts,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// One or more datasets (JSONL).
    #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,

    /// Ground-truth JSON per dataset, in the same order; the true start
    /// replaces the entity-frequency start.
    #[arg(long, value_name = "FILE", num_args = 1..)]
    pub truth: Vec<PathBuf>,

    /// Lexicon file; the built-in demo lexicon is used when omitted.
    #[arg(long, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,

    /// Comma-separated monitored categories.
    #[arg(long, value_delimiter = ',', value_name = "LIST")]
    pub categories: Option<Vec<String>>,

    /// Categories that must report a fresh change point to alert.
    #[arg(long, value_name = "K")]
    pub min_categories: Option<usize>,

    /// Predictor-relevance tolerance in slices [default: 2].
    #[arg(long, value_name = "SLICES")]
    pub tolerance: Option<usize>,

    /// Ticks after a reference slice searched for change points [default: 48].
    #[arg(long, value_name = "SLICES")]
    pub horizon: Option<usize>,

    /// Output directory.
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Fail on the first malformed record instead of skipping it.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Directory written by `evaluate`.
    #[arg(long, value_name = "DIR")]
    pub input_dir: PathBuf,

    /// Directory receiving the SVG files [default: the input directory].
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    /// Optional `networks` CSV to chart as a time line.
    #[arg(long, value_name = "CSV")]
    pub networks: Option<PathBuf>,

    /// Optional `score` CSV to chart with change points from --changepoints.
    #[arg(long, value_name = "CSV", requires = "changepoints")]
    pub series: Option<PathBuf>,

    /// `detect` output marking change points on the --series chart.
    #[arg(long, value_name = "CSV")]
    pub changepoints: Option<PathBuf>,

    /// Column of --series to draw [default: the last column].
    #[arg(long)]
    pub column: Option<String>,

    /// Column of --networks to draw.
    #[arg(long, default_value = "max_in_degree")]
    pub metric: String,
}

fn init_logging() {
    let filter = EnvFilter::try_from_env("FS_LOG").unwrap_or_else(|_| EnvFilter::new("warn"));
    let _ = tracing_subscriber::fmt()
        .with_env_filter(filter)
        .with_writer(std::io::stderr)
        .try_init();
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    init_logging();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
