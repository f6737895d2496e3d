use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use qic_core::ZeroReusePolicy;

/// Score shared research data objects and researchers.
#[derive(Debug, Parser)]
#[command(name = "qic", version, about)]
pub struct Cli {
    /// Knowledge graph file
    #[arg(long, global = true, default_value = "qic-graph.jsonl")]
    pub graph: PathBuf,

    /// Scoring config (TOML)
    #[arg(long, global = true, env = "QIC_CONFIG")]
    pub config: Option<PathBuf>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Override the config's zero_reuse_policy
    #[arg(long, global = true, value_enum)]
    pub zero_reuse_policy: Option<PolicyArg>,

    /// Print progress to stderr (repeat for more)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Annihilate,
    Formula,
}

impl From<PolicyArg> for ZeroReusePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Annihilate => ZeroReusePolicy::Annihilate,
            PolicyArg::Formula => ZeroReusePolicy::Formula,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest JSONL record files into the graph
    Ingest(IngestArgs),
    /// Print the score of one object or researcher
    Score {
        #[command(subcommand)]
        target: ScoreTarget,
        #[arg(long, global = true)]
        as_of: Option<NaiveDate>,
    },
    /// Rank researchers by total score
    Rank {
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        top: u64,
        #[arg(long)]
        as_of: Option<NaiveDate>,
    },
    /// Show how an object's score was derived
    Explain {
        object_id: String,
        #[arg(long)]
        as_of: Option<NaiveDate>,
    },
    /// Recompute scores at each date
    Snapshot {
        /// Comma-separated, strictly increasing dates (YYYY-MM-DD)
        #[arg(long, value_delimiter = ',', required = true)]
        dates: Vec<NaiveDate>,
    },
    /// Print the full score report
    Report {
        #[arg(long)]
        as_of: Option<NaiveDate>,
    },
    /// Configuration commands
    Config {
        #[command(subcommand)]
        action: ConfigAction,
    },
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Data object record files
    #[arg(long, num_args = 1..)]
    pub objects: Vec<PathBuf>,
    /// Reuse event record files
    #[arg(long, num_args = 1..)]
    pub events: Vec<PathBuf>,
    /// Curator override record files
    #[arg(long, num_args = 1..)]
    pub overrides: Vec<PathBuf>,
    /// Also ingest from a source adapter (e.g. `fixture`)
    #[arg(long)]
    pub source: Option<String>,
    /// Directory for the fixture adapter; bundled fixtures when omitted
    #[arg(long, requires = "source")]
    pub source_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ScoreTarget {
    Object { id: String },
    Researcher { id: String },
}

#[derive(Debug, Subcommand)]
pub enum ConfigAction {
    /// Check the config file and its rule file
    Validate,
}
