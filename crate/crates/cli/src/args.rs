use std::path::PathBuf;

use clap::{Parser, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Grade SQL queries by their edit distance to a reference query.
///
/// Without a start query the distance is measured from the empty query,
/// which rates how much work the destination takes to write. Without a
/// schema, one is deduced from the destination.
#[derive(Debug, Parser)]
#[command(name = "sqldist", version)]
pub struct Cli {
    /// Schema file: one `table(col, ...)` per line, `*col` marks a primary-key column
    #[arg(long, value_name = "FILE")]
    pub schema: Option<PathBuf>,

    /// File holding the destination (reference) query
    #[arg(long, value_name = "FILE", conflicts_with = "destination_sql")]
    pub destination: Option<PathBuf>,

    /// Destination query given inline
    #[arg(long, value_name = "SQL")]
    pub destination_sql: Option<String>,

    /// File holding the start (submitted) query
    #[arg(long, value_name = "FILE", conflicts_with_all = ["start_sql", "starts_dir"])]
    pub start: Option<PathBuf>,

    /// Start query given inline
    #[arg(long, value_name = "SQL", conflicts_with = "starts_dir")]
    pub start_sql: Option<String>,

    /// Grade every file in this directory as a start query
    #[arg(long, value_name = "DIR")]
    pub starts_dir: Option<PathBuf>,

    /// Cost overrides: one `editName = integer` per line
    #[arg(long, value_name = "FILE")]
    pub costs: Option<PathBuf>,

    /// Give up once the distance is known to exceed this bound
    #[arg(long, value_name = "N")]
    pub max_distance: Option<u32>,

    /// Extra components allowed beyond the destination's, per kind and clause
    #[arg(long, value_name = "N", default_value_t = 1)]
    pub slack: usize,

    /// Points for a query at distance 0
    #[arg(long, value_name = "P", default_value_t = 10.0)]
    pub max_points: f64,

    /// Points deducted per unit of distance
    #[arg(long, value_name = "S", default_value_t = 1.0)]
    pub scale: f64,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Print the edit catalog (name, category, cost, description) and exit
    #[arg(long)]
    pub list_edits: bool,

    /// Do not report progress on stderr
    #[arg(long, short)]
    pub quiet: bool,
}
