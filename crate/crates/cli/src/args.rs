use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Check, complete and explore extended triangular systems and their
/// nest-operator models.
///
/// Exit codes: 0 when every check passes, 1 when a check reports
/// violations, 2 on unreadable or invalid input.
#[derive(Debug, Parser)]
#[command(name = "trilab", version, propagate_version = true)]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Grid cells of the model space [default: 16]
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Blocks (system size) [default: 6, or the size of an input system]
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Channels per cell and block [default: 4]
    #[arg(long, global = true)]
    pub c: Option<usize>,
    /// Values at or below this count as zero
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Measure of exceptional cells allowed, as an exact rational such as 1/8
    #[arg(long, global = true, default_value = "0")]
    pub eta: String,
    /// Smallest window width, in cells, for seminorms
    #[arg(long, global = true, default_value_t = 1)]
    pub wfloor: usize,
    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized sweeps
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for the report and any generated files (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for per-cell loops
    #[arg(long, global = true, env = "TRILAB_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the axioms of a system document
    Check {
        system: PathBuf,
        /// Axioms to check; defaults to extended for documents with R and C
        #[arg(long, value_enum)]
        mode: Option<Mode>,
    },
    /// Enlarge an extended system to a maximal one
    Complete { system: PathBuf },
    /// Seminorm, membership and witness computations on the model space
    Lab {
        #[command(subcommand)]
        task: LabTask,
    },
    /// Build one of the worked examples and verify it
    Demo {
        #[arg(value_enum)]
        example: DemoKind,
        /// Cut to install: a-empty, b-empty, at:<label> or gap:<rational>
        #[arg(long)]
        cut: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Triangular,
    Nearly,
    Extended,
}

#[derive(Debug, Subcommand)]
pub enum LabTask {
    /// Per-cell seminorm profile of an operator given by links
    Seminorm {
        #[arg(long)]
        op: PathBuf,
        /// Row blocks, comma separated [default: all]
        #[arg(long, value_delimiter = ',')]
        rows: Vec<usize>,
        /// Column blocks, comma separated [default: all]
        #[arg(long, value_delimiter = ',')]
        cols: Vec<usize>,
        /// Report the liminal truncation profile of a row or column instead
        #[arg(long, value_enum, requires = "index")]
        liminal: Option<Side>,
        #[arg(long)]
        index: Option<usize>,
    },
    /// Test an operator against the algebra of a system
    Membership {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        op: PathBuf,
    },
    /// Build and verify a witness operator
    Witness {
        #[command(subcommand)]
        which: Witness,
    },
    /// Check the product inequality on random block upper-triangular pairs
    Inequality {
        /// Truncation index; terms run over blocks below it
        #[arg(long)]
        r: usize,
        /// Random pairs to test
        #[arg(long, default_value_t = 4)]
        samples: usize,
        /// Probability that a permitted entry is nonzero
        #[arg(long, default_value_t = 0.5)]
        density: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Row,
    Col,
}

#[derive(Debug, Subcommand)]
pub enum Witness {
    /// X, Y vanishing cell by cell whose product E_i XY E_j does not
    Nonclosure {
        #[arg(long, default_value_t = 1)]
        i: usize,
        #[arg(long, default_value_t = 2)]
        j: usize,
    },
    /// Column operator with a nonvanishing subset seminorm on a set
    Rinf {
        /// Set as lo,hi rationals, e.g. 1/4,1/2
        #[arg(long, default_value = "1/4,1/2")]
        set: String,
        /// Column block [default: last]
        #[arg(long)]
        j: Option<usize>,
        /// Carrier blocks [default: k/2]
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Operator whose corners are all Larson yet which is not in the algebra
    Nonsimple,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DemoKind {
    Nat,
    Int,
    Wo,
    Cantor,
    Mixed,
}
