mod commands;
mod error;
mod output;
mod parse;
mod source;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heightlab::Mode;

use crate::output::Format;

/// Height functions on the naturals: enumeration, counting checks,
/// statistics and the Matula tree codec.
#[derive(Debug, Parser)]
#[command(name = "heightlab", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the timestamped header line.
    #[arg(long, global = true)]
    pub no_header: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub workers: Option<u16>,
    /// Largest sieve limit any command may request.
    #[arg(long, global = true, value_parser = parse::natural_u64)]
    pub sieve_cap: Option<u64>,
    /// Memory budget for enumeration, e.g. 2G.
    #[arg(long, global = true, value_parser = parse::bytes)]
    pub mem_budget: Option<u64>,
    /// Stop enumerating after this many seconds, keeping complete levels.
    #[arg(long, global = true)]
    pub time_budget: Option<f64>,
}

#[derive(Debug, Args)]
pub struct StructureArgs {
    /// Catalog name (`shapiro`, `ceil_div(3)`, ...), `successor(mu,eps,p:h/...)`
    /// or `index_recursive(identity|square,j)`.
    #[arg(long, default_value = "shapiro")]
    pub rule: String,
    #[arg(long, value_parser = parse_mode, default_value = "plain")]
    pub mode: Mode,
    /// Checkpoint file, loaded when present and rewritten after extension.
    /// Relative paths resolve against $HEIGHTLAB_CACHE when it is set.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RuleArgs {
    #[arg(long, default_value = "shapiro")]
    pub rule: String,
    #[arg(long, value_parser = parse_mode, default_value = "plain")]
    pub mode: Mode,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|_| format!("mode must be `plain` or `squarefree`, got `{s}`"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesArg {
    All,
    Primes,
    #[value(alias = "sg")]
    SophieGermain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Shapiro,
    Dedekind,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-level counts `h,N,pi,min,max`.
    Enumerate {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        hmax: usize,
        /// List every element instead of the counts.
        #[arg(long)]
        elements: bool,
    },
    /// Compare enumerated level sizes with generating-function coefficients.
    Gfcheck {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        hmax: usize,
    },
    /// Log mean and deviation of the primes at each height.
    Stats {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        hmax: usize,
        /// Add the same statistics over all elements.
        #[arg(long)]
        all: bool,
    },
    /// Level growth ratios against B^h fits.
    Growth {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        hmax: usize,
        #[arg(long, default_value_t = 2.3)]
        base: f64,
    },
    /// Bin one level's values.
    Histogram {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long = "h")]
        height: usize,
        #[arg(long, value_parser = parse::natural_u64, default_value = "25000")]
        width: u64,
        #[arg(long, value_enum, default_value_t = SeriesArg::All)]
        series: SeriesArg,
        /// First bin start (default: smallest element of the level).
        #[arg(long)]
        origin: Option<String>,
    },
    /// Lognormal prime-count estimate.
    Pihat {
        /// Points to evaluate, e.g. 1e5 (repeatable).
        #[arg(long, value_parser = parse::natural)]
        x: Vec<u128>,
        /// Side-by-side π(x), estimate and x/ln x (default points 10^5..10^29).
        #[arg(long)]
        table: bool,
        #[arg(long, value_enum, default_value_t = Preset::Shapiro)]
        preset: Preset,
        /// Override the first height of the sum.
        #[arg(long)]
        first_height: Option<usize>,
    },
    /// Matula numbers and rooted trees.
    Matula {
        #[command(subcommand)]
        action: MatulaAction,
    },
    /// Check the closed-form smallest and largest elements per height.
    Bounds {
        #[command(flatten)]
        structure: StructureArgs,
        #[arg(long)]
        hmax: usize,
    },
    /// F(x) = sum of H(n) for n <= x, with a normalized trend column.
    Avgorder {
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long, value_parser = parse::natural_u64, default_values = ["1e4", "1e5", "1e6"])]
        x: Vec<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum MatulaAction {
    /// Tree text such as `((()()(())))` to its number.
    Encode { trees: Vec<String> },
    /// Numbers to tree text.
    Decode {
        #[arg(value_parser = parse::natural_u64)]
        numbers: Vec<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.workers {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n as usize).build_global();
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("heightlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
