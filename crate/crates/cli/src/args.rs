use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use lemon::{DetectParams, InitMode, Protocol, ReportFormat, SeedCount, SeedSpec, SeedStrategy};

#[derive(Debug, Parser)]
#[command(
    name = "lemon",
    version,
    about = "Local community detection from a handful of seed vertices"
)]
pub struct Cli {
    /// key=value file supplying defaults for any long flag; flags win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// More log output on stderr (repeat for more)
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,

    /// Only log errors
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow one community around a seed set
    Detect(DetectCmd),
    /// Score detection against known communities over many seed sets
    Benchmark(BenchmarkCmd),
    /// Write the random-walk subgraph around a seed set
    Sample(SampleCmd),
    /// Write a planted-partition graph and its communities
    Generate(GenerateCmd),
}

impl Command {
    pub const NAMES: [&'static str; 4] = ["detect", "benchmark", "sample", "generate"];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Init {
    Uniform,
    Degree,
}

impl From<Init> for InitMode {
    fn from(init: Init) -> Self {
        match init {
            Init::Uniform => InitMode::Uniform,
            Init::Degree => InitMode::DegreeWeighted,
        }
    }
}

/// Detection knobs shared by `detect` and `benchmark`. Absent flags keep the
/// library defaults.
#[derive(Debug, Clone, Args)]
pub struct DetectionFlags {
    /// Random-walk steps k
    #[arg(long, value_name = "K")]
    pub walk_steps: Option<usize>,
    /// Subspace dimension l
    #[arg(long, value_name = "L")]
    pub dim: Option<usize>,
    /// Vertices added to the seed set per reseeding round
    #[arg(long, value_name = "S")]
    pub expand_step: Option<usize>,
    /// Sample size as a multiple of the average community size
    #[arg(long, value_name = "A")]
    pub alpha: Option<f64>,
    /// Average community size, for sizing the sample
    #[arg(long, value_name = "N")]
    pub avg_size: Option<f64>,
    /// Sample size when no average community size is known
    #[arg(long, value_name = "N")]
    pub sample_size: Option<usize>,
    #[arg(long, value_name = "N")]
    pub size_min: Option<usize>,
    #[arg(long, value_name = "N")]
    pub size_max: Option<usize>,
    /// Cap on reseeding rounds
    #[arg(long, value_name = "N")]
    pub max_iters: Option<usize>,
    /// Initial walk distribution over the seeds
    #[arg(long, value_enum)]
    pub init: Option<Init>,
}

impl DetectionFlags {
    pub fn params(&self) -> DetectParams {
        let d = DetectParams::default();
        DetectParams {
            walk_steps: self.walk_steps.unwrap_or(d.walk_steps),
            dim: self.dim.unwrap_or(d.dim),
            expand_step: self.expand_step.unwrap_or(d.expand_step),
            alpha: self.alpha.unwrap_or(d.alpha),
            avg_community_size: self.avg_size.or(d.avg_community_size),
            sample_size: self.sample_size.unwrap_or(d.sample_size),
            size_min: self.size_min.or(d.size_min),
            size_max: self.size_max.unwrap_or(d.size_max),
            max_reseed_iters: self.max_iters.unwrap_or(d.max_reseed_iters),
            init_mode: self.init.map_or(d.init_mode, InitMode::from),
            ..d
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectFormat {
    Json,
}

#[derive(Debug, Args)]
pub struct DetectCmd {
    /// Edge list, one `u v` pair per line
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    /// Comma-separated seed labels
    #[arg(long, value_name = "IDS", value_delimiter = ',', required = true)]
    pub seeds: Vec<u64>,
    /// Pick the community size from the conductance sweep (default)
    #[arg(long, conflicts_with = "truth_size")]
    pub auto: bool,
    /// Cut the community at this size instead
    #[arg(long, value_name = "N")]
    pub truth_size: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    pub output: DetectFormat,
    /// Write here instead of stdout
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Leave runtime out of the output, for reproducible files
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub detection: DetectionFlags,
}

#[derive(Debug, Clone, Args)]
pub struct SeedingFlags {
    #[arg(long, value_name = "NAME", default_value = "random")]
    pub seed_strategy: SeedStrategy,
    /// Seeds per trial [default: 3]
    #[arg(long, value_name = "N", conflicts_with = "seed_ratio")]
    pub seed_count: Option<usize>,
    /// Seeds per trial as a fraction of the community
    #[arg(long, value_name = "R")]
    pub seed_ratio: Option<f64>,
    #[arg(long, value_name = "X", default_value_t = 0)]
    pub rng_seed: u64,
}

impl SeedingFlags {
    pub fn spec(&self) -> SeedSpec {
        let count = match (self.seed_ratio, self.seed_count) {
            (Some(r), _) => SeedCount::Ratio(r),
            (None, n) => SeedCount::Fixed(n.unwrap_or(3)),
        };
        SeedSpec {
            strategy: self.seed_strategy,
            count,
            rng_seed: self.rng_seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    /// Size from the conductance sweep
    Auto,
    /// Cut at the true community size
    TruthSize,
    /// Reseed up to the true size and keep the best-scoring round
    BestF1,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Auto => Protocol::Auto,
            ProtocolArg::TruthSize => Protocol::TruthSize,
            ProtocolArg::BestF1 => Protocol::BestF1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchmarkCmd {
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    /// Ground truth, one community per line
    #[arg(long, value_name = "FILE")]
    pub communities: PathBuf,
    #[arg(long, value_name = "N", default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, value_enum, default_value = "best-f1")]
    pub protocol: ProtocolArg,
    #[arg(long, value_enum, default_value = "json")]
    pub format: FormatArg,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Worker threads [default: all cores]
    #[arg(long, value_name = "N", env = "LEMON_JOBS", value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Zero the runtime fields, for reproducible files
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub seeding: SeedingFlags,
    #[command(flatten)]
    pub detection: DetectionFlags,
}

#[derive(Debug, Args)]
pub struct SampleCmd {
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    #[arg(long, value_name = "IDS", value_delimiter = ',', required = true)]
    pub seeds: Vec<u64>,
    /// Vertices the walk should reach before stopping
    #[arg(long, value_name = "N", default_value_t = DetectParams::default().sample_size)]
    pub size: usize,
    /// Subgraph edge list in local ids; stdout if absent
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Two-column `internal external` id map
    #[arg(long, value_name = "FILE")]
    pub relabel: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenerateCmd {
    #[arg(long, value_name = "N", default_value_t = 10)]
    pub num_communities: usize,
    #[arg(long, value_name = "N", default_value_t = 20)]
    pub community_size: usize,
    #[arg(long, value_name = "P", default_value_t = 0.5)]
    pub p_in: f64,
    #[arg(long, value_name = "P", default_value_t = 0.01)]
    pub p_out: f64,
    #[arg(long, value_name = "X", default_value_t = 0)]
    pub rng_seed: u64,
    /// Edge list; stdout if absent
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Community file
    #[arg(long, value_name = "FILE")]
    pub communities: PathBuf,
}
