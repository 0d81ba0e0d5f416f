use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "privdiffuse", version, about = "Distance-graded differential privacy over networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample one trace of the private jump process and write it as JSON.
    Sample(SampleArgs),
    /// Hop or resistance distances from a source node, as CSV.
    Distances(DistancesArgs),
    /// Diffuse a private vector from an owner to every reachable node.
    Diffuse(DiffuseArgs),
    /// Run a scenario file in centralized, gossip, coalition or baseline mode.
    Simulate(SimulateArgs),
    /// Run the statistical verification suite.
    Verify(VerifyArgs),
    /// Generate a random geometric network in the unit square.
    GenNetwork(GenNetworkArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Dimension of the private vector.
    #[arg(long)]
    pub n: usize,
    /// Lower end of the level interval.
    #[arg(long)]
    pub eps_lo: f64,
    /// Upper end of the level interval.
    #[arg(long)]
    pub eps_hi: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trace document path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write `epsilon,norm` step data (one row per segment end).
    #[arg(long)]
    pub norm_csv: Option<PathBuf>,
}

/// Where the network comes from.
#[derive(Debug, Args)]
pub struct NetworkArgs {
    /// Edge-list file (`a b` per line, `#` comments, optional `# nodes: N` header).
    #[arg(long, conflicts_with = "generate")]
    pub edge_list: Option<PathBuf>,
    /// Generate a random geometric network with this many nodes instead.
    #[arg(long)]
    pub generate: Option<usize>,
    /// Connection radius for generated networks.
    #[arg(long, default_value_t = 0.2075)]
    pub radius: f64,
    /// Append an ego node adjacent to every node and use it as the source/owner.
    #[arg(long)]
    pub ego: bool,
    /// Keep the ego node in the Laplacian (only `true` is supported).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub include_ego: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Hops,
    Resistance,
}

#[derive(Debug, Args)]
pub struct DistancesArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long, value_enum, default_value_t = MetricArg::Hops)]
    pub metric: MetricArg,
    #[arg(long, default_value_t = 0)]
    pub source: usize,
    /// Seed for generated networks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScheduleArg {
    /// Fitted so hop distances 1..9 map onto levels 15..0.5.
    Synthetic,
    /// exp(-3.3 d + 4).
    Ego,
    /// exp(a d + b) with --a and --b.
    Exponential,
}

#[derive(Debug, Args)]
pub struct DiffuseArgs {
    #[command(flatten)]
    pub network: NetworkArgs,
    #[arg(long, default_value_t = 0)]
    pub owner: usize,
    /// Private vector, comma separated (defaults to zeros of length --n).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub u: Option<Vec<f64>>,
    /// Dimension of the private vector.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum, default_value_t = MetricArg::Hops)]
    pub metric: MetricArg,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Synthetic)]
    pub schedule: ScheduleArg,
    /// Slope of an exponential schedule.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Intercept of an exponential schedule.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Project every response component onto {0, 1}.
    #[arg(long)]
    pub binary: bool,
    /// Responses CSV path; stdout when omitted.
    #[arg(long)]
    pub responses: Option<PathBuf>,
    /// Per-node error CSV path.
    #[arg(long)]
    pub errors: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Centralized,
    Gossip,
    Coalition,
    Baseline,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file (flat TOML).
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Centralized)]
    pub mode: Mode,
    /// Directory for output files.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Default,
    Full,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Default)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = privdiffuse::verify::SHIPPED_SEED)]
    pub seed: u64,
    /// Negative control: add 0.1 to every jump radius. The suite should fail.
    #[arg(long)]
    pub inject_bias: bool,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenNetworkArgs {
    #[arg(long, default_value_t = 150)]
    pub nodes: usize,
    #[arg(long, default_value_t = 0.2075)]
    pub radius: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge-list path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `node,x,y` CSV path.
    #[arg(long)]
    pub positions: Option<PathBuf>,
}
