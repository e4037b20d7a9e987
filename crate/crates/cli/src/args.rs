use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "weakpdc", version, about = "Joint weak measurement of complementary quadratures with a down-conversion coupling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one configuration through closed-form, first-order and exact tiers.
    Run(RunArgs),
    /// Run a Cartesian grid over one or two parameters.
    Sweep(SweepArgs),
    /// Recover weak values from measured shifts of two or more meter preparations.
    Invert(InvertArgs),
    /// Run the invariant suite with fixed seeds.
    Check(CheckArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PostselectArg {
    Ideal,
    Threshold,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    /// Output file; written atomically. Defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Flags overriding the JSON config, one per config key.
#[derive(Args, Debug, Clone, Default)]
pub struct SetupArgs {
    /// JSON file with flat keys named like the flags (snake_case).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cutoff of both system modes.
    #[arg(long)]
    pub cutoff_s: Option<usize>,
    /// Base meter cutoff, scaled up by the meter's squeezing.
    #[arg(long)]
    pub cutoff_d: Option<usize>,
    #[arg(long)]
    pub g: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_im: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub meter_dq: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub meter_q0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub meter_p0: Option<f64>,
    /// Rotation of the meter's squeezing ellipse (radians).
    #[arg(long, allow_hyphen_values = true)]
    pub meter_angle: Option<f64>,
    #[arg(long, value_enum)]
    pub postselect: Option<PostselectArg>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Readout count used for the SNR columns.
    #[arg(long)]
    pub n_readouts: Option<u64>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub setup: SetupArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub setup: SetupArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// AXIS:MIN:MAX:COUNT:lin|log, given once or twice.
    #[arg(long = "sweep", required = true)]
    pub sweep: Vec<String>,
    /// Run the two-preparation inversion at every point instead of a single run.
    #[arg(long)]
    pub protocol: bool,
    /// First meter spread of the inversion protocol.
    #[arg(long, default_value_t = std::f64::consts::FRAC_1_SQRT_2)]
    pub dq1: f64,
    /// Second meter spread of the inversion protocol.
    #[arg(long, default_value_t = 0.4)]
    pub dq2: f64,
}

#[derive(Args, Debug)]
pub struct InvertArgs {
    /// Shift records: JSON array or CSV with columns delta_q_meter_prep,dq,dp.
    #[arg(long)]
    pub records: PathBuf,
    #[arg(long)]
    pub g: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Force every truncation-sensitive cutoff to this value.
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long, default_value_t = weakpdc::checks::DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}
