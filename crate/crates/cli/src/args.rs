use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "satrrm", version, about = "Radio resource management for multibeam satellites")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random scenario file.
    Gen(GenArgs),
    /// Assign carriers and power.
    Solve(SolveArgs),
    /// Schedule users into precoded slots and ModCod frames.
    Schedule(ScheduleArgs),
    /// Design a beam-hopping illumination pattern.
    Bh(BhArgs),
    /// Evaluate a plan against its scenario.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LayoutArg {
    Hex,
    Line,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 7)]
    pub beams: usize,
    #[arg(long, default_value_t = 4)]
    pub carriers: usize,
    #[arg(long, value_enum, default_value_t = LayoutArg::Hex)]
    pub layout: LayoutArg,
    /// Distance between neighbouring beam centers, in beamwidths.
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    /// Total satellite power in watts.
    #[arg(long, default_value_t = 100.0)]
    pub power: f64,
    #[arg(long, default_value_t = 50e6)]
    pub demand_min: f64,
    #[arg(long, default_value_t = 500e6)]
    pub demand_max: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SolveMethod {
    Coloring,
    Alternating,
    Bruteforce,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RelaxationArg {
    Hungarian,
    RelaxRound,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(short, long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = SolveMethod::Alternating)]
    pub method: SolveMethod,
    #[arg(long, value_enum, default_value_t = RelaxationArg::Hungarian)]
    pub relaxation: RelaxationArg,
    #[arg(long, default_value_t = 10)]
    pub max_outer_iters: usize,
    #[arg(long, default_value_t = 50)]
    pub sca_max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub sca_tolerance: f64,
    /// Power levels per slot for the exhaustive search, zero included.
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    /// Write the per-iteration USC trace of `alternating` as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[arg(short, long)]
    pub scenario: PathBuf,
    /// Seed for user positions and channel phases.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// RZF regularization; defaults to L times mean noise over total power.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 3)]
    pub rounds: usize,
    /// Semi-orthogonality threshold.
    #[arg(long, default_value_t = 0.4)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 2)]
    pub frame_size: usize,
    /// CSV table `threshold_db,spectral_efficiency`; a synthetic demo table when omitted.
    #[arg(long)]
    pub modcod: Option<PathBuf>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BhMethod {
    Proportional,
    Lp,
    Bruteforce,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SequencingArg {
    Interleaved,
    Blocked,
}

#[derive(Debug, Args)]
pub struct BhArgs {
    #[arg(short, long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = BhMethod::Lp)]
    pub method: BhMethod,
    /// Slots per window.
    #[arg(long, default_value_t = 12)]
    pub slots: usize,
    /// Slot duration in seconds.
    #[arg(long, default_value_t = 1e-3)]
    pub slot_duration: f64,
    #[arg(long, default_value_t = 2)]
    pub max_active: usize,
    /// Smallest center distance between beams lit together.
    #[arg(long, default_value_t = 1.5)]
    pub min_distance: f64,
    #[arg(long, default_value_t = satrrm::beam_hopping::DEFAULT_SNAPSHOT_CAP)]
    pub snapshot_cap: usize,
    /// JSON list of beam-id lists, used instead of enumeration.
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SequencingArg::Interleaved)]
    pub sequencing: SequencingArg,
    #[arg(long)]
    pub max_switches: Option<usize>,
    #[arg(long)]
    pub max_gap: Option<usize>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(short, long)]
    pub scenario: PathBuf,
    /// Plan file written by `solve`.
    #[arg(long)]
    pub plan: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}
