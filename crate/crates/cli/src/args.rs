use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "rpas", about = "RPAS command-link reliability laboratory")]
pub struct Cli {
    /// Base directory for relative output paths.
    #[arg(long, global = true, env = "RPAS_OUT_DIR")]
    pub out_dir: Option<PathBuf>,

    /// Suppress progress messages on standard error.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wings-level trim; prints one CSV row.
    Trim(TrimArgs),
    /// One closed-loop mission; prints its record. Exit 2 if the mission fails.
    Simulate(SimulateArgs),
    /// Monte Carlo sweep over availability and latency; writes the records CSV.
    Sweep(SweepArgs),
    /// Success-rate and completion-time surface from a records CSV.
    Aggregate(AggregateArgs),
    /// Success rate against communicability, per latency interval.
    Curves(CurvesArgs),
    /// Latency blockage report at full availability.
    Blockage(BlockageArgs),
    /// Communication performance metrics.
    #[command(subcommand)]
    Rcp(RcpCommand),
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// Aircraft parameter file (defaults to the bundled F-16 data).
    #[arg(long)]
    pub params: Option<PathBuf>,
    /// Controller configuration file (defaults to the bundled gains).
    #[arg(long)]
    pub controller: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrimArgs {
    /// True airspeed (ft/s).
    #[arg(long, default_value_t = 540.0)]
    pub vt: f64,
    /// Altitude (ft).
    #[arg(long, default_value_t = 4000.0)]
    pub alt: f64,
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON file, or `scenario1` / `scenario2` for the bundled ones.
    pub scenario: String,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub pa: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub eps: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// failsafe, failsafe-zero-throttle or zero-control.
    #[arg(long, default_value = "failsafe")]
    pub loss_policy: String,
    /// Override the scenario time limit (s).
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Write the per-step trajectory CSV here.
    #[arg(long)]
    pub traj_out: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub scenario: String,
    /// Sweep configuration JSON; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: available hardware parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub loss_policy: Option<String>,
    /// Records CSV path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct BinArgs {
    #[arg(long, default_value_t = 10)]
    pub pa_bins: usize,
    #[arg(long, default_value_t = 10)]
    pub eps_bins: usize,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.5, 1.0])]
    pub pa_range: Vec<f64>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.0, 0.1])]
    pub eps_range: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// Records CSV produced by `sweep`.
    pub records: PathBuf,
    #[command(flatten)]
    pub bins: BinArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurvesArgs {
    pub records: PathBuf,
    /// Link bitrate (bit/s).
    #[arg(long, default_value_t = 2400.0)]
    pub bitrate: f64,
    /// Message size (bits).
    #[arg(long, default_value_t = 448.0)]
    pub size_bits: f64,
    /// Number of equal latency intervals.
    #[arg(long, default_value_t = 5)]
    pub eps_intervals: usize,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.0, 0.1])]
    pub eps_range: Vec<f64>,
    /// Number of equal communicability bins over `--pcomm-range`.
    #[arg(long, default_value_t = 20)]
    pub pcomm_bins: usize,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.0, 1.0])]
    pub pcomm_range: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BlockageArgs {
    /// Scenario to sweep (file or bundled name).
    #[arg(long, conflicts_with = "records", required_unless_present = "records")]
    pub scenario: Option<String>,
    /// Analyse an existing records CSV instead of running missions. A latency
    /// counts as a success when every record at it succeeded.
    #[arg(long)]
    pub records: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-3)]
    pub eps_step: f64,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.0, 0.1])]
    pub eps_range: Vec<f64>,
    #[arg(long, default_value = "failsafe")]
    pub loss_policy: String,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Subcommand)]
pub enum RcpCommand {
    /// P_A * exp(-(1 - P_A) (tau_msg + eps)).
    Communicability {
        #[arg(long, allow_negative_numbers = true)]
        pa: f64,
        /// Message duration (s); alternatively give --bits and --bitrate.
        #[arg(long, allow_negative_numbers = true, required_unless_present = "bits")]
        tau: Option<f64>,
        #[arg(long, requires = "bitrate", conflicts_with = "tau")]
        bits: Option<f64>,
        #[arg(long, requires = "bits")]
        bitrate: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        eps: f64,
        /// Evaluate by quadrature instead of the closed form.
        #[arg(long)]
        numeric: bool,
    },
    /// Steady-state availability lambda_on / (lambda_on + lambda_off).
    Steady {
        #[arg(long, allow_negative_numbers = true)]
        lon: f64,
        #[arg(long, allow_negative_numbers = true)]
        loff: f64,
    },
    /// Probability of being on at time t, starting on.
    Availability {
        #[arg(long, allow_negative_numbers = true)]
        lon: f64,
        #[arg(long, allow_negative_numbers = true)]
        loff: f64,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// Probability that an available link stays on for tau seconds.
    Continuity {
        #[arg(long, allow_negative_numbers = true)]
        lon: f64,
        #[arg(long, allow_negative_numbers = true)]
        loff: f64,
        #[arg(long, allow_negative_numbers = true)]
        tau: f64,
    },
    /// Message duration size / bitrate.
    TauMsg {
        #[arg(long, allow_negative_numbers = true)]
        bits: f64,
        #[arg(long, allow_negative_numbers = true)]
        bitrate: f64,
    },
}
