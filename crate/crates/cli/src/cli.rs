use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "geowass", version, about = "Sliced optimal transport with explicit maps")]
pub struct Cli {
    /// Worker threads for direction searches (0 = all cores).
    #[arg(long, global = true, env = "GEOWASS_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distance between two point clouds, printed as a JSON record.
    Distance(DistanceArgs),
    /// Particle gradient flow from a source cloud towards a target cloud.
    Flow(FlowArgs),
    /// Colorize a grayscale PNG with the palette of a color PNG.
    Colorize(ColorizeArgs),
    /// Rigid registration by iterative closest point.
    Icp(IcpArgs),
    /// Runtime scaling benchmark on synthetic Gaussian clouds.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceMethod {
    W2,
    Swgg,
    MinswggRs,
    MinswggSa,
    MinswggGd,
    Sw,
    Maxsw,
    Pwd,
    Sinkhorn,
}

impl DistanceMethod {
    pub fn is_stochastic(self) -> bool {
        !matches!(self, DistanceMethod::W2 | DistanceMethod::Swgg | DistanceMethod::Sinkhorn)
    }
}

/// Search and smoothing knobs shared by several commands.
#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Number of random directions.
    #[arg(short = 'L', long = "directions", default_value_t = 100)]
    pub directions: usize,
    /// Copies per atom in the smoothed surrogate.
    #[arg(long = "s", default_value_t = 10)]
    pub copies: usize,
    /// Smoothing noise parameter (per-copy deviation is sqrt(eps)/2).
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    /// Learning rate for gradient schemes.
    #[arg(long, default_value_t = 5e-2)]
    pub lr: f64,
    /// Iterations for gradient schemes, annealing and Sinkhorn.
    #[arg(long)]
    pub iters: Option<usize>,
    /// Random seed; required by every stochastic method.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    pub source: PathBuf,
    pub target: PathBuf,
    #[arg(long, value_enum)]
    pub method: DistanceMethod,
    /// Direction for `swgg`, comma separated; normalized before use.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub theta: Option<Vec<f64>>,
    /// Entropic regularization for `sinkhorn`.
    #[arg(long, default_value_t = 0.1)]
    pub reg: f64,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Write the JSON record here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FlowArgs {
    pub source: PathBuf,
    pub target: PathBuf,
    /// sw, max_sw, pwd, minswgg_random or minswgg_optim.
    #[arg(long, visible_alias = "method")]
    pub loss: String,
    /// Number of particle steps.
    #[arg(long, visible_alias = "iters", default_value_t = 500)]
    pub steps: usize,
    /// Particle learning rate.
    #[arg(long, default_value_t = 1.0)]
    pub lr: f64,
    /// Number of directions for sw, pwd and minswgg_random.
    #[arg(short = 'L', long = "directions", default_value_t = 50)]
    pub directions: usize,
    /// Copies per atom for minswgg_optim.
    #[arg(long = "s", default_value_t = 10)]
    pub copies: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    /// Learning rate of the inner direction search (max_sw, minswgg_optim).
    #[arg(long, default_value_t = 5e-2)]
    pub search_lr: f64,
    /// Iterations of the inner direction search.
    #[arg(long, default_value_t = 100)]
    pub search_iters: usize,
    #[arg(long)]
    pub seed: u64,
    /// Trace every this many steps.
    #[arg(long, default_value_t = 10)]
    pub trace_every: usize,
    /// Reuse the directions of the first step instead of redrawing them.
    #[arg(long)]
    pub fixed_directions: bool,
    /// Trace CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Final particle positions as CSV.
    #[arg(long = "final")]
    pub final_cloud: Option<PathBuf>,
    /// SVG chart of log10 W2 along the trace.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ColorizeArgs {
    /// Grayscale source image (or any image with --transfer).
    pub source: PathBuf,
    /// Image providing the colors.
    pub palette: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// General color transfer on subsampled palettes; accepts non-gray sources.
    #[arg(long)]
    pub transfer: bool,
    /// Palette subsample size for --transfer.
    #[arg(long, default_value_t = 1024)]
    pub subsample: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IcpMethod {
    Nn,
    #[value(name = "exact_ot")]
    ExactOt,
    Minswgg,
    #[value(name = "minswgg_optim")]
    MinswggOptim,
}

#[derive(Debug, Args)]
pub struct IcpArgs {
    /// Source and target CSVs; omitted in benchmark mode.
    pub clouds: Vec<PathBuf>,
    /// Correspondence scheme; comma separated in benchmark mode.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "minswgg")]
    pub method: Vec<IcpMethod>,
    /// Maximum number of ICP iterations.
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    /// Stop when ‖Ω − I‖_F + ‖t‖ falls below this.
    #[arg(long, default_value_t = 1e-4)]
    pub eps_stop: f64,
    /// Report the final Sinkhorn divergence with this regularization.
    #[arg(long)]
    pub sinkhorn_reg: Option<f64>,
    /// Iteration cap for the Sinkhorn divergence.
    #[arg(long, default_value_t = 10_000)]
    pub sinkhorn_iters: usize,
    /// Synthetic rigid benchmark instead of input files.
    #[arg(long)]
    pub benchmark: bool,
    /// Benchmark cloud size.
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    /// Number of benchmark instances (seeds seed, seed+1, ...).
    #[arg(long, default_value_t = 1)]
    pub instances: u64,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Diagnostics CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON summary of the final transform (stderr when omitted).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Methods to time: w2, minswgg-rs, minswgg-gd, sw, maxsw, pwd.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "minswgg-rs,sw")]
    pub methods: Vec<DistanceMethod>,
    /// Cloud sizes.
    #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,50000,100000")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Timing repetitions per cell (the fastest is reported).
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
