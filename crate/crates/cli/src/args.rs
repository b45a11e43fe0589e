use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "calmix",
    version,
    about = "Exact laws of calibrated measurements: fits, densities, regions, power and simulation"
)]
pub struct Cli {
    /// JSON run configuration; flags win on conflict.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Decimal places for every number in the report.
    #[arg(long, global = true, default_value_t = 6,
          value_parser = clap::value_parser!(u8).range(4..=15))]
    pub precision: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Least-squares calibration line from a CSV with columns x,u.
    Fit {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Also report mixture parameters for this many new readings.
        #[arg(long)]
        n: Option<usize>,
        /// Mean of the new raw readings.
        #[arg(long, requires = "n")]
        mu_z: Option<f64>,
        #[arg(long, requires = "n", default_value_t = 1.0)]
        sigma_z: f64,
    },
    /// Density and CDF of a mixture law on a grid of points.
    Density {
        #[arg(long, value_enum)]
        dist: DistKind,
        #[command(flatten)]
        law: LawArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// Null value of the mean, for the t² laws.
        #[arg(long, allow_negative_numbers = true)]
        mu_y0: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        from: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        to: Option<f64>,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Moments of the calibrated mean and the bias of the sample variance.
    Moments {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, allow_negative_numbers = true)]
        mu_y0: Option<f64>,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Equal-tail probability region, optionally with the probability of a
    /// given interval.
    Region {
        #[arg(long, value_enum)]
        dist: RegionDist,
        #[arg(long, default_value_t = 0.95)]
        coverage: f64,
        /// Interval `lo,hi` in the units of the chosen statistic.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        interval: Vec<f64>,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Non-rejection probabilities of the t² test over a (δ, λ) grid.
    PowerTable {
        #[arg(long)]
        nu: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        delta: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Monte Carlo summaries of calibrated samples.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        mc: McArgs,
        /// Run the t² test against this null mean in every replication.
        #[arg(long, allow_negative_numbers = true)]
        mu_y0: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Sample sizes for the variance-of-the-mean curve.
        #[arg(long, value_delimiter = ',')]
        curve: Vec<usize>,
        /// Write one simulated statistic per replication to this CSV.
        #[arg(long)]
        raw: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = StatKind::Mean)]
        statistic: StatKind,
        /// Compare the simulated statistic with its exact law.
        #[arg(long)]
        ks: bool,
        /// CDF evaluations every this many order statistics in the KS check.
        #[arg(long, default_value_t = 50)]
        ks_stride: usize,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// Residual diagnostics of a CSV column, optionally with the blindness
    /// comparison of calibrated and raw samples.
    Diagnose {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value = "y")]
        column: String,
        #[arg(long)]
        blindness: bool,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        mc: McArgs,
    },
    /// One-way analysis of grouped data (columns group,y) and of a design.
    Anova {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        means: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        sds: Vec<f64>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        quad: QuadArgs,
    },
    /// The octane case study: moments, regions, variance bias and the
    /// operating characteristic from the reference parameters.
    CaseStudy {
        /// Table of calibration readings to refit next to the reference values.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 0.95)]
        coverage: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Distance of the alternative from the null mean.
        #[arg(long, default_value_t = 1.0)]
        shift: f64,
        #[command(flatten)]
        quad: QuadArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistKind {
    Mean,
    Variance,
    Tsq,
    SignedT,
    CalibratedTsq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionDist {
    /// Calibrated sample mean.
    Mean,
    /// `ν S² / (σ1² σ_Z²)`.
    Variance,
    /// Sample variance `S²`.
    S2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatKind {
    Mean,
    S2,
    ScaledVariance,
    Tsq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Octane,
    Unit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeKind {
    Coefficient,
    Full,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Named parameter set: `octane` (reference case study) or `unit`.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta0: Option<f64>,
    #[arg(long)]
    pub sigma0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mu_z: Option<f64>,
    #[arg(long)]
    pub sigma_z: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub sigma1: Option<f64>,
}

/// Direct law parameters; when `--nu` is given the law is built from these
/// instead of mixture parameters.
#[derive(Debug, Clone, Default, Args)]
pub struct LawArgs {
    #[arg(long)]
    pub nu: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda0: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct QuadArgs {
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Half-width of the slope mixing window in standard deviations.
    #[arg(long)]
    pub mixing_range: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct McArgs {
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeKind>,
    /// Calibration design for `--mode full`: CSV with column x.
    #[arg(long)]
    pub design: Option<PathBuf>,
    #[arg(long)]
    pub sigma_u: Option<f64>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
}
