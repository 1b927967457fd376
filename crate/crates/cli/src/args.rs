//! Command-line surface.

use std::f64::consts::TAU;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "llspec", version, about = "Exact Lieb-Liniger spectra and their level statistics")]
pub struct Cli {
    /// Worker threads for sector builds (default: all cores).
    #[arg(long, env = "BSL_THREADS", global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one momentum sector and write it to a sector file.
    Spectrum(SpectrumArgs),
    /// Certify a sector against a larger cutoff.
    Saturate(SaturateArgs),
    /// Check energy shifts between momentum sectors.
    Symmetry(SymmetryArgs),
    /// Level statistics of a certified sector or a synthetic Poisson sequence.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Number of particles.
    #[arg(short = 'N', long = "particles")]
    pub n_particles: usize,

    #[command(flatten)]
    pub coupling: CouplingArgs,

    /// Ring length L.
    #[arg(long, default_value_t = TAU)]
    pub ring_length: f64,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct CouplingArgs {
    /// Interaction strength c.
    #[arg(long)]
    pub coupling: Option<f64>,

    /// Density over coupling n/c; converted with c = N / (L n/c).
    #[arg(long)]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Bethe residual tolerance (max-norm).
    #[arg(long, default_value_t = 1e-15)]
    pub tolerance: f64,

    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    /// Total momentum P (integer, in units of 2π/L).
    #[arg(short = 'P', long, allow_hyphen_values = true)]
    pub momentum: i64,

    /// Quantum-number cutoff: |m| < M.
    #[arg(short = 'M', long)]
    pub cutoff: i64,

    /// Keep only levels with E <= this value.
    #[arg(long)]
    pub energy_ceiling: Option<f64>,

    /// Accept a momentum outside the independent set {0, ..., (N-1)/2}.
    #[arg(long)]
    pub allow_redundant_momentum: bool,

    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SaturateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    #[arg(short = 'P', long, allow_hyphen_values = true)]
    pub momentum: i64,

    #[arg(short = 'M', long)]
    pub cutoff: i64,

    /// Comparison cutoff (default 2M).
    #[arg(long)]
    pub large_cutoff: Option<i64>,

    /// Energy agreement required between the two cutoffs.
    #[arg(long, default_value_t = 1e-10)]
    pub match_tol: f64,

    #[arg(long)]
    pub allow_redundant_momentum: bool,

    /// Directory for both sector files and the certificate.
    #[arg(short, long)]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SymmetryArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    /// Source momenta, each compared with P + kN for every k.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub momenta: Vec<i64>,

    /// Shifts k applied to every source momentum.
    #[arg(short = 'k', long = "k", value_delimiter = ',', allow_hyphen_values = true, default_value = "1")]
    pub shifts: Vec<i64>,

    /// Explicit pair FROM:TO; reflections are resolved automatically.
    #[arg(long = "pair", value_parser = parse_pair, allow_hyphen_values = true)]
    pub pairs: Vec<(i64, i64)>,

    /// Two sector files to compare instead of building sectors.
    #[arg(long, num_args = 2, value_names = ["FIRST", "SECOND"])]
    pub input: Vec<PathBuf>,

    #[arg(short = 'M', long, default_value_t = 20)]
    pub cutoff: i64,

    /// Certification cutoff (default 2M).
    #[arg(long)]
    pub large_cutoff: Option<i64>,

    /// Levels compared per pair.
    #[arg(long, default_value_t = 25)]
    pub max_levels: usize,

    /// Allowed |E_b - E_a - ν|.
    #[arg(long, default_value_t = 1e-9)]
    pub match_tol: f64,

    /// Write the comparison document here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Statistic {
    Lsd,
    Ratio,
    Delta3,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct StatsArgs {
    /// Sector file produced by `saturate` (or `spectrum`).
    #[arg(short, long, required_unless_present = "synthetic", conflicts_with = "synthetic")]
    pub input: Option<PathBuf>,

    /// Analyse this many synthetic Poisson levels instead.
    #[arg(long)]
    pub synthetic: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// First level index of the analysed window.
    #[arg(long, default_value_t = 0)]
    pub window_start: usize,

    /// Number of levels (default: everything available after the start).
    #[arg(long, alias = "max-levels")]
    pub window_count: Option<usize>,

    /// Drop levels closer than this to their predecessor.
    #[arg(long)]
    pub dedup_tol: Option<f64>,

    /// Analyse levels beyond the certified range; the report is marked UNCERTIFIED.
    #[arg(long)]
    pub allow_uncertified: bool,

    #[arg(long, value_enum, default_value_t = Statistic::All)]
    pub statistic: Statistic,

    /// Polynomial degree of the smooth staircase.
    #[arg(long, default_value_t = 2)]
    pub degree: usize,

    #[arg(long, default_value_t = 40)]
    pub bins: usize,

    #[arg(long, default_value_t = 4.0)]
    pub s_max: f64,

    /// Block size for windowed ⟨χ⟩.
    #[arg(long, default_value_t = 500)]
    pub ratio_window: usize,

    /// Window lengths: START:STOP:STEP or a comma list.
    #[arg(long, default_value = "0.25:5:0.25", value_parser = parse_grid)]
    pub w_grid: Grid,

    /// Window starts averaged per length (default: every feasible start).
    #[arg(long)]
    pub n_starts: Option<usize>,

    /// Range MIN:MAX for the linear fit Δ3 = γ0 W + γ1 (default: whole grid).
    #[arg(long, value_parser = parse_range)]
    pub fit_range: Option<(f64, f64)>,

    /// Range MIN:MAX for the log-log exponent fit.
    #[arg(long, value_parser = parse_range)]
    pub exponent_range: Option<(f64, f64)>,

    /// Directory for the report and its tables.
    #[arg(short, long)]
    pub output_dir: PathBuf,

    /// File stem for the report and its tables.
    #[arg(long, default_value = "stats")]
    pub stem: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

fn parse_pair(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once(':').ok_or("expected FROM:TO")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected MIN:MAX")?;
    let (a, b): (f64, f64) = (a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?);
    if !(b > a) {
        return Err("MAX must exceed MIN".into());
    }
    Ok((a, b))
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t}: {e}"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0 && b >= a) {
                return Err("grid needs STEP > 0 and STOP >= START".into());
            }
            // integer multiples keep the points free of accumulated rounding
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok(Grid((0..=n).map(|i| a + step * i as f64).collect()))
        }
        [_] => s.split(',').map(num).collect::<Result<_, _>>().map(Grid),
        _ => Err("expected START:STOP:STEP or a comma list".into()),
    }
}
