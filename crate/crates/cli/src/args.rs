use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

/// Coalescence determinants, gap laws and simulations of coalescing walks.
#[derive(Debug, Parser)]
#[command(name = "coalesce", version, about)]
pub struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true, env = "COALESCE_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeModel {
    CtSimpleWalk,
    ParityWalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntensityModel {
    Brownian,
    CtSimpleWalk,
    ParityWalk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Oracle,
    Montecarlo,
    Quadrature,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lattice gap intensities and pmf.
    GapPmf {
        #[arg(long, value_enum)]
        model: LatticeModel,
        /// Horizon (whole steps for the parity walk).
        #[arg(long = "T")]
        horizon: f64,
        /// Largest gap to tabulate.
        #[arg(long, default_value_t = 40)]
        gmax: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brownian gap density table and constants.
    Rayleigh {
        #[arg(long, default_value_t = 6.0)]
        gmax: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Joint density of adjacent Brownian gaps on a mesh, plus the correlation.
    JointGap {
        #[arg(long, default_value_t = 56)]
        grid_rows: usize,
        #[arg(long, default_value_t = 2.5)]
        gmax: f64,
        /// Relative quadrature tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Joint CDF of coalescing walkers from fixed starts.
    Warren {
        #[arg(long, value_enum)]
        model: LatticeModel,
        #[arg(long = "T")]
        horizon: f64,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        starts: Vec<i64>,
        /// Integers or `inf`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        thresholds: Vec<String>,
        /// Also estimate by Monte Carlo with this many replicates.
        #[arg(long)]
        mc: Option<u64>,
        /// Required with `--mc`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Wall-particle intensity `det M₀`, or its half-line version.
    Intensity {
        #[arg(long, value_enum, default_value = "brownian")]
        model: IntensityModel,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        walls: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        survivors: Vec<f64>,
        #[arg(long = "T")]
        horizon: f64,
        /// Reflected Brownian motions on `[0, ∞)`.
        #[arg(long)]
        halfline: bool,
    },
    /// Monte Carlo run described by a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Histogram bin width in lattice sites.
        #[arg(long, default_value_t = 1)]
        bin_width: i64,
    },
    /// Acceptance checks.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
    },
}
