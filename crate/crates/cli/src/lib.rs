//! `rdmgeom` command-line frontend: parameter sweeps, random-state clouds,
//! observable-direction scans and exponent fits, written as dataset files.

pub mod commands;
pub mod grid;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rdmgeom::spin::Boundary;
use rdmgeom::ModelTag;

pub use commands::{run, CliError, Outcome};
pub use grid::{GridSpec, Window};

/// Exit status for runs where every requested item was produced.
pub const EXIT_OK: u8 = 0;
/// Runtime failure, or some grid cells could not be evaluated.
pub const EXIT_FAILURE: u8 = 1;
/// Bad flags or arguments.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "rdmgeom", version, about = "Geometry of local expectation-value sets")]
pub struct RunConfig {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "RDMGEOM_WORKERS", default_value_t = 0)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep support points of a model over a parameter grid.
    Surface(SurfaceArgs),
    /// Expectation values of random translation-invariant MPS.
    Scatter(ScatterArgs),
    /// Longest hull edge as the order parameter rotates from X to Y.
    Opscan(OpscanArgs),
    /// Power-law fit of the order parameter near the critical point.
    Exponent(ExponentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryArg {
    Periodic,
    Open,
}

impl From<BoundaryArg> for Boundary {
    fn from(b: BoundaryArg) -> Self {
        match b {
            BoundaryArg::Periodic => Boundary::Periodic,
            BoundaryArg::Open => Boundary::Open,
        }
    }
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    /// spin0d, spin1d, spinMF, classical2d or bose3d.
    #[arg(long)]
    pub model: ModelTag,

    /// Spin coupling grid. Spin grids give the per-site energy
    /// `-J⟨XX⟩ - B_z⟨Z⟩ - B_x⟨X⟩`; for spin0d the pair Hamiltonian carries `B/2`.
    #[arg(long = "J", default_value = "1", allow_hyphen_values = true)]
    pub j: GridSpec,
    /// Spin transverse field grid.
    #[arg(long = "Bz", default_value = "1", allow_hyphen_values = true)]
    pub bz: GridSpec,
    /// Spin longitudinal field grid.
    #[arg(long = "Bx", default_value = "0", allow_hyphen_values = true)]
    pub bx: GridSpec,
    /// Temperature grid (classical2d, bose3d).
    #[arg(long = "T")]
    pub t: Option<GridSpec>,
    /// Classical field grid.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub h: GridSpec,
    /// Bose source grid.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub v: GridSpec,

    /// Use this many quasi-uniform directions instead of the parameter grid.
    #[arg(long)]
    pub sphere: Option<usize>,

    /// Chain length for spin1d.
    #[arg(long = "N", default_value_t = 12)]
    pub sites: usize,
    #[arg(long, value_enum, default_value = "periodic")]
    pub boundary: BoundaryArg,
    /// Cylinder width for classical2d.
    #[arg(long = "W", default_value_t = 12)]
    pub width: usize,
    /// Random restarts for spinMF.
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScatterArgs {
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long = "Dmin", default_value_t = 2)]
    pub d_min: usize,
    #[arg(long = "Dmax", default_value_t = 10)]
    pub d_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Add exact-diagonalization ground states with `B_x = ±eps`.
    #[arg(long)]
    pub augment: bool,
    /// Transverse fields of the added ground states.
    #[arg(long = "augment-Bz", default_value = "0.2")]
    pub augment_bz: GridSpec,
    #[arg(long = "augment-J", default_value_t = 1.0)]
    pub augment_j: f64,
    #[arg(long = "N", default_value_t = 12)]
    pub sites: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,

    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OpscanArgs {
    /// Cloud file with a `y` column.
    #[arg(long)]
    pub cloud: PathBuf,
    /// Angles in [0, π]; defaults to 64 uniform angles in [0, π).
    #[arg(long)]
    pub thetas: Option<GridSpec>,
    /// Golden-section steps around the coarse maximum.
    #[arg(long, default_value_t = 0)]
    pub refine: usize,

    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExponentArgs {
    /// Branch file from `surface` (pfeuty_plus.csv, onsager_plus.csv, condensate_plus.csv, ...).
    #[arg(long)]
    pub surface: PathBuf,
    /// `lo:hi`; the field `h` for spin data, `T/T_c` for thermal data.
    #[arg(long)]
    pub window: Window,

    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}
