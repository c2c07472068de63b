//! Command-line surface. Every flag can also be set from a `--config` file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shearadon::groups::AXIOM_TOLERANCE;
use shearadon::radon::{DEFAULT_NV, DEFAULT_VMAX};

#[derive(Debug, Parser)]
#[command(name = "shearadon", version, about = "Shearlet transforms through the affine Radon transform")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the group axioms of a dilation family.
    #[command(args_override_self = true)]
    GroupCheck(Job),
    /// Affine Radon transform of an image; writes an RSSG1 sinogram or CSV.
    #[command(args_override_self = true)]
    Radon(Job),
    /// Fourier slice residuals and the Parseval ratio of the unitary Radon map.
    #[command(args_override_self = true)]
    SliceCheck(Job),
    /// Shearlet coefficients on the dyadic lattice; writes an RSVC1 volume.
    #[command(args_override_self = true)]
    Shear(Job),
    /// Compare the direct and Radon-domain coefficient computations.
    #[command(args_override_self = true)]
    Compare(Job),
    /// Reconstruct an image from coefficients.
    #[command(args_override_self = true)]
    Reconstruct(Job),
    /// Admissibility constants of a mother shearlet.
    #[command(args_override_self = true)]
    Admissibility(Job),
}

impl Cli {
    pub fn job(&self) -> &Job {
        match &self.command {
            Command::GroupCheck(j)
            | Command::Radon(j)
            | Command::SliceCheck(j)
            | Command::Shear(j)
            | Command::Compare(j)
            | Command::Reconstruct(j)
            | Command::Admissibility(j) => j,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Phantom {
    /// `e^{-π|x|²}`, with a closed-form Radon transform.
    Gauss,
    /// Seeded sum of Gabor atoms with frequencies in the horizontal cone.
    ConeNoise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Correlation with the atoms in the frequency domain.
    Direct,
    /// Radon transform, per-column wavelet filtering and slope filtering.
    Radon,
    /// The Radon route starting from the Riesz-filtered sinogram.
    Riesz,
    /// Direct and Radon.
    Both,
    /// Direct, Radon and Riesz.
    All,
}

#[derive(Clone, Debug, Args)]
pub struct Job {
    /// Job file of `key=value` lines; command-line flags take precedence.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Input image (PGM or RSIM1), sinogram (RSSG1) or volume (RSVC1).
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Image format: pgm or f64raw; inferred from the extension when absent.
    #[arg(long)]
    pub format: Option<String>,
    /// Bundled phantom used when no input is given.
    #[arg(long, value_enum, default_value_t = Phantom::ConeNoise)]
    pub phantom: Phantom,
    /// Phantom side length in pixels (power of two).
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    /// Pixel size; defaults to 1/64 (1/32 for the Gaussian phantom).
    #[arg(long)]
    pub dx: Option<f64>,
    #[arg(long, default_value_t = 11)]
    pub seed: u64,

    /// Mother shearlet as `psi1|psi2` spectrum ids.
    #[arg(long, default_value = "meyer-annulus|meyer-bump")]
    pub mother: String,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    /// Finest dyadic scale index J: scales ±2^{-j} for j = 0..J.
    #[arg(long, default_value_t = 3)]
    pub levels: u32,
    /// Largest shear magnitude on the lattice.
    #[arg(long, default_value_t = 1.5)]
    pub smax: f64,
    /// Translation grid as a multiple of the image side.
    #[arg(long, default_value_t = 1)]
    pub lattice_pad: usize,
    #[arg(long, default_value_t = DEFAULT_VMAX)]
    pub vmax: f64,
    /// Number of slopes on the sinogram grid.
    #[arg(long, default_value_t = DEFAULT_NV)]
    pub nv: usize,
    /// Dilation family id for group-check, e.g. `toeplitz:d=5,lambda1=0.5`.
    #[arg(long, default_value = "standard:d=2,gamma=0.5")]
    pub family: String,
    /// Random samples per family in group-check.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, value_enum)]
    pub method: Option<Method>,

    /// Artifact path (RSSG1, RSVC1, RSIM1 or CSV plot data, per command).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Report CSV path; stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Rayon worker threads.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Group axiom residuals.
    #[arg(long, default_value_t = AXIOM_TOLERANCE)]
    pub tol_axiom: f64,
    /// Fourier slice residual.
    #[arg(long, default_value_t = 1e-2)]
    pub tol_slice: f64,
    /// `|‖Qf‖/‖f‖ - 1|`.
    #[arg(long, default_value_t = 2e-2)]
    pub tol_parseval: f64,
    /// `|Σ|coefficients|² / (C_ψ‖f‖²) - 1|`.
    #[arg(long, default_value_t = 0.1)]
    pub tol_energy: f64,
    /// Relative L² difference between coefficient volumes.
    #[arg(long, default_value_t = 1e-2)]
    pub tol_compare: f64,
    /// Relative L² reconstruction error from direct coefficients.
    #[arg(long, default_value_t = 5e-2)]
    pub tol_recon: f64,
    /// Relative L² reconstruction error from Radon-domain coefficients.
    #[arg(long, default_value_t = 7e-2)]
    pub tol_recon_radon: f64,
    /// Spectral residual of the Hilbert-derivative identity for ψ₁.
    #[arg(long, default_value_t = 1e-10)]
    pub tol_chi: f64,
}
