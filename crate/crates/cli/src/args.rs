use std::path::PathBuf;

use aluthge_core::analysis::Perturbation;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::spec::Format;

#[derive(Debug, Parser)]
#[command(
    name = "aluthge",
    version,
    about = "Aluthge transform iteration laboratory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a generated operator as matrix JSON.
    Gen(GenArgs),
    /// Iterate the transform to its limit; writes summary and trace.
    Iterate(IterateArgs),
    /// Compare spectra of an operator and its limit (or a second matrix).
    Spectrum(SpectrumArgs),
    /// Gelfand and iteration-based spectral-radius estimates.
    Radius(RadiusArgs),
    /// Split the spectrum at a circle |z| = threshold.
    Split(SplitArgs),
    /// Displacement of the transform under random perturbations.
    Continuity(ContinuityArgs),
    /// Iterate nested finite sections and compare their limits.
    Sections(SectionsArgs),
    /// Run the acceptance battery and write a consolidated report.
    Suite(SuiteArgs),
}

/// Flags shared by every verb.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Matrix JSON, family descriptor or experiment file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output file (directory for `iterate` and `suite`); stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Step tolerance, relative to max(1, ‖T‖).
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Dimension at which a bare family descriptor is instantiated.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Shift,
    Jordan,
    Diagonal,
    RandomCompact,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    /// Explicit sequence (weights, diagonal or singular values).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub values: Option<Vec<f64>>,
    /// Sequence rule: harmonic[:power], geometric:ratio or constant:value.
    #[arg(long)]
    pub rule: Option<String>,
    /// Jordan eigenvalue as re[,im].
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Option<Vec<f64>>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct IterateArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Compare against this matrix instead of the iteration limit.
    #[arg(long)]
    pub other: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct RadiusArgs {
    #[arg(long, default_value_t = 64)]
    pub n_max: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub threshold: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ContinuityArgs {
    /// Strictly descending perturbation sizes.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1e-2,1e-3,1e-4,1e-5,1e-6,1e-7,1e-8"
    )]
    pub epsilons: Vec<f64>,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, value_enum, default_value = "dense")]
    pub perturbation: PerturbationArg,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PerturbationArg {
    Dense,
    Compact,
}

impl From<PerturbationArg> for Perturbation {
    fn from(p: PerturbationArg) -> Self {
        match p {
            PerturbationArg::Dense => Perturbation::Dense,
            PerturbationArg::Compact => Perturbation::Compact,
        }
    }
}

#[derive(Debug, Args)]
pub struct SectionsArgs {
    /// Strictly increasing truncation dimensions.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// Run only these criteria (1-11); all by default.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<u8>>,
    #[command(flatten)]
    pub common: Common,
}
