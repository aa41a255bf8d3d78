use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qsource_core::Energy;

use crate::units;

/// Matter waves from quantum sources in a uniform force field.
#[derive(Parser, Debug)]
#[command(name = "qsource", version, args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Total current J against energy (photodetachment) or detuning (atom laser).
    TotalCurrent(TotalCurrentArgs),
    /// Current density j_z across a plane downstream of the source.
    DensityProfile(ProfileArgs),
    /// Raster image of j_z on a detector plane.
    DetectorImage(ImageArgs),
    /// Remaining condensate atoms after outcoupling.
    AtomLaser(AtomLaserArgs),
    /// Exact against slicing total currents for a family of source widths.
    Transition(TransitionArgs),
    /// Numerical self-checks.
    Validate(ValidateArgs),
}

impl Command {
    pub fn common(&self) -> &Common {
        match self {
            Command::TotalCurrent(a) => &a.common,
            Command::DensityProfile(a) => &a.common,
            Command::DetectorImage(a) => &a.common,
            Command::AtomLaser(a) => &a.common,
            Command::Transition(a) => &a.common,
            Command::Validate(a) => &a.common,
        }
    }
}

/// Comma-separated list of lengths (m).
#[derive(Clone, Debug, PartialEq)]
pub struct Lengths(pub Vec<f64>);

fn parse_lengths(s: &str) -> Result<Lengths, String> {
    units::length_list(s).map(Lengths)
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum PresetName {
    SMinus,
    OMinus,
    RbAtomLaser,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Pgm,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    SumRule,
    Oracle,
    Flux,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output file; relative paths resolve against $QSOURCE_OUTPUT_DIR when set.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
    /// Output format (default: from the file extension).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Maximum number of worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON file whose keys are flag names; flags on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Preset selection and physical overrides.
#[derive(Args, Debug, Clone)]
pub struct Physics {
    #[arg(long, value_enum)]
    pub preset: Option<PresetName>,
    /// Field strength, e.g. `423V/m` (photodetachment presets).
    #[arg(long, value_parser = units::field)]
    pub field: Option<f64>,
    /// Particle mass, e.g. `86.909u`.
    #[arg(long, value_parser = units::mass)]
    pub mass: Option<f64>,
    /// Gravitational acceleration, e.g. `9.81m/s2` (atom-laser preset).
    #[arg(long, value_parser = units::acceleration)]
    pub g: Option<f64>,
    /// Gaussian source width, e.g. `0.4um` (atom-laser preset).
    #[arg(long, value_parser = units::length)]
    pub width: Option<f64>,
    /// Outcoupling strength as `Ω/2π`, e.g. `105.585Hz`, or in `rad/s`.
    #[arg(long, value_parser = units::coupling)]
    pub omega: Option<f64>,
    /// Point-source strength |C|² as a dimensionless scale factor.
    #[arg(long)]
    pub strength: Option<f64>,
    /// Map detuning ν to energy −2πħν instead of +2πħν.
    #[arg(long)]
    pub flip_detuning: bool,
}

#[derive(Args, Debug)]
pub struct TotalCurrentArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Lower end of the energy scan, e.g. `-50ueV`.
    #[arg(long, allow_hyphen_values = true, value_parser = units::energy)]
    pub emin: Option<Energy>,
    #[arg(long, allow_hyphen_values = true, value_parser = units::energy)]
    pub emax: Option<Energy>,
    /// Lower end of the detuning scan, e.g. `-20kHz`.
    #[arg(long, allow_hyphen_values = true, value_parser = units::frequency)]
    pub numin: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = units::frequency)]
    pub numax: Option<f64>,
    /// Number of grid points.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Also write the slicing approximation to `<stem>.overlay.<ext>`.
    #[arg(long)]
    pub overlay: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ProfileArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Energy, or detuning for the atom laser, e.g. `100.5ueV` or `2.5kHz`.
    #[arg(long, allow_hyphen_values = true, value_parser = units::energy)]
    pub energy: Option<Energy>,
    /// Height of the plane above the source.
    #[arg(long, value_parser = units::length)]
    pub z: Option<f64>,
    /// Half-width of the profile (default: beyond the outermost fringe).
    #[arg(long, value_parser = units::length)]
    pub half_width: Option<f64>,
    #[arg(long, default_value_t = 1001)]
    pub n: usize,
    /// Radial profile j_z(ρ), ρ ≥ 0, instead of a symmetric lateral cut.
    #[arg(long)]
    pub radial: bool,
    /// One profile per width, written to `<stem>.a<width>nm.<ext>`.
    #[arg(long, value_parser = parse_lengths)]
    pub widths: Option<Lengths>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ImageArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long, allow_hyphen_values = true, value_parser = units::energy)]
    pub energy: Option<Energy>,
    #[arg(long, value_parser = units::length)]
    pub z: Option<f64>,
    #[arg(long, value_parser = units::length)]
    pub half_width: Option<f64>,
    /// Image size in pixels along each side.
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct AtomLaserArgs {
    #[command(flatten)]
    pub physics: Physics,
    #[arg(long, allow_hyphen_values = true, value_parser = units::frequency)]
    pub numin: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = units::frequency)]
    pub numax: Option<f64>,
    #[arg(long, default_value_t = 801)]
    pub n: usize,
    /// Operation time, e.g. `20ms`.
    #[arg(long, value_parser = units::time)]
    pub time: Option<f64>,
    /// Initial atom number; the default 1 reports fractions.
    #[arg(long)]
    pub n0: Option<f64>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct TransitionArgs {
    #[command(flatten)]
    pub physics: Physics,
    /// Source widths, e.g. `0.2um,0.4um,1.6um`.
    #[arg(long, value_parser = parse_lengths)]
    pub widths: Option<Lengths>,
    #[arg(long, allow_hyphen_values = true, value_parser = units::frequency)]
    pub numin: Option<f64>,
    #[arg(long, allow_hyphen_values = true, value_parser = units::frequency)]
    pub numax: Option<f64>,
    #[arg(long, default_value_t = 1101)]
    pub n: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[command(flatten)]
    pub common: Common,
}
