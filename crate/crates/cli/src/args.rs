use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "genzernike", version, about = "Generalized Zernike functions: evaluation, transforms, fields and fitting")]
pub struct Cli {
    /// JSON job file; command-line flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for parallel evaluation.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Numerical tolerance (field integrals, series tails).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Run the oracle comparisons for the command's module.
    #[arg(long, global = true)]
    pub selftest: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(ValueEnum, Serialize, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Evaluate one mode at a point of the disk.
    Eval(EvalArgs),
    /// Tabulate a radial profile on a uniform rho grid.
    RadialTable(RadialTableArgs),
    /// Fourier transform of an expansion on a grid.
    FourierField(FieldArgs),
    /// Radon transform of an expansion on a (tau, psi) grid.
    RadonSinogram(SinogramArgs),
    /// Through-focus field of a pupil expansion.
    PsfStack(PsfArgs),
    /// Radiation quantities of a baffled piston with a generalized profile.
    Acoustics(AcousticsArgs),
    /// Fit coefficients to samples on the disk.
    FitDisk(FitArgs),
    /// Fit coefficients to a sinogram.
    FitRadon(FitArgs),
    /// Fit velocity coefficients to a near-field pressure plane.
    FitNearfield(NearfieldArgs),
    /// Convert a coefficient file between bases.
    ConvertBasis(ConvertArgs),
}

pub const COMMANDS: [&str; 10] = [
    "eval",
    "radial-table",
    "fourier-field",
    "radon-sinogram",
    "psf-stack",
    "acoustics",
    "fit-disk",
    "fit-radon",
    "fit-nearfield",
    "convert-basis",
];

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::RadialTable(_) => "radial-table",
            Command::FourierField(_) => "fourier-field",
            Command::RadonSinogram(_) => "radon-sinogram",
            Command::PsfStack(_) => "psf-stack",
            Command::Acoustics(_) => "acoustics",
            Command::FitDisk(_) => "fit-disk",
            Command::FitRadon(_) => "fit-radon",
            Command::FitNearfield(_) => "fit-nearfield",
            Command::ConvertBasis(_) => "convert-basis",
        }
    }

    /// A command with no flags set, for jobs named only in a config file.
    pub fn from_name(name: &str) -> Option<Command> {
        Some(match name {
            "eval" => Command::Eval(Default::default()),
            "radial-table" => Command::RadialTable(Default::default()),
            "fourier-field" => Command::FourierField(Default::default()),
            "radon-sinogram" => Command::RadonSinogram(Default::default()),
            "psf-stack" => Command::PsfStack(Default::default()),
            "acoustics" => Command::Acoustics(Default::default()),
            "fit-disk" => Command::FitDisk(Default::default()),
            "fit-radon" => Command::FitRadon(Default::default()),
            "fit-nearfield" => Command::FitNearfield(Default::default()),
            "convert-basis" => Command::ConvertBasis(Default::default()),
            _ => return None,
        })
    }

    pub fn default_format(&self) -> Format {
        match self {
            Command::Eval(_)
            | Command::RadialTable(_)
            | Command::FourierField(_)
            | Command::RadonSinogram(_)
            | Command::PsfStack(_) => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct ModeArgs {
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<i32>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct CoeffArgs {
    /// Coefficient set JSON; a single unit mode from --n/--m/--alpha otherwise.
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub mode: ModeArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct GridArgs {
    /// rect or polar.
    #[arg(long)]
    pub grid: Option<String>,
    /// Half-width (rect) or maximum radius (polar).
    #[arg(long)]
    pub extent: Option<f64>,
    /// Points per axis.
    #[arg(long)]
    pub size: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mode: ModeArgs,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct RadialTableArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub mode: ModeArgs,
    #[arg(long)]
    pub points: Option<usize>,
    /// recurrence or dct.
    #[arg(long)]
    pub method: Option<String>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct FieldArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub coeffs: CoeffArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct SinogramArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub coeffs: CoeffArgs,
    #[arg(long)]
    pub ntau: Option<usize>,
    #[arg(long)]
    pub npsi: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct PsfArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub coeffs: CoeffArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub grid: GridArgs,
    /// Comma-separated defocus values.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub defocus: Option<Vec<f64>>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct AcousticsArgs {
    /// edge, force, power or onaxis.
    #[arg(long)]
    pub quantity: Option<String>,
    #[arg(long)]
    pub j: Option<u32>,
    #[arg(long)]
    pub j1: Option<u32>,
    #[arg(long)]
    pub j2: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Dimensionless ka with unit radius, density and sound speed.
    #[arg(long)]
    pub ka: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub rho0: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Series terms L.
    #[arg(long)]
    pub terms: Option<usize>,
    /// Comma-separated heights for onaxis.
    #[arg(long, value_delimiter = ',')]
    pub z: Option<Vec<f64>>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct ModeSelection {
    /// Fit all modes with n <= n-max.
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Explicit modes as n:m pairs, comma separated.
    #[arg(long)]
    pub modes: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub ridge: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct FitArgs {
    /// CSV with columns rho,theta,re,im (fit-disk) or tau,psi,re,im (fit-radon).
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub select: ModeSelection,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct NearfieldArgs {
    /// Pressure grid (CSV or JSON as written by this tool).
    #[arg(long)]
    pub plane: Option<PathBuf>,
    #[arg(long)]
    pub zeta: Option<f64>,
    #[arg(long)]
    pub ka: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub select: ModeSelection,
}

#[derive(Args, Serialize, Deserialize, Debug, Clone, Default)]
#[serde(rename_all = "kebab-case")]
pub struct ConvertArgs {
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// generalized, classical or edge-power.
    #[arg(long)]
    pub to: Option<String>,
    /// Connection terms kept beyond the first nonzero one.
    #[arg(long)]
    pub k_extra: Option<u32>,
}
