//! Command-line front end: figure data as CSV, oracle checks as commands.
//!
//! Angles are read in degrees and written in radians with a `_deg` column
//! alongside. Exit codes: 0 success, 1 usage or input error, 2 tolerance
//! violation.

// `!(x < tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod plot;
pub mod settings;
pub mod table;

pub use table::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] berrybell::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("tolerance violated: {0}")]
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Tolerance(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "berrybell",
    version,
    about = "Berry phases and Bell correlations of a phase-imprinted spin pair"
)]
pub struct Cli {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for simulated counts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Table format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analytic Berry and dynamical phases, optionally checked by integration.
    Phases(PhasesArgs),
    /// S_max against γ or ϑ, analytic and grid search, with Bell angles.
    SweepSmax(SweepArgs),
    /// Bell angles of both branches at one γ.
    BellAngles(BellAnglesArgs),
    /// Correlation E(α, β) of the phase-imprinted singlet.
    Correlation(CorrelationArgs),
    /// Simulated neutron counts for a list of path/spin settings.
    Counts(CountsArgs),
    /// Oracle phase error across adiabaticity ratios and tilts.
    VerifyAdiabatic(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhaseMode {
    /// One period along the field.
    Single,
    /// Echo: a full period along the field, then one against it.
    Full,
    /// Echo: half a period along the field, then half against it.
    Half,
}

#[derive(Debug, Args)]
pub struct PhasesArgs {
    /// Field tilt ϑ in degrees, within [0, 90].
    #[arg(long, allow_negative_numbers = true)]
    pub theta: f64,
    /// ω₀/ω₁; runs the integration oracle when given.
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long, value_enum, default_value_t = PhaseMode::Single)]
    pub mode: PhaseMode,
    /// Allowed |oracle − analytic| for the geometric phase, radians.
    #[arg(long, default_value_t = 5e-3)]
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    /// Berry phase γ.
    Gamma,
    /// Field tilt ϑ; γ = −π(1 − cos ϑ).
    Theta,
    /// Adiabaticity ratio ω₀/ω₁ (verify-adiabatic only).
    Ratio,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SmaxMethod {
    Analytic,
    Grid,
    Both,
}

/// A 1-D sweep. Angles in degrees.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepSpec {
    pub fn new(param: SweepParam, start: f64, stop: f64, points: usize) -> Result<Self, CliError> {
        if !(start.is_finite() && stop.is_finite()) || !(start < stop) {
            return Err(CliError::Usage(format!(
                "sweep needs start < stop, got {start} and {stop}"
            )));
        }
        if points < 2 {
            return Err(CliError::Usage(format!(
                "sweep needs at least 2 points, got {points}"
            )));
        }
        Ok(Self {
            param,
            start,
            stop,
            points,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        berrybell::optimize::linspace(self.start, self.stop, self.points)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value_t = SweepParam::Gamma)]
    pub param: SweepParam,
    /// Degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub start: f64,
    /// Degrees.
    #[arg(long, default_value_t = 180.0, allow_negative_numbers = true)]
    pub stop: f64,
    #[arg(long, default_value_t = 181)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = SmaxMethod::Both)]
    pub method: SmaxMethod,
    /// Grid spacing of the search, degrees.
    #[arg(long, default_value_t = 0.5)]
    pub grid_step: f64,
    /// Also write an SVG plot of S_max here.
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BellAnglesArgs {
    /// γ in degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
}

#[derive(Debug, Args)]
pub struct CorrelationArgs {
    /// γ in degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Left analyzer polar angle, degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha1: f64,
    /// Left analyzer azimuth, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha2: f64,
    /// Right analyzer polar angle, degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub beta1: f64,
    /// Right analyzer azimuth, degrees.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub beta2: f64,
}

#[derive(Debug, Args)]
pub struct CountsArgs {
    /// Interferometer phase γ_B in degrees.
    #[arg(long = "gamma-b", allow_negative_numbers = true)]
    pub gamma_b: f64,
    /// Settings file; defaults to the compensated CHSH settings for γ_B.
    #[arg(long)]
    pub settings: Option<PathBuf>,
    /// Events per setting.
    #[arg(long, default_value_t = 10_000_000)]
    pub total: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Tilts ϑ in degrees.
    #[arg(long, value_delimiter = ',', default_values_t = [15.0, 30.0, 45.0, 60.0, 75.0, 90.0])]
    pub theta: Vec<f64>,
    /// Inverse ratios ω₁/ω₀.
    #[arg(long, value_delimiter = ',', default_values_t = [50.0, 100.0, 200.0])]
    pub inverse_ratio: Vec<f64>,
    /// Allowed geometric-phase error at the most adiabatic ratio, radians.
    #[arg(long, default_value_t = 5e-3)]
    pub tolerance: f64,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, A>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    1
                }
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            let r = commands::dispatch(cli, &mut w, stderr);
            w.flush()?;
            r
        }
        None => commands::dispatch(cli, stdout, stderr),
    }
}
