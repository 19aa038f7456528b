use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ontic_core::ontology::{GRID_BORN_TOLERANCE, MIN_GRID_STEPS};
use ontic_core::qcore::{MerminSettings, Operator, C64};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "ontic",
    version,
    about = "Overlap checks for ontological models of qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mermin value of the machine's GHZ output and the machine's action.
    VerifyQuantum {
        /// Six comma-separated settings a0,a1,b0,b1,c0,c1 from X, Y, Z
        /// (optionally negated, e.g. -Y).
        #[arg(long, default_value = "X,Y,X,Y,-Y,X")]
        settings: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Born residuals and overlaps of the Kochen–Specker model.
    KsModel {
        #[command(flatten)]
        grid: GridArgs,
        /// Born residual tolerance.
        #[arg(long, default_value_t = GRID_BORN_TOLERANCE)]
        tolerance: f64,
        /// Number of seeded random pairs for the overlap inequality.
        #[arg(long, default_value_t = 20)]
        pairs: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Forced overlap, toy thought experiment, LP sweep and general pairs.
    Nogo {
        /// Overlap mass of μ(·|+) on the support of |0⟩; repeatable.
        #[arg(long = "w")]
        w: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        sweep_from: f64,
        #[arg(long, default_value_t = 4.0)]
        sweep_to: f64,
        #[arg(long, default_value_t = 0.05)]
        sweep_step: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs every acceptance criterion and prints one line per criterion.
    Acceptance {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tab-separated dump of the Kochen–Specker model, one row per point.
    ExportModel {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Polar and azimuthal step counts.
    #[arg(long, num_args = 2, value_names = ["POLAR", "AZIMUTHAL"], default_values_t = [200, 400])]
    grid: Vec<usize>,
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid {
    pub polar: usize,
    pub azimuthal: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Task {
    VerifyQuantum {
        settings: MerminSettings,
        label: String,
    },
    KsModel {
        grid: Grid,
        tolerance: f64,
        pairs: usize,
    },
    Nogo {
        w: Vec<f64>,
        sweep: Sweep,
    },
    Acceptance,
    ExportModel {
        grid: Grid,
    },
}

/// Validated invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

/// Parses and validates a command line. `Ok(None)` means clap already
/// printed help or version text.
pub fn parse<I, T>(args: I) -> Result<Option<RunConfig>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    Ok(None)
                }
                _ => Err(CliError::Usage(e.render().to_string())),
            };
        }
    };
    RunConfig::from_cli(cli).map(Some)
}

impl RunConfig {
    fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let (task, common) = match cli.command {
            Command::VerifyQuantum { settings, common } => (
                Task::VerifyQuantum {
                    settings: parse_settings(&settings)?,
                    label: settings,
                },
                Some(common),
            ),
            Command::KsModel {
                grid,
                tolerance,
                pairs,
                common,
            } => {
                if !(tolerance > 0.0 && tolerance.is_finite()) {
                    return Err(CliError::Usage(format!(
                        "--tolerance must be positive, got {tolerance}"
                    )));
                }
                (
                    Task::KsModel {
                        grid: grid.validate()?,
                        tolerance,
                        pairs,
                    },
                    Some(common),
                )
            }
            Command::Nogo {
                w,
                sweep_from,
                sweep_to,
                sweep_step,
                common,
            } => {
                if !(sweep_step > 0.0) || !(sweep_from <= sweep_to) {
                    return Err(CliError::Usage(
                        "sweep range must satisfy --sweep-from ≤ --sweep-to with --sweep-step > 0"
                            .into(),
                    ));
                }
                if let Some(bad) = w.iter().find(|w| !(0.0..=0.5).contains(*w)) {
                    return Err(CliError::Usage(format!(
                        "--w must lie in [0, 0.5], got {bad}"
                    )));
                }
                let w = if w.is_empty() {
                    vec![0.0, 0.1, 0.25, 0.5]
                } else {
                    w
                };
                (
                    Task::Nogo {
                        w,
                        sweep: Sweep {
                            from: sweep_from,
                            to: sweep_to,
                            step: sweep_step,
                        },
                    },
                    Some(common),
                )
            }
            Command::Acceptance { common } => (Task::Acceptance, Some(common)),
            Command::ExportModel { grid, out } => {
                return Ok(Self {
                    task: Task::ExportModel {
                        grid: grid.validate()?,
                    },
                    seed: 0,
                    out,
                    format: Format::Csv,
                })
            }
        };
        let common = common.expect("every report command has common flags");
        Ok(Self {
            task,
            seed: common.seed,
            out: common.out,
            format: common.format,
        })
    }
}

impl GridArgs {
    fn validate(self) -> Result<Grid, CliError> {
        let [polar, azimuthal] = self.grid[..] else {
            return Err(CliError::Usage("--grid takes two step counts".into()));
        };
        if polar < MIN_GRID_STEPS || azimuthal < MIN_GRID_STEPS {
            return Err(CliError::Usage(format!(
                "--grid {polar} {azimuthal}: both step counts must be at least {MIN_GRID_STEPS}"
            )));
        }
        Ok(Grid { polar, azimuthal })
    }
}

fn parse_settings(text: &str) -> Result<MerminSettings, CliError> {
    let ops = text
        .split(',')
        .map(|token| {
            let token = token.trim();
            let (sign, axis) = match token.strip_prefix('-') {
                Some(rest) => (-1.0, rest),
                None => (1.0, token.strip_prefix('+').unwrap_or(token)),
            };
            let op = match axis {
                "X" | "x" => Operator::pauli_x(),
                "Y" | "y" => Operator::pauli_y(),
                "Z" | "z" => Operator::pauli_z(),
                _ => return Err(CliError::Usage(format!("unknown setting `{token}`"))),
            };
            Ok(op.scale(C64::new(sign, 0.0)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let [a0, a1, b0, b1, c0, c1]: [Operator; 6] = ops
        .try_into()
        .map_err(|_| CliError::Usage("--settings needs exactly six entries".into()))?;
    MerminSettings::new(a0, a1, b0, b1, c0, c1).map_err(|e| CliError::Usage(e.to_string()))
}
