//! `fracprop` — reproducible experiments on the fractional solution family.
//!
//! Subcommands: `ml-eval`, `bound-sweep`, `propagate` (with `--trace-norm`,
//! `--alpha-sweep`, `--certify`, `--adjoint-check` modes), and
//! `semigroup-check`. Every run emits a machine-readable table (CSV with a
//! config header, or a JSON envelope) that is byte-identical across reruns
//! of the same configuration. `FRACPROP_THREADS` caps data-parallel width.

mod commands;
mod config;
mod error;
mod inputs;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{ModelSpec, OutputFormat, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "fracprop", version, about = "Fractional Schrödinger propagator experiments")]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: OutputFormat,
    /// Output path (atomic write); stdout when omitted
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Absolute tolerance for the evaluators
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate E_alpha((-it)^alpha omega) on grids of alpha, t, omega
    MlEval {
        /// Fractional order(s), comma-separated
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        /// Time(s), comma-separated
        #[arg(long, value_delimiter = ',', required = true)]
        t: Vec<f64>,
        /// Spectral value(s), comma-separated
        #[arg(long, value_delimiter = ',', required = true)]
        omega: Vec<f64>,
    },
    /// Sweep sup over omega of |E_alpha((-i)^alpha omega)| on [0, omega-max]
    BoundSweep {
        /// Fractional order(s), comma-separated
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
        /// Upper end of the omega range
        #[arg(long, required = true)]
        omega_max: f64,
        /// Number of logarithmic grid points
        #[arg(long, default_value_t = 2000)]
        points: usize,
        /// Append comparison rows at twice omega-max
        #[arg(long)]
        double: bool,
    },
    /// Apply the solution family U_alpha(t) on a matrix or grid model
    Propagate {
        /// Fractional order
        #[arg(long)]
        alpha: Option<f64>,
        /// Orders compared against e^{-itA}, comma-separated
        #[arg(long, value_delimiter = ',', conflicts_with = "alpha")]
        alpha_sweep: Option<Vec<f64>>,
        /// Inline diagonal model diag:a1,a2,...
        #[arg(long, conflicts_with_all = ["matrix_file", "grid"])]
        matrix: Option<String>,
        /// Hermitian matrix from a plain-text file
        #[arg(long, conflicts_with = "grid")]
        matrix_file: Option<PathBuf>,
        /// Periodic grid model n,L
        #[arg(long)]
        grid: Option<String>,
        /// Initial state: basis:k, gaussian:center,width, or file:path
        #[arg(long, required = true)]
        state: String,
        /// Single evaluation time
        #[arg(long, conflicts_with = "t_list")]
        t: Option<f64>,
        /// Ascending times for --trace-norm
        #[arg(long, value_delimiter = ',')]
        t_list: Option<Vec<f64>>,
        /// Report ||U_alpha(t) u0|| at each time in --t-list
        #[arg(long)]
        trace_norm: bool,
        /// Certify the family by its L1 residual (diagonal matrix models)
        #[arg(long)]
        certify: bool,
        /// Grid step for --certify
        #[arg(long)]
        h: Option<f64>,
        /// Final time for --certify (default 1)
        #[arg(long)]
        t_end: Option<f64>,
        /// Check the adjoint identity and gram consistency at --t
        #[arg(long)]
        adjoint_check: bool,
    },
    /// Composition defect of J^alpha J^beta against J^{alpha+beta}
    SemigroupCheck {
        /// First exponent
        #[arg(long, required = true)]
        alpha: f64,
        /// Second exponent
        #[arg(long, required = true)]
        beta: f64,
        /// Grid step
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Final grid time
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        /// Sampled input path: ones, ramp, or sine
        #[arg(long, default_value = "ones")]
        path: String,
    },
}

/// Translate parsed flags into the canonical config that gets embedded in
/// output headers.
fn build_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.command {
        Command::MlEval { alpha, t, omega } => {
            let mut c = RunConfig::bare("ml-eval", cli.tol, cli.format);
            c.alphas = Some(alpha.clone());
            c.times = Some(t.clone());
            c.omegas = Some(omega.clone());
            c
        }
        Command::BoundSweep {
            alpha,
            omega_max,
            points,
            double,
        } => {
            let mut c = RunConfig::bare("bound-sweep", cli.tol, cli.format);
            c.alphas = Some(alpha.clone());
            c.omega_max = Some(*omega_max);
            c.points = Some(*points);
            c.double = Some(*double);
            c
        }
        Command::Propagate {
            alpha,
            alpha_sweep,
            matrix,
            matrix_file,
            grid,
            state,
            t,
            t_list,
            trace_norm,
            certify,
            h,
            t_end,
            adjoint_check,
        } => {
            let mut c = RunConfig::bare("propagate", cli.tol, cli.format);
            c.alphas = alpha.map(|a| vec![a]);
            c.alpha_sweep = alpha_sweep.clone();
            let sources = [matrix.is_some(), matrix_file.is_some(), grid.is_some()];
            if sources.iter().filter(|&&s| s).count() != 1 {
                return Err(CliError::config(
                    "propagate needs exactly one of --matrix, --matrix-file, --grid",
                ));
            }
            c.model = Some(if let Some(m) = matrix {
                ModelSpec::Diagonal {
                    values: inputs::parse_diag_spec(m)?,
                }
            } else if let Some(f) = matrix_file {
                ModelSpec::File {
                    path: f.to_string_lossy().into_owned(),
                }
            } else {
                let (n, length) = inputs::parse_grid_spec(grid.as_ref().unwrap())?;
                ModelSpec::Grid { n, length }
            });
            c.state = Some(inputs::parse_state_spec(state)?);
            c.times = t.map(|v| vec![v]).or_else(|| t_list.clone());
            c.h = *h;
            c.t_end = *t_end;
            let modes = [
                (*trace_norm, "trace-norm"),
                (*certify, "certify"),
                (*adjoint_check, "adjoint-check"),
                (alpha_sweep.is_some(), "alpha-sweep"),
            ];
            let picked: Vec<&str> = modes.iter().filter(|(on, _)| *on).map(|(_, n)| *n).collect();
            if picked.len() > 1 {
                return Err(CliError::config(format!(
                    "propagate modes are mutually exclusive, got {}",
                    picked.join(" and ")
                )));
            }
            c.mode = Some(picked.first().copied().unwrap_or("dump").to_string());
            c
        }
        Command::SemigroupCheck {
            alpha,
            beta,
            h,
            t_end,
            path,
        } => {
            let mut c = RunConfig::bare("semigroup-check", cli.tol, cli.format);
            c.alphas = Some(vec![*alpha]);
            c.beta = Some(*beta);
            c.h = Some(*h);
            c.t_end = Some(*t_end);
            c.path_preset = Some(path.clone());
            c
        }
    };
    if !(cfg.tol > 0.0 && cfg.tol.is_finite()) {
        return Err(CliError::config(format!(
            "--tol must be finite and > 0, got {}",
            cfg.tol
        )));
    }
    cfg.format = cli.format;
    Ok(cfg)
}

fn configure_threads() -> Result<(), CliError> {
    match std::env::var("FRACPROP_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw.parse().map_err(|_| {
                CliError::config(format!(
                    "FRACPROP_THREADS must be a positive integer, got '{raw}'"
                ))
            })?;
            if n == 0 {
                return Err(CliError::config(
                    "FRACPROP_THREADS must be a positive integer, got '0'",
                ));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::config(format!("cannot configure thread pool: {e}")))
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let config = build_config(cli)?;
    let table = match config.subcommand.as_str() {
        "ml-eval" => commands::cmd_ml_eval(&config)?,
        "bound-sweep" => commands::cmd_bound_sweep(&config)?,
        "propagate" => commands::cmd_propagate(&config)?,
        "semigroup-check" => commands::cmd_semigroup_check(&config)?,
        other => unreachable!("unknown subcommand {other}"),
    };
    table::emit(&table.render(&config), cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("configuration error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
