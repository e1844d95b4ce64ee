//! `gridsignal`: partition equilibria of the consumer/aggregator signaling
//! game from the command line.
//!
//! Exit codes: 0 success, 1 infeasible request or I/O failure, 2 usage
//! error, 3 verification failed.

mod format;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gridsignal_core::equilibrium::{
    equilibrium_profile, max_messages, verify_equilibrium, Partition, DEFAULT_CELL_CAP,
    DEFAULT_EPSILON,
};
use gridsignal_core::experiments::{scenario_payoffs_at, sweep, ScenarioPayoffs, DEFAULT_QUAD_TOL};
use gridsignal_core::quantizer::br_dynamics;
use gridsignal_core::{Error, ModelParams};

use crate::format::{fmt_sig, to_json};

const EXIT_FAILURE: u8 = 1;
const EXIT_UNVERIFIED: u8 = 3;

const SWEEP_HEADER: &str =
    "b,m_star,agg_no_message,agg_equilibrium,agg_full_info,cons_self_serve,cons_full_info,cons_equilibrium";

#[derive(Parser)]
#[command(
    name = "gridsignal",
    version,
    about = "Partition equilibria of the power signaling game"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the maximal number of messages M* at bias b.
    MaxMessages {
        #[arg(long, value_parser = nonnegative, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value_t = DEFAULT_EPSILON, value_parser = positive)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_CELL_CAP, value_parser = at_least_one)]
        cap: usize,
    },
    /// Solve the equilibrium partition with the given number of cells.
    Partition {
        #[arg(long, value_parser = nonnegative, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, value_parser = at_least_one)]
        cells: usize,
        #[arg(long, default_value_t = DEFAULT_EPSILON, value_parser = positive)]
        epsilon: f64,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Ex-ante payoffs of both players under the six information scenarios.
    Payoffs {
        #[arg(long, value_parser = nonnegative, allow_negative_numbers = true)]
        b: f64,
        /// Cells in the equilibrium scenario; defaults to M*.
        #[arg(long, value_parser = at_least_one)]
        cells: Option<usize>,
        #[arg(long = "K", default_value_t = ModelParams::DEFAULT_K, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value_t = DEFAULT_EPSILON, value_parser = positive)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_CELL_CAP, value_parser = at_least_one)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// Scenario payoffs on an evenly spaced bias grid.
    Sweep {
        #[arg(long, value_parser = nonnegative, allow_negative_numbers = true)]
        b_min: f64,
        #[arg(long, value_parser = nonnegative, allow_negative_numbers = true)]
        b_max: f64,
        #[arg(long, value_parser = at_least_two)]
        steps: usize,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        format: OutputFormat,
        #[arg(long = "K", default_value_t = ModelParams::DEFAULT_K, allow_negative_numbers = true)]
        k: f64,
        #[arg(long, default_value_t = DEFAULT_EPSILON, value_parser = positive)]
        epsilon: f64,
        #[arg(long, default_value_t = DEFAULT_CELL_CAP, value_parser = at_least_one)]
        cap: usize,
    },
    /// Check that the solved profile is an ε-Nash equilibrium.
    Verify {
        #[arg(long, value_parser = nonnegative, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, value_parser = at_least_one)]
        cells: usize,
        #[arg(long, default_value_t = 2000, value_parser = at_least_two)]
        grid: usize,
        #[arg(long, default_value_t = 1e-6, value_parser = nonnegative)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_EPSILON, value_parser = positive)]
        epsilon: f64,
    },
    /// Best-response dynamics (Lloyd-Max at b = 0) from a uniform partition.
    Lloyd {
        #[arg(long, value_parser = nonnegative, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, value_parser = at_least_one)]
        cells: usize,
        #[arg(long, default_value_t = 500, value_parser = at_least_one)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-10, value_parser = nonnegative)]
        tol: f64,
    },
}

fn nonnegative(s: &str) -> Result<f64, String> {
    let x: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be a finite number >= 0, got {s}"))
    }
}

fn count_at_least(s: &str, min: usize) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n >= min {
        Ok(n)
    } else {
        Err(format!("must be at least {min}, got {n}"))
    }
}

fn at_least_one(s: &str) -> Result<usize, String> {
    count_at_least(s, 1)
}

fn at_least_two(s: &str) -> Result<usize, String> {
    count_at_least(s, 2)
}

fn positive(s: &str) -> Result<f64, String> {
    let x = nonnegative(s)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("must be > 0, got {s}"))
    }
}

#[derive(Serialize)]
struct PartitionOutput<'a> {
    b: f64,
    boundaries: &'a [f64],
    actions: &'a [f64],
}

enum Failure {
    Core(Error),
    Io(PathBuf, io::Error),
    Json(serde_json::Error),
    Usage(String),
    Unverified,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Json(e)
    }
}

fn csv_row(values: &[f64]) -> String {
    values
        .iter()
        .map(|&x| fmt_sig(x))
        .collect::<Vec<_>>()
        .join(",")
}

fn scenario_csv_row(r: &ScenarioPayoffs) -> String {
    format!(
        "{},{},{}",
        fmt_sig(r.b),
        r.m_star,
        csv_row(&[
            r.agg_no_message,
            r.agg_equilibrium,
            r.agg_full_info,
            r.cons_self_serve,
            r.cons_full_info,
            r.cons_equilibrium,
        ])
    )
}

fn scenario_csv<'a>(rows: impl IntoIterator<Item = &'a ScenarioPayoffs>) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&scenario_csv_row(r));
        out.push('\n');
    }
    out
}

fn json_line<T: Serialize>(value: &T) -> Result<String, Failure> {
    Ok(to_json(value)? + "\n")
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::MaxMessages { b, epsilon, cap } => {
            let p = ModelParams::with_bias(b)?;
            Ok(format!("{}\n", max_messages(&p, epsilon, cap)))
        }
        Command::Partition {
            b,
            cells,
            epsilon,
            format,
        } => {
            let p = ModelParams::with_bias(b)?;
            let e = equilibrium_profile(&p, cells, epsilon)?;
            match format {
                OutputFormat::Json => json_line(&PartitionOutput {
                    b,
                    boundaries: e.boundaries(),
                    actions: e.actions(),
                }),
                OutputFormat::Csv => Ok(format!(
                    "boundaries,{}\nactions,{}\n",
                    csv_row(e.boundaries()),
                    csv_row(e.actions())
                )),
            }
        }
        Command::Payoffs {
            b,
            cells,
            k,
            epsilon,
            cap,
            format,
        } => {
            let p = ModelParams::new(b, k)?;
            let r = scenario_payoffs_at(&p, cells, epsilon, cap, DEFAULT_QUAD_TOL)?;
            match format {
                OutputFormat::Json => json_line(&r),
                OutputFormat::Csv => Ok(scenario_csv([&r])),
            }
        }
        Command::Sweep {
            b_min,
            b_max,
            steps,
            out,
            format,
            k,
            epsilon,
            cap,
        } => {
            if b_min >= b_max {
                return Err(Failure::Usage(format!(
                    "--b-min ({b_min}) must be less than --b-max ({b_max})"
                )));
            }
            let template = ModelParams::new(b_min, k)?;
            let record = sweep(&template, b_min, b_max, steps, epsilon, cap)?;
            let text = match format {
                OutputFormat::Csv => scenario_csv(record.rows()),
                OutputFormat::Json => json_line(&record)?,
            };
            match out {
                Some(path) => {
                    fs::write(&path, text).map_err(|e| Failure::Io(path, e))?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::Verify {
            b,
            cells,
            grid,
            tol,
            epsilon,
        } => {
            let p = ModelParams::with_bias(b)?;
            let e = equilibrium_profile(&p, cells, epsilon)?;
            let report = verify_equilibrium(&p, &e, grid, tol);
            let text = json_line(&report)?;
            if report.passed {
                Ok(text)
            } else {
                print!("{text}");
                Err(Failure::Unverified)
            }
        }
        Command::Lloyd {
            b,
            cells,
            max_iter,
            tol,
        } => {
            let p = ModelParams::with_bias(b)?;
            let init = Partition::uniform(cells)?;
            let result = br_dynamics(&p, cells, &init, max_iter, tol)?;
            json_line(&result)
        }
    }
}

/// Prints a parse error followed by the usage line, exit code 2. Help and
/// version requests go to stdout with exit code 0.
fn usage_exit(e: clap::Error) -> ! {
    if !e.use_stderr() {
        e.exit();
    }
    let _ = e.print();
    eprintln!("\n{}", Cli::command().render_usage());
    std::process::exit(2)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => usage_exit(e),
    };
    match run(cli.command) {
        Ok(text) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(EXIT_FAILURE);
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Unverified) => ExitCode::from(EXIT_UNVERIFIED),
        Err(Failure::Usage(msg)) => {
            usage_exit(Cli::command().error(clap::error::ErrorKind::ValueValidation, msg))
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
        Err(Failure::Io(path, e)) => {
            eprintln!("error: cannot write {}: {e}", path.display());
            ExitCode::from(EXIT_FAILURE)
        }
        Err(Failure::Json(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
