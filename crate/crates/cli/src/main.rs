//! `tsforge` — batch feature extraction over multi-channel time-series
//! projects. See README.md for the manifest and pipeline file formats.

mod commands;
mod csvio;
mod manifest;
mod pipeline_config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CmdError, FailureClass, FilterResponseArgs};

#[derive(Parser)]
#[command(
    name = "tsforge",
    version,
    about = "Batch time-series feature extraction",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a pipeline over a project and write the results.
    Run {
        /// Project manifest (TOML).
        manifest: PathBuf,
        /// Pipeline description (TOML).
        pipeline: PathBuf,
        /// Output directory for features, channels and the resolved manifest.
        #[arg(short, long)]
        out: PathBuf,
        /// Write into the output directory even if it already exists.
        #[arg(long)]
        force: bool,
        /// Worker threads for the per-record phase; 0 picks automatically.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Validate a manifest plus pipeline and print the execution plan.
    Check {
        /// Project manifest (TOML).
        manifest: PathBuf,
        /// Pipeline description (TOML).
        pipeline: PathBuf,
    },
    /// List every available plugin.
    Plugins {
        /// Output format: `table` or `csv`.
        #[arg(long, default_value = "table")]
        format: String,
    },
    /// Design a Butterworth filter and print coefficients and magnitude response.
    FilterResponse {
        /// `lowpass`, `highpass` or `bandpass`.
        #[arg(long, default_value = "lowpass")]
        filter_type: String,
        /// First critical frequency in Hz.
        #[arg(long)]
        freq: f64,
        /// Second critical frequency in Hz (bandpass only).
        #[arg(long)]
        freq2: Option<f64>,
        /// Filter order, 1 to 8.
        #[arg(long, default_value_t = 2)]
        order: usize,
        /// Sample rate in Hz.
        #[arg(long)]
        sample_rate: f64,
        /// Number of magnitude samples between 0 and the Nyquist frequency.
        #[arg(long, default_value_t = 256)]
        points: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Run {
            manifest,
            pipeline,
            out,
            force,
            jobs,
        } => commands::run(&manifest, &pipeline, &out, force, jobs),
        Command::Check { manifest, pipeline } => commands::check(&manifest, &pipeline),
        Command::Plugins { format } => commands::plugins(&format),
        Command::FilterResponse {
            filter_type,
            freq,
            freq2,
            order,
            sample_rate,
            points,
            out,
        } => commands::filter_response(&FilterResponseArgs {
            filter_type: &filter_type,
            freq,
            freq2,
            order,
            sample_rate,
            points,
            out: out.as_deref(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{err}");
                    ExitCode::SUCCESS
                }
                _ => {
                    eprint!("{err}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            match err.class {
                FailureClass::Validation => ExitCode::from(1),
                FailureClass::Runtime => ExitCode::from(2),
            }
        }
    }
}
