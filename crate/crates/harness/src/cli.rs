//! `rudbench` argument parsing and dispatch.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use rud_core::objectives::MlpAutoencoder;
use rud_core::spectral::{RegionPredicate, DEFAULT_REGION_RESOLUTION};
use rud_core::{Method, ScheduleKind};

use crate::commands::{self, AutoencoderConfig, Outcome, QuadbenchConfig, RegionConfig, TrajectoryConfig};
use crate::selfcheck;
use crate::UsageError;

#[derive(Debug, Parser)]
#[command(name = "rudbench", version, about = "Experiments for momentum-style optimizers and RUD")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rasterize a (mu, alpha) region predicate to CSV.
    Region {
        /// RUD_CONVERGES, RUD_BEATS_NAG, MOM_BEATS_NAG or MOM_BEATS_RUD.
        #[arg(long, default_value = "RUD_CONVERGES")]
        predicate: RegionPredicate,
        /// Points per axis.
        #[arg(long, default_value_t = DEFAULT_REGION_RESOLUTION)]
        resolution: usize,
        /// Points along mu, overriding --resolution.
        #[arg(long)]
        mu_resolution: Option<usize>,
        /// Points along alpha, overriding --resolution.
        #[arg(long)]
        alpha_resolution: Option<usize>,
        #[arg(long, default_value = "region.csv")]
        out: PathBuf,
    },
    /// Iterate one method on J(theta) = |theta|^2 / 2.
    Trajectory {
        #[arg(long, default_value = "rud")]
        method: Method,
        #[arg(long, default_value = "constant")]
        schedule: ScheduleKind,
        #[arg(long, default_value_t = 0.2)]
        alpha: f64,
        #[arg(long, default_value_t = 0.9)]
        mu: f64,
        /// Starting point; comma-separated for a vector.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "1")]
        theta1: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value = "trajectory.csv")]
        out: PathBuf,
    },
    /// Compare methods on a seeded random SPD quadratic.
    Quadbench {
        #[arg(long, default_value_t = 1000)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0.2)]
        alpha: f64,
        #[arg(long, default_value = "nesterov")]
        schedule: ScheduleKind,
        /// Momentum for the constant schedule.
        #[arg(long, default_value_t = 0.9)]
        mu: f64,
        #[arg(long, default_value_t = 300)]
        iters: usize,
        #[arg(long = "method", value_delimiter = ',', default_value = "gd,mom,nag,rud")]
        methods: Vec<Method>,
        #[arg(long, default_value_t = 0.01)]
        eig_low: f64,
        #[arg(long, default_value_t = 1.0)]
        eig_high: f64,
        #[arg(long, default_value = "quadbench.csv")]
        out: PathBuf,
    },
    /// Train an MLP autoencoder on IDX images with each method.
    Autoencoder {
        /// IDX image file.
        #[arg(long)]
        data: PathBuf,
        /// Dash-separated layer widths.
        #[arg(long, default_value = "784-64-16-64-784")]
        layers: MlpAutoencoder,
        /// Use only the first N images.
        #[arg(long, default_value_t = 2000)]
        images: usize,
        #[arg(long, default_value_t = 200)]
        batch_size: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value = "nesterov")]
        schedule: ScheduleKind,
        #[arg(long, default_value_t = 0.9)]
        mu: f64,
        #[arg(long, default_value_t = 20)]
        epochs: usize,
        #[arg(long = "method", value_delimiter = ',', default_value = "gd,mom,nag,rud")]
        methods: Vec<Method>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "autoencoder.csv")]
        out: PathBuf,
    },
    /// Run the built-in invariant suites.
    Selfcheck,
    /// Write seeded synthetic 28x28 digit images as an IDX file.
    SynthDigits {
        #[arg(long, default_value_t = 2000)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "digits.idx")]
        out: PathBuf,
    },
}

fn report(outcome: &Outcome) {
    println!(
        "wrote {} rows to {} (status {}, record {})",
        outcome.rows,
        outcome.csv.display(),
        outcome.status,
        outcome.meta.display()
    );
    for m in &outcome.methods {
        println!("  {:<14} {:<10} final {:.6e}", m.method.name(), m.status.as_str(), m.final_value);
    }
}

/// Runs a parsed command; `Ok(false)` means the self-check found failures.
pub fn execute(command: Command) -> Result<bool> {
    match command {
        Command::Region {
            predicate,
            resolution,
            mu_resolution,
            alpha_resolution,
            out,
        } => report(&commands::region(&RegionConfig {
            predicate,
            mu_resolution: mu_resolution.unwrap_or(resolution),
            alpha_resolution: alpha_resolution.unwrap_or(resolution),
            out,
        })?),
        Command::Trajectory {
            method,
            schedule,
            alpha,
            mu,
            theta1,
            iters,
            out,
        } => report(&commands::trajectory(&TrajectoryConfig {
            method,
            schedule,
            alpha,
            mu,
            theta1,
            iters,
            out,
        })?),
        Command::Quadbench {
            dim,
            seed,
            alpha,
            schedule,
            mu,
            iters,
            methods,
            eig_low,
            eig_high,
            out,
        } => report(&commands::quadbench(&QuadbenchConfig {
            dim,
            seed,
            alpha,
            schedule,
            mu,
            iters,
            methods,
            eig_low,
            eig_high,
            out,
        })?),
        Command::Autoencoder {
            data,
            layers,
            images,
            batch_size,
            alpha,
            schedule,
            mu,
            epochs,
            methods,
            seed,
            out,
        } => report(&commands::autoencoder(&AutoencoderConfig {
            data,
            layers,
            images,
            batch_size,
            alpha,
            schedule,
            mu,
            epochs,
            methods,
            seed,
            out,
        })?),
        Command::Selfcheck => {
            let reports = selfcheck::run_all();
            for r in &reports {
                println!("{r}");
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            println!("{} suites, {} failed", reports.len(), failed);
            return Ok(failed == 0);
        }
        Command::SynthDigits { count, seed, out } => {
            commands::synth_digits(count, seed, &out)?;
            println!("wrote {count} images to {}", out.display());
        }
    }
    Ok(true)
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
