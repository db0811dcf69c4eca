//! Command-line surface: compute measures, run inequality checks, reproduce
//! the worked examples and the marginal-bound sweep, run randomized
//! campaigns.

mod campaign;
mod check;
mod example;
mod measure;
mod output;
mod source;
mod sweep;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand};

use polyent_core::Tolerances;

#[derive(Parser)]
#[command(
    name = "polyent",
    version,
    about = "Entanglement-of-assistance measures and weighted polygamy inequality checks",
    after_help = "State mini-syntax (for --state):\n  \
    w3                          three-qubit W state\n  \
    gsd3:l0,l1,l2,l3,l4[,ph]    generalized Schmidt form, rN sugar = 1/sqrt(N)\n  \
    w4:a,b,c,d                  weighted four-qubit W state\n  \
    ghz:parties[,dim]           GHZ state\n  \
    haar:d0,d1,...              Haar-random state (use --seed)\n  \
    product:d0,d1,...           |0...0> over the given dimensions\n  \
    file:path.json              {\"dims\":[..],\"amps\":[[re,im],..]}\n\n\
    Cuts look like 'A|BC': focus letter left, partners right (A = subsystem 0).\n\
    POLYENT_THREADS caps campaign parallelism."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute one measure of a state
    Measure(measure::MeasureArgs),
    /// Check one inequality and print the full report
    Check(check::CheckArgs),
    /// Sweep the exponent of the EOA bounds and write a CSV
    SweepBeta(sweep::SweepArgs),
    /// Randomized verification campaign over Haar states
    Campaign(campaign::CampaignArgs),
    /// Reproduce all worked-example numbers and print a pass/fail table
    Example(example::ExampleArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Master seed for sampling and optimizer restarts
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Optimizer restarts (assistance maximization)
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    /// Tolerance overrides: 'key=value', or a bare value for the slack
    /// tolerance (repeatable; see --help-tolerances keys in the README)
    #[arg(long = "tol")]
    pub tol: Vec<String>,
}

impl CommonArgs {
    pub fn tolerances(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for entry in &self.tol {
            if let Some((key, value)) = entry.split_once('=') {
                let v: f64 = value
                    .parse()
                    .map_err(|_| anyhow!("cannot parse tolerance value '{value}'"))?;
                t.set(key.trim(), v).map_err(|e| anyhow!("{e}"))?;
            } else {
                let v: f64 = entry
                    .parse()
                    .map_err(|_| anyhow!("cannot parse tolerance '{entry}'"))?;
                t.slack = v;
            }
        }
        Ok(t)
    }

    pub fn optimizer_settings(&self) -> polyent_core::roof::OptimizerSettings {
        polyent_core::roof::OptimizerSettings {
            restarts: self.restarts,
            seed: self.seed,
            ..Default::default()
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            if e.use_stderr() {
                eprintln!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    let outcome = match cli.cmd {
        Cmd::Measure(args) => measure::run(&args),
        Cmd::Check(args) => check::run(&args),
        Cmd::SweepBeta(args) => sweep::run(&args),
        Cmd::Campaign(args) => campaign::run(&args),
        Cmd::Example(args) => example::run(&args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(1);
        }
    }
}
