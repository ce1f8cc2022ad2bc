use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{LoadedConfig, Task};
use crate::error::CliError;
use crate::tasks::{self, RunOptions};

#[derive(Debug, Parser)]
#[command(name = "ppoints", version, about = "Principal points of elliptical random functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario config (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the config and model seeds.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; outputs do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw samples from an elliptical model.
    Simulate(Common),
    /// Mean and covariance eigendecomposition.
    Estimate(Common),
    /// Lloyd's algorithm with restarts.
    Kmeans(Common),
    /// Two principal points from the one-dimensional solution.
    ClosedForm(Common),
    /// Run structural checks.
    Verify(Common),
    /// Summarize verification files.
    Report {
        #[command(flatten)]
        common: Common,
        /// Verification files, after any listed in the config.
        inputs: Vec<PathBuf>,
    },
}

impl Command {
    fn parts(&self) -> (Task, &Common, &[PathBuf]) {
        match self {
            Command::Simulate(c) => (Task::Simulate, c, &[]),
            Command::Estimate(c) => (Task::Estimate, c, &[]),
            Command::Kmeans(c) => (Task::Kmeans, c, &[]),
            Command::ClosedForm(c) => (Task::ClosedForm, c, &[]),
            Command::Verify(c) => (Task::Verify, c, &[]),
            Command::Report { common, inputs } => (Task::Report, common, inputs),
        }
    }
}

pub fn run(cli: &Cli) -> Result<i32, CliError> {
    let (task, common, inputs) = cli.command.parts();
    let cfg = match &common.config {
        Some(p) => LoadedConfig::load(p)?,
        None if task == Task::Report => LoadedConfig::empty(),
        None => return Err(CliError::Schema(format!("`{}` needs --config", task.name()))),
    };
    if common.jobs == Some(0) {
        return Err(CliError::Schema("--jobs must be at least 1".into()));
    }
    let opts = RunOptions {
        seed: common.seed,
        out: common.out.clone(),
        jobs: common.jobs,
        inputs: inputs.to_vec(),
    };
    let outcome = tasks::run(task, &cfg, &opts)?;
    if outcome.failed_checks > 0 {
        eprintln!("{} check(s) failed", outcome.failed_checks);
    }
    Ok(outcome.exit_code())
}

/// Entry point; returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("ppoints: {e}");
            e.exit_code()
        }
    }
}
