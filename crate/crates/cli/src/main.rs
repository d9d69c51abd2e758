mod classify;
mod dataset;
mod error;
mod evaluate;
mod fit;
mod manifest;
mod simulate;
mod state;
mod synth;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stakeless_core::{ModelFamily, ModelParams};

use crate::error::{read_error, CliError, CliResult};

#[derive(Parser)]
#[command(name = "stakeless", version, about = "Stakeless matches in four-team double round-robin groups")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true, env = "STAKELESS_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo evaluation of closing-matchday schedules.
    Simulate(simulate::SimulateArgs),
    /// Maximum-likelihood fit of a score model to a match dataset.
    Fit(fit::FitArgs),
    /// Forecast metrics of a fitted model against a dataset.
    Evaluate(evaluate::EvaluateArgs),
    /// Decided positions and match classes for a group state.
    Classify(classify::ClassifyArgs),
    /// Synthetic match dataset drawn from a score model.
    Synth(synth::SynthArgs),
}

/// Model selection shared by the commands that sample scores.
#[derive(Args, Clone, Debug)]
pub struct ModelArgs {
    /// Parameter preset.
    #[arg(long, default_value = "4p-pot")]
    model: ModelFamily,
    /// Parameter file (`key = value` lines); overrides --model.
    #[arg(long)]
    params: Option<PathBuf>,
}

impl ModelArgs {
    pub fn load(&self) -> CliResult<ModelParams> {
        match &self.params {
            Some(path) => read_params(path),
            None => ModelParams::preset(self.model)
                .ok_or_else(|| CliError::Input(format!("{} has no parameter preset", self.model))),
        }
    }
}

pub fn read_params(path: &Path) -> CliResult<ModelParams> {
    let text = std::fs::read_to_string(path).map_err(|e| read_error(path, e))?;
    ModelParams::from_kv_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Failed(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::Fit(a) => fit::run(a),
        Command::Evaluate(a) => evaluate::run(a),
        Command::Classify(a) => classify::run(a),
        Command::Synth(a) => synth::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
