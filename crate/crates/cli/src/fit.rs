use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::json;
use stakeless_core::fit::{bootstrap_ci, fit_mle};
use stakeless_core::{FitResult, ModelFamily};

use crate::dataset::Dataset;
use crate::error::{write_error, CliError, CliResult};
use crate::manifest::{write_json, write_text, Clock, Manifest};

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Match dataset (CSV).
    #[arg(long)]
    data: PathBuf,
    /// 6p-coeff, 4p-coeff, 6p-pot, 4p-pot or bivariate-coeff.
    #[arg(long)]
    family: ModelFamily,
    /// Number of bootstrap resamples for percentile intervals (at least 100).
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Convergence threshold on the mean per-match gradient norm.
    #[arg(long, default_value_t = 1e-8)]
    tolerance: f64,
    /// Output directory for params.txt and fit.json.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Serialize)]
struct JsonFit<'a> {
    manifest: &'a Manifest,
    fit: &'a FitResult,
}

pub fn run(a: FitArgs) -> CliResult<()> {
    let clock = Clock::start();
    if a.family == ModelFamily::Baseline {
        return Err(CliError::Input("the baseline is a frequency table and has nothing to fit".into()));
    }
    let data = Dataset::read(&a.data)?.observations(a.family)?;
    let mut fit = fit_mle(&data, a.family, a.tolerance)?;
    if fit.converged {
        if let Some(b) = a.bootstrap {
            fit.bootstrap_ci = Some(bootstrap_ci(&data, a.family, b, a.seed, a.tolerance)?);
        }
    }

    std::fs::create_dir_all(&a.out).map_err(|e| write_error(&a.out, e))?;
    let config = json!({
        "data": a.data.display().to_string(),
        "family": a.family.name(),
        "bootstrap": a.bootstrap,
        "seed": a.seed,
        "tolerance": a.tolerance,
        "matches": data.len(),
    });
    let outputs = json!({
        "log_likelihood": fit.log_likelihood,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "gradient_norm": fit.gradient_norm,
    });
    let manifest = clock.manifest("fit", config, a.bootstrap.map(|_| a.seed), outputs);
    write_text(&a.out.join("params.txt"), &fit.to_kv_string())?;
    write_json(&a.out.join("fit.json"), &JsonFit { manifest: &manifest, fit: &fit })?;

    print!("{}", fit.to_kv_string());
    if !fit.converged {
        return Err(CliError::NotConverged(format!(
            "no convergence after {} iterations (gradient norm {:e})",
            fit.iterations, fit.gradient_norm
        )));
    }
    Ok(())
}
