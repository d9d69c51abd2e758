use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::json;
use stakeless_core::fit::{
    avg_distance, avg_hit_probability, score_distance, DistanceMetric, GroupedMetric, MatchObservation,
};
use stakeless_core::{BaselineTable, Score, ScorePredictor};

use crate::dataset::Dataset;
use crate::error::{write_error, CliResult};
use crate::manifest::{write_json, Clock, Manifest};
use crate::read_params;

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Match dataset (CSV).
    #[arg(long)]
    data: PathBuf,
    /// Parameter file, as written by `fit`.
    #[arg(long)]
    params: PathBuf,
    /// Weight of joint goal changes in the score distance, in (1/2, 1).
    #[arg(long, default_value_t = 0.9)]
    pi: f64,
    /// Output file.
    #[arg(long, default_value = "metrics.json")]
    out: PathBuf,
}

#[derive(Serialize)]
struct Metrics {
    hit_probability: GroupedMetric,
    score_distance: GroupedMetric,
    score_and_outcome_distance: GroupedMetric,
}

#[derive(Serialize)]
struct JsonMetrics<'a> {
    manifest: &'a Manifest,
    model: &'a Metrics,
    baseline: &'a Metrics,
}

fn metrics(model: &dyn ScorePredictor, data: &[MatchObservation], pi: f64) -> CliResult<Metrics> {
    Ok(Metrics {
        hit_probability: avg_hit_probability(model, data),
        score_distance: avg_distance(model, data, DistanceMetric::Score, pi)?,
        score_and_outcome_distance: avg_distance(model, data, DistanceMetric::ScoreAndOutcome, pi)?,
    })
}

pub fn run(a: EvaluateArgs) -> CliResult<()> {
    let clock = Clock::start();
    // Reject a bad pi before any work.
    score_distance(Score::new(0, 0), Score::new(0, 0), a.pi)?;
    let params = read_params(&a.params)?;
    let data = Dataset::read(&a.data)?.observations(params.family)?;
    let baseline = BaselineTable::from_scores(data.iter().map(|o| o.score))?;
    let model = metrics(&params, &data, a.pi)?;
    let base = metrics(&baseline, &data, a.pi)?;

    let config = json!({
        "data": a.data.display().to_string(),
        "params": params,
        "pi": a.pi,
        "matches": data.len(),
    });
    let outputs = json!({
        "model_hit_probability": model.hit_probability.pooled,
        "baseline_hit_probability": base.hit_probability.pooled,
        "model_score_distance": model.score_distance.pooled,
        "baseline_score_distance": base.score_distance.pooled,
    });
    let manifest = clock.manifest("evaluate", config, None, outputs);
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| write_error(dir, e))?;
    }
    write_json(&a.out, &JsonMetrics { manifest: &manifest, model: &model, baseline: &base })?;

    println!("season      model hit  baseline hit  model dist  baseline dist");
    let rows = model.hit_probability.per_group.iter().zip(&base.hit_probability.per_group);
    let dists = model.score_distance.per_group.iter().zip(&base.score_distance.per_group);
    for (((season, mh), (_, bh)), ((_, md), (_, bd))) in rows.zip(dists) {
        println!("{season:<10}  {mh:9.4}  {bh:12.4}  {md:10.4}  {bd:13.4}");
    }
    println!(
        "{:<10}  {:9.4}  {:12.4}  {:10.4}  {:13.4}",
        "pooled",
        model.hit_probability.pooled,
        base.hit_probability.pooled,
        model.score_distance.pooled,
        base.score_distance.pooled
    );
    println!("wrote {}", a.out.display());
    Ok(())
}
