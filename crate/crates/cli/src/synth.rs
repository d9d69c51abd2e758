use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use stakeless_core::model::sample_score;
use stakeless_core::{Pairing, PotSlot, Rating};

use crate::dataset::{write_file, DatasetRow};
use crate::error::{write_error, CliResult};
use crate::manifest::{write_json, Clock};
use crate::ModelArgs;

pub const GROUPS_PER_SEASON: usize = 8;
const FIRST_SEASON: usize = 2003;

/// Club coefficient range per pot, loosely shaped like real group stages.
const COEFF_RANGE: [(f64, f64); 4] = [(80.0, 150.0), (40.0, 100.0), (15.0, 60.0), (5.0, 30.0)];

#[derive(Args, Debug)]
pub struct SynthArgs {
    /// Output CSV file; the manifest goes to `<out>.manifest.json`.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 17)]
    seasons: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    model: ModelArgs,
}

pub fn run(a: SynthArgs) -> CliResult<()> {
    let clock = Clock::start();
    let params = a.model.load()?;
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut rows = Vec::with_capacity(a.seasons * GROUPS_PER_SEASON * 12);
    for k in 0..a.seasons {
        let year = FIRST_SEASON + k;
        let season = format!("{year}-{:02}", (year + 1) % 100);
        for g in 0..GROUPS_PER_SEASON {
            let group = (b'A' + g as u8) as char;
            let coeff: Vec<f64> =
                COEFF_RANGE.iter().map(|&(lo, hi)| (rng.random_range(lo..hi) * 1000.0).round() / 1000.0).collect();
            for p in Pairing::all() {
                let (h, aw) = (p.home.index(), p.away.index());
                let rating = |slot: PotSlot| -> CliResult<Rating> {
                    if params.family.uses_pots() {
                        Ok(Rating::pot(slot))
                    } else {
                        Ok(Rating::new(coeff[usize::from(slot.index() - 1)])?)
                    }
                };
                let s = sample_score(&params, rating(p.home)?, rating(p.away)?, &mut rng)?;
                rows.push(DatasetRow {
                    season: season.clone(),
                    home_name: format!("{season} {group}{h}"),
                    away_name: format!("{season} {group}{aw}"),
                    home_pot: h,
                    away_pot: aw,
                    home_coeff: coeff[usize::from(h - 1)],
                    away_coeff: coeff[usize::from(aw - 1)],
                    home_goals: s.home,
                    away_goals: s.away,
                });
            }
        }
    }
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| write_error(dir, e))?;
    }
    write_file(&a.out, &rows)?;
    let m = clock.manifest(
        "synth",
        json!({ "seasons": a.seasons, "seed": a.seed, "params": params }),
        Some(a.seed),
        json!({ "rows": rows.len() }),
    );
    // The dataset stays a plain CSV; its manifest sits next to it.
    let mut sidecar = a.out.clone().into_os_string();
    sidecar.push(".manifest.json");
    write_json(&PathBuf::from(sidecar), &m)?;
    println!("wrote {} matches to {}", rows.len(), a.out.display());
    Ok(())
}
