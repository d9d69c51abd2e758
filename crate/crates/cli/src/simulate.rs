use std::path::PathBuf;

use clap::Args;
use serde::Serialize;
use serde_json::json;
use stakeless_core::montecarlo::{cost_curve, find_dominated, run_simulation};
use stakeless_core::schedule::enumerate_schedules;
use stakeless_core::{CountingMode, ScheduleSpec, SimulationConfig, StakelessReport, TieBreakRule};

use crate::error::{write_error, CliError, CliResult};
use crate::manifest::{csv_preamble, write_json, write_text, Clock, Manifest};
use crate::ModelArgs;

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1_000_000)]
    runs: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    model: ModelArgs,
    /// goal-difference or head-to-head.
    #[arg(long, default_value = "head-to-head")]
    rule: TieBreakRule,
    /// `all` or a comma-separated list of schedule labels such as 4112,4113.
    #[arg(long, default_value = "all")]
    schedules: String,
    /// per-match or at-least-one.
    #[arg(long, default_value = "per-match")]
    counting: CountingMode,
    /// Also check that no position is decided after three matchdays.
    #[arg(long)]
    audit_md3: bool,
    /// Weight of a weakly stakeless matchday-5 game in the cost curve.
    #[arg(long, default_value_t = 1.0)]
    w5: f64,
    /// Cost curve from r = 1 to this ratio of strong to weak last-matchday cost.
    #[arg(long, default_value_t = 10.0)]
    r_max: f64,
    #[arg(long, default_value_t = 0.1)]
    r_step: f64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn parse_schedules(s: &str) -> CliResult<Vec<ScheduleSpec>> {
    if s.trim() == "all" {
        return Ok(enumerate_schedules());
    }
    s.split(',').map(|l| l.parse::<ScheduleSpec>().map_err(CliError::from)).collect()
}

#[derive(Serialize)]
struct ReportRow {
    schedule: String,
    p_weak_md5: f64,
    se_weak_md5: f64,
    rank_weak_md5: u32,
    p_weak_md6: f64,
    se_weak_md6: f64,
    rank_weak_md6: u32,
    p_strong_md6: f64,
    se_strong_md6: f64,
    rank_strong_md6: u32,
    exact_weak_md5: f64,
    at_least_one_weak_md5: f64,
    at_least_one_weak_md6: f64,
    at_least_one_strong_md6: f64,
    per_match_weak_md5: f64,
    per_match_weak_md6: f64,
    per_match_strong_md6: f64,
}

#[derive(Serialize)]
struct CostRow {
    schedule: String,
    r: f64,
    cost: f64,
}

#[derive(Serialize)]
struct Dominance {
    schedule: String,
    dominated_by: String,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    manifest: &'a Manifest,
    report: &'a StakelessReport,
    dominated: &'a [Dominance],
}

fn r_grid(max: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(step > 0.0 && max >= 1.0 && (max - 1.0) / step <= 1e6) {
        return Err(CliError::Input(format!("cost curve grid 1..={max} step {step} is not usable")));
    }
    let n = ((max - 1.0) / step + 1e-9).floor() as usize;
    // Rounded so that the printed grid reads 1.1 rather than 1.1000000000000001.
    Ok((0..=n).map(|i| ((1.0 + i as f64 * step) * 1e9).round() / 1e9).collect())
}

fn csv_body<T: Serialize>(rows: &[T]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Failed(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Failed(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn run(a: SimulateArgs) -> CliResult<()> {
    let clock = Clock::start();
    let cfg = SimulationConfig {
        runs: a.runs,
        seed: a.seed,
        rule: a.rule,
        params: a.model.load()?,
        schedules: parse_schedules(&a.schedules)?,
        counting_mode: a.counting,
        audit_md3: a.audit_md3,
    };
    let r_values = r_grid(a.r_max, a.r_step)?;
    std::fs::create_dir_all(&a.out).map_err(|e| write_error(&a.out, e))?;

    let report = run_simulation(&cfg)?;
    let dominated: Vec<Dominance> = if report.rows.len() >= 2 {
        find_dominated(&report)?
            .into_iter()
            .map(|(s, t)| Dominance { schedule: s.label(), dominated_by: t.label() })
            .collect()
    } else {
        Vec::new()
    };

    let rows: Vec<ReportRow> = report
        .rows
        .iter()
        .map(|r| ReportRow {
            schedule: r.schedule.label(),
            p_weak_md5: r.p_weak_md5,
            se_weak_md5: r.se_weak_md5,
            rank_weak_md5: r.rank_weak_md5,
            p_weak_md6: r.p_weak_md6,
            se_weak_md6: r.se_weak_md6,
            rank_weak_md6: r.rank_weak_md6,
            p_strong_md6: r.p_strong_md6,
            se_strong_md6: r.se_strong_md6,
            rank_strong_md6: r.rank_strong_md6,
            exact_weak_md5: r.exact_weak_md5,
            at_least_one_weak_md5: r.at_least_one.weak_md5,
            at_least_one_weak_md6: r.at_least_one.weak_md6,
            at_least_one_strong_md6: r.at_least_one.strong_md6,
            per_match_weak_md5: r.per_match_fraction.weak_md5,
            per_match_weak_md6: r.per_match_fraction.weak_md6,
            per_match_strong_md6: r.per_match_fraction.strong_md6,
        })
        .collect();
    let costs: Vec<CostRow> = cost_curve(&report, a.w5, &r_values)
        .into_iter()
        .flat_map(|(s, pts)| pts.into_iter().map(move |(r, cost)| CostRow { schedule: s.label(), r, cost }))
        .collect();

    let best = |f: fn(&ReportRow) -> f64| rows.iter().min_by(|x, y| f(x).total_cmp(&f(y))).map(|r| r.schedule.clone());
    let outputs = json!({
        "schedules": rows.len(),
        "lowest_weak_md5": best(|r| r.p_weak_md5),
        "lowest_weak_md6": best(|r| r.p_weak_md6),
        "lowest_strong_md6": best(|r| r.p_strong_md6),
        "fallback_tie_rate": report.fallback_tie_rate,
        "strong_md5_matches": report.strong_md5_matches,
        "position_violations": report.position_violations,
        "md3_fixed_violations": report.md3_fixed_violations,
        "dominated": dominated.iter().map(|d| format!("{}<{}", d.schedule, d.dominated_by)).collect::<Vec<_>>(),
    });
    let config = json!({
        "runs": cfg.runs,
        "seed": cfg.seed,
        "rule": cfg.rule.name(),
        "params": cfg.params,
        "schedules": cfg.schedules.iter().map(|s| s.label()).collect::<Vec<_>>(),
        "counting": cfg.counting_mode.name(),
        "audit_md3": cfg.audit_md3,
        "w5": a.w5,
        "r_max": a.r_max,
        "r_step": a.r_step,
    });
    let manifest = clock.manifest("simulate", config, Some(cfg.seed), outputs);

    write_json(
        &a.out.join("report.json"),
        &JsonReport { manifest: &manifest, report: &report, dominated: &dominated },
    )?;
    write_text(&a.out.join("report.csv"), &(csv_preamble(&manifest) + &csv_body(&rows)?))?;
    write_text(&a.out.join("cost_curve.csv"), &(csv_preamble(&manifest) + &csv_body(&costs)?))?;

    println!(
        "{} runs, seed {}, {} rule, {} counting",
        report.runs,
        report.seed,
        report.rule.name(),
        report.counting_mode.name()
    );
    println!("schedule  weak MD5 %     weak MD6 %      strong MD6 %");
    for r in &rows {
        println!(
            "{}      {:5.2} ({:>2})    {:6.2} ({:>2})    {:6.2} ({:>2})",
            r.schedule,
            100.0 * r.p_weak_md5,
            r.rank_weak_md5,
            100.0 * r.p_weak_md6,
            r.rank_weak_md6,
            100.0 * r.p_strong_md6,
            r.rank_strong_md6
        );
    }
    if !dominated.is_empty() {
        let pairs: Vec<String> = dominated.iter().map(|d| format!("{} by {}", d.schedule, d.dominated_by)).collect();
        println!("dominated: {}", pairs.join(", "));
    }
    println!("wrote report.json, report.csv and cost_curve.csv to {}", a.out.display());
    Ok(())
}
