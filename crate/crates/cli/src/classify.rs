use std::path::PathBuf;

use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use stakeless_core::classify::MAX_ORACLE_MATCHES;
use stakeless_core::model::sample_score;
use stakeless_core::schedule::enumerate_schedules;
use stakeless_core::{
    classify_matchday, fixed_after_md4, fixed_after_md5, fixed_oracle, Fixedness, FixednessVector, MatchClass,
    MatchSet, ModelParams, Pairing, PotSlot, Rating, Score, SentinelGoals, TieBreakRule, DEFAULT_ORACLE_GRID,
};

use crate::error::{read_error, CliError, CliResult};
use crate::manifest::{write_json, Clock};
use crate::state::GroupState;

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("input").required(true).args(["state", "random"]))]
pub struct ClassifyArgs {
    /// State file: `MD<k>: <home>-<away> <h>:<a>` per played match,
    /// `MD<k>: <home>-<away>` per match still to be played.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Instead of a state file, cross-check this many random states after
    /// matchdays 4 and 5 against the brute-force oracle.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// goal-difference or head-to-head.
    #[arg(long, default_value = "head-to-head")]
    rule: TieBreakRule,
    /// Cross-check the closed-form answer with the brute-force oracle.
    #[arg(long)]
    oracle: bool,
    /// Also write the result as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Method {
    /// Fewer than three complete matchdays: nothing can be decided.
    TooEarly,
    ClosedFormMd4,
    ClosedFormMd5,
    Oracle,
    FinalTable,
}

fn decide(set: &MatchSet, rule: TieBreakRule) -> CliResult<(FixednessVector, Method)> {
    let remaining = set.unplayed();
    let closed = match set.len() {
        8 => fixed_after_md4(set, rule).ok().map(|f| (f, Method::ClosedFormMd4)),
        10 => fixed_after_md5(set, rule, SentinelGoals::default()).ok().map(|f| (f, Method::ClosedFormMd5)),
        _ => None,
    };
    if let Some(c) = closed {
        return Ok(c);
    }
    if remaining.len() > MAX_ORACLE_MATCHES {
        return Ok((FixednessVector::all_open(), Method::TooEarly));
    }
    let method = if remaining.is_empty() { Method::FinalTable } else { Method::Oracle };
    Ok((fixed_oracle(set, &remaining, rule, &DEFAULT_ORACLE_GRID)?, method))
}

fn position_text(f: Fixedness) -> String {
    match f {
        Fixedness::Fixed(p) => p.to_string(),
        Fixedness::Open => "open".into(),
    }
}

fn class_text(c: MatchClass) -> &'static str {
    match c {
        MatchClass::Competitive => "competitive",
        MatchClass::WeaklyStakeless => "weakly stakeless",
        MatchClass::StronglyStakeless => "strongly stakeless",
    }
}

pub fn run(a: ClassifyArgs) -> CliResult<()> {
    match (&a.state, a.random) {
        (Some(path), _) => classify_file(&a, path.clone()),
        (None, Some(n)) => random_check(&a, n),
        (None, None) => Err(CliError::Input("either --state or --random is required".into())),
    }
}

fn classify_file(a: &ClassifyArgs, path: PathBuf) -> CliResult<()> {
    let clock = Clock::start();
    let text = std::fs::read_to_string(&path).map_err(|e| read_error(&path, e))?;
    let state = GroupState::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let outstanding = state.outstanding()?;
    let set = state.match_set();
    let (fixed, method) = decide(&set, a.rule)?;

    let oracle = if a.oracle && matches!(method, Method::ClosedFormMd4 | Method::ClosedFormMd5) {
        Some(fixed_oracle(&set, &set.unplayed(), a.rule, &DEFAULT_ORACLE_GRID)?)
    } else {
        None
    };

    println!("{} played, {} remaining, {} rule, {}", set.len(), outstanding.len(), a.rule.name(), method_text(method));
    let positions: Vec<String> =
        PotSlot::ALL.iter().map(|&s| format!("{s}: {}", position_text(fixed.get(s)))).collect();
    println!("decided positions  {}", positions.join("  "));
    let mut classes = Vec::new();
    for (k, p) in &outstanding {
        let c = classify_matchday(&fixed, &[*p, *p])[0];
        let md = k.map(|k| format!("MD{k} ")).unwrap_or_default();
        println!("{md}{p}  {}", class_text(c));
        classes.push(json!({ "matchday": k, "pairing": p.to_string(), "class": c }));
    }
    let agrees = oracle.map(|o| o == fixed);
    match agrees {
        Some(true) => println!("oracle agrees"),
        Some(false) => println!("oracle DISAGREES: {:?}", oracle.map(|o| o.as_array())),
        None if a.oracle => println!("oracle not applicable ({})", method_text(method)),
        None => {}
    }

    if let Some(out) = &a.out {
        let config = json!({ "state": path.display().to_string(), "rule": a.rule.name(), "oracle": a.oracle });
        let outputs = json!({
            "method": method,
            "positions": fixed.as_array().map(position_text),
            "classes": classes,
            "oracle_agrees": agrees,
        });
        write_json(out, &clock.manifest("classify", config, None, outputs))?;
    }
    if agrees == Some(false) {
        return Err(CliError::Failed("closed form and oracle disagree".into()));
    }
    Ok(())
}

fn method_text(m: Method) -> &'static str {
    match m {
        Method::TooEarly => "at most three matchdays played, nothing decided",
        Method::ClosedFormMd4 => "closed form after matchday 4",
        Method::ClosedFormMd5 => "closed form after matchday 5 (extreme completions)",
        Method::Oracle => "brute force over remaining results",
        Method::FinalTable => "final table",
    }
}

/// Half of the states come from the default score model, half from uniform
/// 0..=3 goals, which makes level teams far more common.
fn random_set(rng: &mut ChaCha8Rng, pairs: &[Pairing]) -> MatchSet {
    let p = ModelParams::four_p_pot();
    let uniform = rng.random_bool(0.5);
    let mut set = MatchSet::new();
    for &pr in pairs {
        let s = if uniform {
            Score::new(rng.random_range(0..=3), rng.random_range(0..=3))
        } else {
            sample_score(&p, Rating::pot(pr.home), Rating::pot(pr.away), rng).expect("pot model has rates")
        };
        set.set(pr, s);
    }
    set
}

fn random_check(a: &ClassifyArgs, n: usize) -> CliResult<()> {
    let clock = Clock::start();
    let schedules = enumerate_schedules();
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let (mut d4, mut d5) = (0usize, 0usize);
    for i in 0..n {
        let s = &schedules[i % schedules.len()];
        let md4 = random_set(&mut rng, &s.first_eight());
        let oracle = fixed_oracle(&md4, &md4.unplayed(), a.rule, &DEFAULT_ORACLE_GRID)?;
        d4 += usize::from(fixed_after_md4(&md4, a.rule)? != oracle);
        let played: Vec<Pairing> = Pairing::all().filter(|p| !s.md6.contains(p)).collect();
        let md5 = random_set(&mut rng, &played);
        let oracle = fixed_oracle(&md5, &md5.unplayed(), a.rule, &DEFAULT_ORACLE_GRID)?;
        d5 += usize::from(fixed_after_md5(&md5, a.rule, SentinelGoals::default())? != oracle);
    }
    println!("{n} random states per stage, {} rule, seed {}", a.rule.name(), a.seed);
    println!("disagreements after matchday 4: {d4}");
    println!("disagreements after matchday 5: {d5}");
    if let Some(out) = &a.out {
        let config = json!({ "random": n, "seed": a.seed, "rule": a.rule.name() });
        let outputs = json!({ "md4_disagreements": d4, "md5_disagreements": d5 });
        write_json(out, &clock.manifest("classify", config, Some(a.seed), outputs))?;
    }
    if d4 + d5 > 0 {
        return Err(CliError::Failed("closed form and oracle disagree".into()));
    }
    Ok(())
}
