//! Monte Carlo comparison of schedules.
//!
//! Every run samples the twelve ordered-pair results once and evaluates all
//! schedules on them: a schedule only decides which matches are still to be
//! played on matchdays 5 and 6. Run `i` draws from stream `i` of the seeded
//! generator, so the aggregate does not depend on how runs are split across
//! threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify_matchday, fixed_after_md4, fixed_after_md5, fixed_oracle, Fixedness, SentinelGoals};
use crate::domain::{MatchClass, MatchSet, Pairing, PotSlot, Rating, Score, TieBreakRule};
use crate::error::{Error, Result};
use crate::model::{rates, sample_score, ModelFamily, ModelParams, PoissonTable};
use crate::ranking::rank;
use crate::schedule::{enumerate_schedules, expand_fixture, ScheduleSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CountingMode {
    /// Share of runs with at least one such match on the matchday.
    AtLeastOnePerMatchday,
    /// Share of the matchday's two matches, averaged over runs.
    #[default]
    PerMatchFraction,
}

impl CountingMode {
    pub fn name(self) -> &'static str {
        match self {
            CountingMode::AtLeastOnePerMatchday => "at-least-one",
            CountingMode::PerMatchFraction => "per-match",
        }
    }
}

impl std::str::FromStr for CountingMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "at-least-one" => Ok(CountingMode::AtLeastOnePerMatchday),
            "per-match" => Ok(CountingMode::PerMatchFraction),
            other => Err(Error::InvalidInput(format!(
                "unknown counting mode `{other}` (expected at-least-one or per-match)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub runs: u64,
    pub seed: u64,
    pub rule: TieBreakRule,
    pub params: ModelParams,
    pub schedules: Vec<ScheduleSpec>,
    pub counting_mode: CountingMode,
    /// Also check that nothing is decided after three matchdays. Costs an
    /// enumeration of the extreme completions per run and schedule.
    pub audit_md3: bool,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            runs: 1_000_000,
            seed: 42,
            rule: TieBreakRule::HeadToHead,
            params: ModelParams::four_p_pot(),
            schedules: enumerate_schedules(),
            counting_mode: CountingMode::default(),
            audit_md3: false,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        if self.schedules.is_empty() {
            return Err(Error::InvalidParameter("no schedules selected".into()));
        }
        for (i, s) in self.schedules.iter().enumerate() {
            if self.schedules[..i].contains(s) {
                return Err(Error::InvalidParameter(format!("schedule {s} selected twice")));
            }
        }
        if self.params.family == ModelFamily::Baseline {
            return Err(Error::UnsupportedFamily(self.params.family.to_string()));
        }
        self.params.validate()
    }
}

/// The three event probabilities of one schedule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StakelessProbabilities {
    pub weak_md5: f64,
    pub weak_md6: f64,
    pub strong_md6: f64,
}

impl StakelessProbabilities {
    pub fn as_array(&self) -> [f64; 3] {
        [self.weak_md5, self.weak_md6, self.strong_md6]
    }

    /// `w5·weak_md5 + weak_md6 + r·strong_md6`.
    pub fn weighted_cost(&self, w5: f64, r: f64) -> f64 {
        w5 * self.weak_md5 + self.weak_md6 + r * self.strong_md6
    }
}

/// Raw event counts of one schedule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventCounts {
    pub runs_weak_md5: u64,
    pub runs_weak_md6: u64,
    pub runs_strong_md6: u64,
    pub matches_weak_md5: u64,
    pub matches_weak_md6: u64,
    pub matches_strong_md6: u64,
    pub matches_strong_md5: u64,
    /// Decided positions contradicted later in the same run.
    pub position_violations: u64,
    /// Runs in which some position was decided after three matchdays.
    pub md3_fixed: u64,
}

impl EventCounts {
    fn add(&mut self, o: &EventCounts) {
        self.runs_weak_md5 += o.runs_weak_md5;
        self.runs_weak_md6 += o.runs_weak_md6;
        self.runs_strong_md6 += o.runs_strong_md6;
        self.matches_weak_md5 += o.matches_weak_md5;
        self.matches_weak_md6 += o.matches_weak_md6;
        self.matches_strong_md6 += o.matches_strong_md6;
        self.matches_strong_md5 += o.matches_strong_md5;
        self.position_violations += o.position_violations;
        self.md3_fixed += o.md3_fixed;
    }

    fn probabilities(&self, mode: CountingMode, runs: u64) -> StakelessProbabilities {
        let n = runs as f64;
        match mode {
            CountingMode::AtLeastOnePerMatchday => StakelessProbabilities {
                weak_md5: self.runs_weak_md5 as f64 / n,
                weak_md6: self.runs_weak_md6 as f64 / n,
                strong_md6: self.runs_strong_md6 as f64 / n,
            },
            CountingMode::PerMatchFraction => StakelessProbabilities {
                weak_md5: self.matches_weak_md5 as f64 / (2.0 * n),
                weak_md6: self.matches_weak_md6 as f64 / (2.0 * n),
                strong_md6: self.matches_strong_md6 as f64 / (2.0 * n),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub schedule: ScheduleSpec,
    /// Probabilities under the configured counting mode.
    pub p_weak_md5: f64,
    pub p_weak_md6: f64,
    pub p_strong_md6: f64,
    pub se_weak_md5: f64,
    pub se_weak_md6: f64,
    pub se_strong_md6: f64,
    /// Competition ranks, 1 = lowest probability.
    pub rank_weak_md5: u32,
    pub rank_weak_md6: u32,
    pub rank_strong_md6: u32,
    pub at_least_one: StakelessProbabilities,
    pub per_match_fraction: StakelessProbabilities,
    /// Matchday-5 probability under the configured counting mode, computed
    /// exactly from the outcome probabilities of the first eight matches.
    pub exact_weak_md5: f64,
    pub counts: EventCounts,
}

impl ScheduleRow {
    pub fn probabilities(&self) -> StakelessProbabilities {
        StakelessProbabilities { weak_md5: self.p_weak_md5, weak_md6: self.p_weak_md6, strong_md6: self.p_strong_md6 }
    }

    pub fn standard_errors(&self) -> [f64; 3] {
        [self.se_weak_md5, self.se_weak_md6, self.se_strong_md6]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StakelessReport {
    pub runs: u64,
    pub seed: u64,
    pub rule: TieBreakRule,
    pub params: ModelParams,
    pub counting_mode: CountingMode,
    pub rows: Vec<ScheduleRow>,
    /// Share of runs whose final table needed the pot-order fallback.
    pub fallback_tie_rate: f64,
    /// Strongly stakeless matchday-5 matches over all runs and schedules.
    pub strong_md5_matches: u64,
    /// Decided positions that a later state of the same run contradicted.
    pub position_violations: u64,
    /// Runs and schedules with a decided position after three matchdays, if audited.
    pub md3_fixed_violations: Option<u64>,
}

impl StakelessReport {
    pub fn row(&self, label: &str) -> Option<&ScheduleRow> {
        self.rows.iter().find(|r| r.schedule.label() == label)
    }
}

/// Standard error `sqrt(p(1 − p)/n)` of a simulated probability.
pub fn error_bound(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).max(0.0).sqrt()
}

/// [`StakelessProbabilities::weighted_cost`] of a report row.
pub fn weighted_cost(row: &ScheduleRow, w5: f64, r: f64) -> f64 {
    row.probabilities().weighted_cost(w5, r)
}

/// Cost of every schedule at each ratio `r` between the cost of a strongly
/// and a weakly stakeless last-matchday game.
pub fn cost_curve(report: &StakelessReport, w5: f64, r_values: &[f64]) -> Vec<(ScheduleSpec, Vec<(f64, f64)>)> {
    report
        .rows
        .iter()
        .map(|row| (row.schedule, r_values.iter().map(|&r| (r, weighted_cost(row, w5, r))).collect()))
        .collect()
}

/// Pairs `(dominated, dominator)`: the dominator is no worse on any of the
/// three probabilities and better on at least one by more than three
/// standard errors of the difference. The matchday-5 comparison uses the
/// exact value, so ties between schedules with the same first eight matches
/// stay ties.
pub fn find_dominated(report: &StakelessReport) -> Result<Vec<(ScheduleSpec, ScheduleSpec)>> {
    if report.rows.len() < 2 {
        return Err(Error::InvalidInput("dominance needs at least two schedules".into()));
    }
    let mut out = Vec::new();
    for s in &report.rows {
        for t in &report.rows {
            if s.schedule == t.schedule {
                continue;
            }
            let (mut ps, mut pt) = (s.probabilities().as_array(), t.probabilities().as_array());
            ps[0] = s.exact_weak_md5;
            pt[0] = t.exact_weak_md5;
            let (es, et) = (s.standard_errors(), t.standard_errors());
            let no_worse = (0..3).all(|k| pt[k] <= ps[k]);
            let better = (0..3).any(|k| ps[k] - pt[k] > 3.0 * (es[k] * es[k] + et[k] * et[k]).sqrt());
            if no_worse && better {
                out.push((s.schedule, t.schedule));
            }
        }
    }
    Ok(out)
}

fn outcome_probabilities(params: &ModelParams, p: Pairing) -> Result<[f64; 3]> {
    const CAP: u16 = 60;
    let (rh, ra) = (Rating::pot(p.home), Rating::pot(p.away));
    let (mut win, mut draw) = (0.0, 0.0);
    for h in 0..=CAP {
        for a in 0..=h {
            let pr = crate::model::score_pmf(params, rh, ra, Score::new(h, a))?;
            if h == a {
                draw += pr;
            } else {
                win += pr;
            }
        }
    }
    Ok([win, draw, (1.0 - win - draw).max(0.0)])
}

/// Exact matchday-5 stakeless probabilities `(at least one, per match)`.
///
/// Positions decided after matchday 4 depend only on points and on which
/// pairs have met twice, so enumerating the 3⁸ outcome patterns of the first
/// eight matches is exact.
pub fn exact_weak_md5(params: &ModelParams, rule: TieBreakRule, schedule: &ScheduleSpec) -> Result<(f64, f64)> {
    let pairs = schedule.first_eight();
    let probs = pairs.iter().map(|&p| outcome_probabilities(params, p)).collect::<Result<Vec<_>>>()?;
    let reps = [Score::new(1, 0), Score::new(0, 0), Score::new(0, 1)];
    let (mut any, mut per) = (0.0, 0.0);
    for code in 0..3usize.pow(8) {
        let mut set = MatchSet::new();
        let mut pr = 1.0;
        let mut c = code;
        for (k, &p) in pairs.iter().enumerate() {
            set.set(p, reps[c % 3]);
            pr *= probs[k][c % 3];
            c /= 3;
        }
        let f = fixed_after_md4(&set, rule)?;
        let weak = classify_matchday(&f, &schedule.md5).iter().filter(|&&m| m == MatchClass::WeaklyStakeless).count();
        if weak > 0 {
            any += pr;
        }
        per += pr * weak as f64 / 2.0;
    }
    Ok((any, per))
}

/// Per-schedule data that does not change between runs.
struct Plan {
    first_eight: Vec<Pairing>,
    md5: [Pairing; 2],
    md6: [Pairing; 2],
    md3_played: Vec<Pairing>,
    md3_remaining: Vec<Pairing>,
}

enum Sampler {
    Tables(Vec<(PoissonTable, PoissonTable)>),
    Joint(ModelParams),
}

fn sample_group(sampler: &Sampler, rng: &mut ChaCha8Rng) -> MatchSet {
    let mut set = MatchSet::new();
    match sampler {
        Sampler::Tables(t) => {
            for (p, (th, ta)) in Pairing::all().zip(t) {
                let h = th.sample(rng);
                let a = ta.sample(rng);
                set.set(p, Score::new(h, a));
            }
        }
        Sampler::Joint(params) => {
            for p in Pairing::all() {
                let s = sample_score(params, Rating::pot(p.home), Rating::pot(p.away), rng).expect("family checked");
                set.set(p, s);
            }
        }
    }
    set
}

fn subset(full: &MatchSet, pairs: &[Pairing]) -> MatchSet {
    let mut s = MatchSet::new();
    for &p in pairs {
        if let Some(score) = full.get(p) {
            s.set(p, score);
        }
    }
    s
}

fn without(full: &MatchSet, pairs: &[Pairing]) -> MatchSet {
    let mut s = *full;
    for &p in pairs {
        s.clear(p);
    }
    s
}

fn count_classes(classes: &[MatchClass; 2], class: MatchClass) -> u64 {
    classes.iter().filter(|&&c| c == class).count() as u64
}

fn evaluate(
    plan: &Plan,
    full: &MatchSet,
    final_pos: &[u8; 4],
    rule: TieBreakRule,
    audit_md3: bool,
    acc: &mut EventCounts,
) {
    let md4 = subset(full, &plan.first_eight);
    let md5_state = without(full, &plan.md6);
    let f4 = fixed_after_md4(&md4, rule).expect("eight matches after matchday 4");
    let f5 = fixed_after_md5(&md5_state, rule, SentinelGoals::default()).expect("two matches left");

    let c5 = classify_matchday(&f4, &plan.md5);
    let c6 = classify_matchday(&f5, &plan.md6);
    let weak5 = count_classes(&c5, MatchClass::WeaklyStakeless);
    let strong5 = count_classes(&c5, MatchClass::StronglyStakeless);
    let weak6 = count_classes(&c6, MatchClass::WeaklyStakeless);
    let strong6 = count_classes(&c6, MatchClass::StronglyStakeless);
    acc.matches_weak_md5 += weak5;
    acc.matches_strong_md5 += strong5;
    acc.matches_weak_md6 += weak6;
    acc.matches_strong_md6 += strong6;
    acc.runs_weak_md5 += u64::from(weak5 > 0);
    acc.runs_weak_md6 += u64::from(weak6 > 0);
    acc.runs_strong_md6 += u64::from(strong6 > 0);

    for slot in PotSlot::ALL {
        let i = usize::from(slot.index() - 1);
        if let Fixedness::Fixed(p) = f4.get(slot) {
            if f5.get(slot) != Fixedness::Fixed(p) || final_pos[i] != p {
                acc.position_violations += 1;
            }
        }
        if let Fixedness::Fixed(p) = f5.get(slot) {
            if final_pos[i] != p {
                acc.position_violations += 1;
            }
        }
    }

    if audit_md3 {
        let md3 = subset(full, &plan.md3_played);
        let f3 = fixed_oracle(&md3, &plan.md3_remaining, rule, &[0, SentinelGoals::default().goals()])
            .expect("six matches remaining");
        acc.md3_fixed += u64::from(f3.fixed_count() > 0);
    }
}

#[derive(Clone, Default)]
struct Totals {
    per_schedule: Vec<EventCounts>,
    fallback_runs: u64,
}

impl Totals {
    fn merge(mut self, other: Totals) -> Totals {
        if self.per_schedule.is_empty() {
            return other;
        }
        for (a, b) in self.per_schedule.iter_mut().zip(&other.per_schedule) {
            a.add(b);
        }
        self.fallback_runs += other.fallback_runs;
        self
    }
}

fn competition_ranks(values: &[f64]) -> Vec<u32> {
    values.iter().map(|v| 1 + values.iter().filter(|w| *w < v).count() as u32).collect()
}

/// Simulates `cfg.runs` group stages and evaluates every selected schedule.
pub fn run_simulation(cfg: &SimulationConfig) -> Result<StakelessReport> {
    cfg.validate()?;
    let plans: Vec<Plan> = cfg
        .schedules
        .iter()
        .map(|s| {
            let fixture = expand_fixture(s)?;
            let md3_played = fixture.prefix(3);
            let md3_remaining = Pairing::all().filter(|p| !md3_played.contains(p)).collect();
            Ok(Plan { first_eight: s.first_eight(), md5: s.md5, md6: s.md6, md3_played, md3_remaining })
        })
        .collect::<Result<_>>()?;

    let sampler = if cfg.params.family.is_bivariate() {
        Sampler::Joint(cfg.params)
    } else {
        let tables = Pairing::all()
            .map(|p| {
                let (lh, la) = rates(&cfg.params, Rating::pot(p.home), Rating::pot(p.away))?;
                Ok((PoissonTable::new(lh), PoissonTable::new(la)))
            })
            .collect::<Result<_>>()?;
        Sampler::Tables(tables)
    };

    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let empty = || Totals { per_schedule: vec![EventCounts::default(); plans.len()], fallback_runs: 0 };
    let totals = (0..cfg.runs)
        .into_par_iter()
        .fold(empty, |mut acc, i| {
            let mut rng = base.clone();
            rng.set_stream(i);
            let full = sample_group(&sampler, &mut rng);
            let table = rank(&full, cfg.rule);
            acc.fallback_runs += u64::from(table.used_fallback());
            let mut final_pos = [0u8; 4];
            for slot in PotSlot::ALL {
                final_pos[usize::from(slot.index() - 1)] = table.position_of(slot);
            }
            for (plan, counts) in plans.iter().zip(acc.per_schedule.iter_mut()) {
                evaluate(plan, &full, &final_pos, cfg.rule, cfg.audit_md3, counts);
            }
            acc
        })
        .reduce(Totals::default, Totals::merge);

    let per_schedule = if totals.per_schedule.is_empty() { empty().per_schedule } else { totals.per_schedule };
    let probs: Vec<StakelessProbabilities> =
        per_schedule.iter().map(|c| c.probabilities(cfg.counting_mode, cfg.runs)).collect();
    let ranks: Vec<Vec<u32>> =
        (0..3).map(|k| competition_ranks(&probs.iter().map(|p| p.as_array()[k]).collect::<Vec<_>>())).collect();

    let exact = cfg
        .schedules
        .iter()
        .map(|s| {
            let (any, per) = exact_weak_md5(&cfg.params, cfg.rule, s)?;
            Ok(match cfg.counting_mode {
                CountingMode::AtLeastOnePerMatchday => any,
                CountingMode::PerMatchFraction => per,
            })
        })
        .collect::<Result<Vec<f64>>>()?;

    let rows = cfg
        .schedules
        .iter()
        .zip(&per_schedule)
        .zip(&probs)
        .enumerate()
        .map(|(i, ((spec, counts), p))| ScheduleRow {
            schedule: *spec,
            p_weak_md5: p.weak_md5,
            p_weak_md6: p.weak_md6,
            p_strong_md6: p.strong_md6,
            se_weak_md5: error_bound(p.weak_md5, cfg.runs),
            se_weak_md6: error_bound(p.weak_md6, cfg.runs),
            se_strong_md6: error_bound(p.strong_md6, cfg.runs),
            rank_weak_md5: ranks[0][i],
            rank_weak_md6: ranks[1][i],
            rank_strong_md6: ranks[2][i],
            at_least_one: counts.probabilities(CountingMode::AtLeastOnePerMatchday, cfg.runs),
            per_match_fraction: counts.probabilities(CountingMode::PerMatchFraction, cfg.runs),
            exact_weak_md5: exact[i],
            counts: *counts,
        })
        .collect::<Vec<_>>();

    Ok(StakelessReport {
        runs: cfg.runs,
        seed: cfg.seed,
        rule: cfg.rule,
        params: cfg.params,
        counting_mode: cfg.counting_mode,
        fallback_tie_rate: totals.fallback_runs as f64 / cfg.runs as f64,
        strong_md5_matches: per_schedule.iter().map(|c| c.matches_strong_md5).sum(),
        position_violations: per_schedule.iter().map(|c| c.position_violations).sum(),
        md3_fixed_violations: cfg.audit_md3.then(|| per_schedule.iter().map(|c| c.md3_fixed).sum()),
        rows,
    })
}
