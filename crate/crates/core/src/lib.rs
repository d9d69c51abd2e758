//! Stakeless-match analysis for four-team double round-robin groups.
//!
//! The crate is organised bottom-up:
//!
//! * [`domain`]: pot-identified teams, scores, match records and group results.
//! * [`ranking`]: group standings under goal-difference or head-to-head tie-breaking.
//! * [`classify`]: which final positions are already decided after matchday 4 or 5,
//!   and the resulting competitive / weakly / strongly stakeless match classes.
//! * [`schedule`]: the twelve legal closing-matchday schedules and their full fixtures.
//! * [`model`]: independent and bivariate Poisson score models.
//! * [`fit`]: maximum-likelihood fitting, bootstrap intervals and forecast metrics.
//! * [`montecarlo`]: seeded, worker-count independent simulation of every schedule.

pub mod classify;
pub mod domain;
pub mod error;
pub mod fit;
pub mod model;
pub mod montecarlo;
pub mod ranking;
pub mod schedule;

pub use classify::{
    classify_matchday, fixed_after_md4, fixed_after_md5, fixed_oracle, Fixedness, FixednessVector, SentinelGoals,
    DEFAULT_ORACLE_GRID,
};
pub use domain::{
    GroupResults, MatchClass, MatchRecord, MatchSet, Outcome, Pairing, PotSlot, Rating, Score, TieBreakRule, MAX_GOALS,
};
pub use error::{Error, Result};
pub use fit::{FitResult, MatchObservation};
pub use model::{BaselineTable, ModelFamily, ModelParams, ScorePredictor};
pub use montecarlo::{CountingMode, ScheduleRow, SimulationConfig, StakelessReport};
pub use ranking::{compute_table, RankingTable, Separation, StandingRow};
pub use schedule::{FullFixture, ScheduleSpec};
