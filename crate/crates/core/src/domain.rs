//! Value types shared by every module.
//!
//! Teams carry no names: a team is identified by the seeding pot it was drawn
//! from, so a group always consists of the slots 1, 2, 3 and 4.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest goal count accepted from validated input.
pub const MAX_GOALS: u16 = 99;

/// A team, identified by its seeding pot (1 = strongest).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct PotSlot(u8);

impl PotSlot {
    pub const ALL: [PotSlot; 4] = [PotSlot(1), PotSlot(2), PotSlot(3), PotSlot(4)];

    pub fn new(index: u8) -> Result<Self> {
        if (1..=4).contains(&index) {
            Ok(PotSlot(index))
        } else {
            Err(Error::InvalidInput(format!("pot index {index} is not in 1..=4")))
        }
    }

    /// Pot index in `1..=4`.
    pub fn index(self) -> u8 {
        self.0
    }

    /// Zero-based array position.
    pub(crate) fn idx(self) -> usize {
        usize::from(self.0 - 1)
    }

    pub(crate) fn from_idx(i: usize) -> Self {
        debug_assert!(i < 4);
        PotSlot(i as u8 + 1)
    }
}

impl TryFrom<u8> for PotSlot {
    type Error = Error;
    fn try_from(v: u8) -> Result<Self> {
        PotSlot::new(v)
    }
}

impl From<PotSlot> for u8 {
    fn from(p: PotSlot) -> u8 {
        p.0
    }
}

impl fmt::Display for PotSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Team strength used by the score models: a club coefficient or a pot index.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Rating(f64);

impl Rating {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Rating(value))
        } else {
            Err(Error::InvalidInput(format!("rating must be positive and finite, got {value}")))
        }
    }

    /// Pot-based rating: the value is the pot index itself.
    pub fn pot(slot: PotSlot) -> Self {
        Rating(f64::from(slot.index()))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    HomeWin,
    Draw,
    AwayWin,
}

/// Final score of one match.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Score {
    pub home: u16,
    pub away: u16,
}

impl Score {
    /// Unchecked constructor; sentinel scenarios legitimately exceed [`MAX_GOALS`].
    pub const fn new(home: u16, away: u16) -> Self {
        Score { home, away }
    }

    /// Constructor for scores read from external input.
    pub fn validated(home: u16, away: u16) -> Result<Self> {
        if home > MAX_GOALS || away > MAX_GOALS {
            return Err(Error::InvalidInput(format!("score {home}:{away} exceeds the {MAX_GOALS}-goal cap")));
        }
        Ok(Score { home, away })
    }

    pub fn outcome(self) -> Outcome {
        match self.home.cmp(&self.away) {
            std::cmp::Ordering::Greater => Outcome::HomeWin,
            std::cmp::Ordering::Equal => Outcome::Draw,
            std::cmp::Ordering::Less => Outcome::AwayWin,
        }
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.home, self.away)
    }
}

/// An ordered (home, away) pairing without a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pairing {
    pub home: PotSlot,
    pub away: PotSlot,
}

impl Pairing {
    pub fn new(home: PotSlot, away: PotSlot) -> Result<Self> {
        if home == away {
            return Err(Error::InvalidInput(format!("team {home} cannot play itself")));
        }
        Ok(Pairing { home, away })
    }

    /// Shorthand for tests and tables; panics on invalid indices.
    pub fn of(home: u8, away: u8) -> Self {
        Pairing::new(PotSlot::new(home).unwrap(), PotSlot::new(away).unwrap()).unwrap()
    }

    /// The return leg.
    pub fn mirror(self) -> Self {
        Pairing { home: self.away, away: self.home }
    }

    pub fn involves(self, slot: PotSlot) -> bool {
        self.home == slot || self.away == slot
    }

    /// Same two teams, regardless of venue.
    pub fn same_teams(self, other: Pairing) -> bool {
        self == other || self == other.mirror()
    }

    /// Every ordered pair of distinct slots, home-major.
    pub fn all() -> impl Iterator<Item = Pairing> {
        PotSlot::ALL
            .into_iter()
            .flat_map(|h| PotSlot::ALL.into_iter().filter(move |&a| a != h).map(move |a| Pairing { home: h, away: a }))
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.home, self.away)
    }
}

impl FromStr for Pairing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (h, a) = s
            .trim()
            .split_once('-')
            .ok_or_else(|| Error::InvalidInput(format!("pairing `{s}` is not `<home>-<away>`")))?;
        let parse = |t: &str| -> Result<PotSlot> {
            let v: u8 = t.trim().parse().map_err(|_| Error::InvalidInput(format!("`{t}` is not a pot index")))?;
            PotSlot::new(v)
        };
        Pairing::new(parse(h)?, parse(a)?)
    }
}

/// One played match.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatchRecord {
    pub home: PotSlot,
    pub away: PotSlot,
    pub score: Score,
}

impl MatchRecord {
    pub fn new(home: PotSlot, away: PotSlot, score: Score) -> Result<Self> {
        Pairing::new(home, away)?;
        Ok(MatchRecord { home, away, score })
    }

    pub fn pairing(&self) -> Pairing {
        Pairing { home: self.home, away: self.away }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TieBreakRule {
    GoalDifference,
    HeadToHead,
}

impl TieBreakRule {
    pub fn name(self) -> &'static str {
        match self {
            TieBreakRule::GoalDifference => "goal-difference",
            TieBreakRule::HeadToHead => "head-to-head",
        }
    }
}

impl FromStr for TieBreakRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "goal-difference" | "gd" => Ok(TieBreakRule::GoalDifference),
            "head-to-head" | "h2h" => Ok(TieBreakRule::HeadToHead),
            other => Err(Error::InvalidInput(format!(
                "unknown tie-break rule `{other}` (expected goal-difference or head-to-head)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchClass {
    Competitive,
    WeaklyStakeless,
    StronglyStakeless,
}

/// Results indexed by ordered pairing. At most one result per ordered pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct MatchSet {
    cells: [[Option<Score>; 4]; 4],
}

impl MatchSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_records(records: &[MatchRecord]) -> Result<Self> {
        let mut set = MatchSet::new();
        for r in records {
            set.insert(*r)?;
        }
        Ok(set)
    }

    /// Adds a result; a second result for the same ordered pair is rejected.
    pub fn insert(&mut self, record: MatchRecord) -> Result<()> {
        let cell = &mut self.cells[record.home.idx()][record.away.idx()];
        if cell.is_some() {
            return Err(Error::InvalidInput(format!("pairing {} appears more than once", record.pairing())));
        }
        *cell = Some(record.score);
        Ok(())
    }

    /// Sets or overwrites a result.
    pub fn set(&mut self, pairing: Pairing, score: Score) {
        self.cells[pairing.home.idx()][pairing.away.idx()] = Some(score);
    }

    pub fn clear(&mut self, pairing: Pairing) {
        self.cells[pairing.home.idx()][pairing.away.idx()] = None;
    }

    pub fn get(&self, pairing: Pairing) -> Option<Score> {
        self.cells[pairing.home.idx()][pairing.away.idx()]
    }

    #[inline]
    pub(crate) fn cell(&self, home: usize, away: usize) -> Option<Score> {
        self.cells[home][away]
    }

    pub fn len(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn played_by(&self, slot: PotSlot) -> usize {
        let i = slot.idx();
        (0..4)
            .filter(|&j| j != i)
            .map(|j| usize::from(self.cells[i][j].is_some()) + usize::from(self.cells[j][i].is_some()))
            .sum()
    }

    pub fn records(&self) -> Vec<MatchRecord> {
        Pairing::all()
            .filter_map(|p| self.get(p).map(|score| MatchRecord { home: p.home, away: p.away, score }))
            .collect()
    }

    /// Ordered pairs without a result, home-major order.
    pub fn unplayed(&self) -> Vec<Pairing> {
        Pairing::all().filter(|p| self.get(*p).is_none()).collect()
    }
}

/// Results of a group, matchday by matchday (a prefix of the six matchdays).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupResults {
    matchdays: Vec<[MatchRecord; 2]>,
}

impl GroupResults {
    pub fn new(matchdays: Vec<[MatchRecord; 2]>) -> Result<Self> {
        if matchdays.len() > 6 {
            return Err(Error::InvalidInput(format!("a group has 6 matchdays, got {}", matchdays.len())));
        }
        let mut seen = MatchSet::new();
        for (k, md) in matchdays.iter().enumerate() {
            let slots = [md[0].home, md[0].away, md[1].home, md[1].away];
            for (i, s) in slots.iter().enumerate() {
                if slots[i + 1..].contains(s) {
                    return Err(Error::InvalidInput(format!("team {s} plays twice on matchday {}", k + 1)));
                }
            }
            for m in md {
                seen.insert(*m)?;
            }
        }
        // With 6 matchdays, 12 distinct ordered pairs means full coverage.
        Ok(GroupResults { matchdays })
    }

    pub fn matchdays(&self) -> &[[MatchRecord; 2]] {
        &self.matchdays
    }

    pub fn prefix(&self, k: usize) -> GroupResults {
        GroupResults { matchdays: self.matchdays[..k.min(self.matchdays.len())].to_vec() }
    }

    pub fn match_set(&self) -> MatchSet {
        let mut set = MatchSet::new();
        for m in self.matchdays.iter().flatten() {
            set.set(m.pairing(), m.score);
        }
        set
    }

    pub fn records(&self) -> Vec<MatchRecord> {
        self.matchdays.iter().flatten().copied().collect()
    }
}
