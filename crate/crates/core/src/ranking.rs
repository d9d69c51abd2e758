//! Group standings.
//!
//! Teams are ordered by points (3/1/0). Ties are broken either by overall
//! goal difference and goals scored, or by the head-to-head record among the
//! tied teams (points, then goal difference) followed by the overall figures.
//! When a strict subset is still level after the head-to-head step, the
//! head-to-head criteria are applied once more to that subset. Anything still
//! level at the end is ordered by ascending pot index, and the table records
//! that this fallback was needed.

use serde::{Deserialize, Serialize};

use crate::domain::{MatchRecord, MatchSet, PotSlot, TieBreakRule};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandingRow {
    pub slot: Option<PotSlot>,
    pub played: u32,
    pub won: u32,
    pub drawn: u32,
    pub lost: u32,
    pub goals_for: i32,
    pub goals_against: i32,
    pub goal_diff: i32,
    pub points: i32,
}

impl StandingRow {
    pub fn slot(&self) -> PotSlot {
        self.slot.expect("standing row without slot")
    }
}

/// Criterion that separated two adjacent rows of a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Separation {
    Points,
    HeadToHeadPoints,
    HeadToHeadGoalDiff,
    GoalDiff,
    GoalsFor,
    /// Level on every criterion; ordered by ascending pot index.
    Fallback,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankingTable {
    pub rows: [StandingRow; 4],
    /// `separations[i]` explains why `rows[i]` is above `rows[i + 1]`.
    pub separations: [Separation; 3],
}

impl RankingTable {
    pub fn order(&self) -> [PotSlot; 4] {
        [self.rows[0].slot(), self.rows[1].slot(), self.rows[2].slot(), self.rows[3].slot()]
    }

    /// Final position (1..=4) of `slot`.
    pub fn position_of(&self, slot: PotSlot) -> u8 {
        self.rows.iter().position(|r| r.slot == Some(slot)).expect("slot in table") as u8 + 1
    }

    pub fn used_fallback(&self) -> bool {
        self.separations.contains(&Separation::Fallback)
    }

    pub fn row(&self, slot: PotSlot) -> &StandingRow {
        &self.rows[usize::from(self.position_of(slot) - 1)]
    }
}

/// Per-team record restricted to matches among a subset of teams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadToHead {
    pub slot: PotSlot,
    pub points: i32,
    pub goal_diff: i32,
    pub goals_for: i32,
}

/// Standings from a list of matches. Duplicate ordered pairs are rejected.
pub fn compute_table(matches: &[MatchRecord], rule: TieBreakRule) -> Result<RankingTable> {
    let set = MatchSet::from_records(matches)?;
    Ok(rank(&set, rule))
}

/// Head-to-head points, goal difference and goals scored among `subset`.
pub fn head_to_head_stats(matches: &[MatchRecord], subset: &[PotSlot]) -> Result<Vec<HeadToHead>> {
    let mut members = subset.to_vec();
    members.sort();
    members.dedup();
    if members.len() < 2 {
        return Err(Error::InvalidInput("head-to-head needs at least two teams".into()));
    }
    let set = MatchSet::from_records(matches)?;
    let mut mask = [false; 4];
    for s in &members {
        mask[s.idx()] = true;
    }
    let stats = tally(&set, mask);
    Ok(members
        .into_iter()
        .map(|s| {
            let t = &stats[s.idx()];
            HeadToHead { slot: s, points: t.points, goal_diff: t.gf - t.ga, goals_for: t.gf }
        })
        .collect())
}

#[derive(Clone, Copy, Default)]
struct Tally {
    played: u32,
    won: u32,
    drawn: u32,
    lost: u32,
    gf: i32,
    ga: i32,
    points: i32,
}

#[inline]
fn tally(set: &MatchSet, mask: [bool; 4]) -> [Tally; 4] {
    let mut t = [Tally::default(); 4];
    for h in 0..4 {
        if !mask[h] {
            continue;
        }
        for a in 0..4 {
            if a == h || !mask[a] {
                continue;
            }
            let Some(s) = set.cell(h, a) else { continue };
            let (hg, ag) = (i32::from(s.home), i32::from(s.away));
            t[h].played += 1;
            t[a].played += 1;
            t[h].gf += hg;
            t[h].ga += ag;
            t[a].gf += ag;
            t[a].ga += hg;
            if hg > ag {
                t[h].won += 1;
                t[a].lost += 1;
                t[h].points += 3;
            } else if hg < ag {
                t[a].won += 1;
                t[h].lost += 1;
                t[a].points += 3;
            } else {
                t[h].drawn += 1;
                t[a].drawn += 1;
                t[h].points += 1;
                t[a].points += 1;
            }
        }
    }
    t
}

/// Standings of a match set.
pub fn rank(set: &MatchSet, rule: TieBreakRule) -> RankingTable {
    let all = tally(set, [true; 4]);
    let mut order: [usize; 4] = [0, 1, 2, 3];
    let mut seps = [Separation::Points; 3];

    // Insertion sort keeps equal-point teams in pot order.
    sort_desc(&mut order, |i| (all[i].points, 0));

    let mut start = 0;
    while start < 4 {
        let mut end = start + 1;
        while end < 4 && all[order[end]].points == all[order[start]].points {
            end += 1;
        }
        if end - start >= 2 {
            let (o, s) = (&mut order[start..end], &mut seps[start..end - 1]);
            match rule {
                TieBreakRule::GoalDifference => overall_tail(&all, o, s),
                TieBreakRule::HeadToHead => head_to_head(set, &all, o, s, true),
            }
        }
        start = end;
    }

    let mut rows = [StandingRow::default(); 4];
    for (pos, &i) in order.iter().enumerate() {
        let t = &all[i];
        rows[pos] = StandingRow {
            slot: Some(PotSlot::from_idx(i)),
            played: t.played,
            won: t.won,
            drawn: t.drawn,
            lost: t.lost,
            goals_for: t.gf,
            goals_against: t.ga,
            goal_diff: t.gf - t.ga,
            points: t.points,
        };
    }
    RankingTable { rows, separations: seps }
}

/// Stable descending sort on a two-level key; ties stay in their current order.
#[inline]
fn sort_desc<F: Fn(usize) -> (i32, i32)>(group: &mut [usize], key: F) {
    for i in 1..group.len() {
        let mut j = i;
        while j > 0 && key(group[j]) > key(group[j - 1]) {
            group.swap(j, j - 1);
            j -= 1;
        }
    }
}

fn pot_order(group: &mut [usize]) {
    group.sort_unstable();
}

/// Overall goal difference, goals scored, then pot order.
fn overall_tail(all: &[Tally; 4], group: &mut [usize], seps: &mut [Separation]) {
    pot_order(group);
    sort_desc(group, |i| (all[i].gf - all[i].ga, all[i].gf));
    for k in 0..group.len() - 1 {
        let (a, b) = (&all[group[k]], &all[group[k + 1]]);
        seps[k] = if a.gf - a.ga != b.gf - b.ga {
            Separation::GoalDiff
        } else if a.gf != b.gf {
            Separation::GoalsFor
        } else {
            Separation::Fallback
        };
    }
}

fn head_to_head(set: &MatchSet, all: &[Tally; 4], group: &mut [usize], seps: &mut [Separation], may_reapply: bool) {
    let mut mask = [false; 4];
    for &i in group.iter() {
        mask[i] = true;
    }
    let h2h = tally(set, mask);
    pot_order(group);
    sort_desc(group, |i| (h2h[i].points, h2h[i].gf - h2h[i].ga));

    let n = group.len();
    let mut start = 0;
    while start < n {
        let key = |i: usize| (h2h[i].points, h2h[i].gf - h2h[i].ga);
        let mut end = start + 1;
        while end < n && key(group[end]) == key(group[start]) {
            end += 1;
        }
        if end < n {
            let (a, b) = (&h2h[group[end - 1]], &h2h[group[end]]);
            seps[end - 1] =
                if a.points != b.points { Separation::HeadToHeadPoints } else { Separation::HeadToHeadGoalDiff };
        }
        if end - start >= 2 {
            let (o, s) = (&mut group[start..end], &mut seps[start..end - 1]);
            if may_reapply && end - start < n {
                head_to_head(set, all, o, s, false);
            } else {
                overall_tail(all, o, s);
            }
        }
        start = end;
    }
}
