//! Decided positions and stakeless-match classification.
//!
//! After matchday 4 the decision is closed-form: only the top or the bottom
//! team can be settled, and only through a seven-point margin (or a six-point
//! margin backed by a completed head-to-head series when that rule applies).
//! After matchday 5 a team is settled when it finishes in the same place in
//! the four extreme completions where each remaining match is won `M:0` by
//! one side. [`fixed_oracle`] enumerates completions exhaustively and is the
//! reference both procedures are tested against.

use serde::{Deserialize, Serialize};

use crate::domain::{MatchClass, MatchSet, Pairing, PotSlot, Score, TieBreakRule};
use crate::error::{Error, Result};
use crate::ranking::rank;

/// Goal grid of the brute-force oracle; the last entry plays the role of `M`.
pub const DEFAULT_ORACLE_GRID: [u16; 6] = [0, 1, 2, 3, 4, 100];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fixedness {
    /// Final position already decided.
    Fixed(u8),
    Open,
}

/// Decided final position, per slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FixednessVector([Fixedness; 4]);

impl Default for FixednessVector {
    fn default() -> Self {
        FixednessVector([Fixedness::Open; 4])
    }
}

impl FixednessVector {
    pub fn all_open() -> Self {
        Self::default()
    }

    pub fn get(&self, slot: PotSlot) -> Fixedness {
        self.0[slot.idx()]
    }

    pub fn is_fixed(&self, slot: PotSlot) -> bool {
        matches!(self.0[slot.idx()], Fixedness::Fixed(_))
    }

    pub fn set(&mut self, slot: PotSlot, f: Fixedness) {
        self.0[slot.idx()] = f;
    }

    pub fn fixed_count(&self) -> usize {
        self.0.iter().filter(|f| matches!(f, Fixedness::Fixed(_))).count()
    }

    pub fn as_array(&self) -> [Fixedness; 4] {
        self.0
    }
}

/// The large goal count `M` used to realise best and worst cases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentinelGoals(u16);

impl Default for SentinelGoals {
    fn default() -> Self {
        SentinelGoals(100)
    }
}

impl SentinelGoals {
    /// `m` must exceed any goal difference reachable with capped real scores.
    pub fn new(m: u16) -> Result<Self> {
        if m <= crate::domain::MAX_GOALS {
            return Err(Error::InvalidParameter(format!(
                "sentinel {m} must exceed the {}-goal cap",
                crate::domain::MAX_GOALS
            )));
        }
        Ok(SentinelGoals(m))
    }

    pub fn goals(self) -> u16 {
        self.0
    }
}

fn points(set: &MatchSet) -> [i32; 4] {
    let mut p = [0; 4];
    for pr in Pairing::all() {
        if let Some(s) = set.get(pr) {
            let (h, a) = (pr.home.idx(), pr.away.idx());
            match s.home.cmp(&s.away) {
                std::cmp::Ordering::Greater => p[h] += 3,
                std::cmp::Ordering::Less => p[a] += 3,
                std::cmp::Ordering::Equal => {
                    p[h] += 1;
                    p[a] += 1;
                }
            }
        }
    }
    p
}

fn both_legs_played(set: &MatchSet, a: usize, b: usize) -> bool {
    let (a, b) = (PotSlot::from_idx(a), PotSlot::from_idx(b));
    set.get(Pairing { home: a, away: b }).is_some() && set.get(Pairing { home: b, away: a }).is_some()
}

/// Decided positions after four matchdays.
///
/// The leader is settled when
/// it leads everyone by 7, or, under head-to-head, leads one team by exactly 6
/// after playing it twice and everyone else by 7. The bottom team mirrors this.
pub fn fixed_after_md4(set: &MatchSet, rule: TieBreakRule) -> Result<FixednessVector> {
    if set.len() != 8 || PotSlot::ALL.iter().any(|&s| set.played_by(s) != 4) {
        return Err(Error::InvalidState(format!(
            "expected 8 matches with 4 per team after matchday 4, got {}",
            set.len()
        )));
    }
    let pts = points(set);
    let mut fixed = FixednessVector::default();

    // `lead(i, j)` > 0 means `i` is ahead of `j`.
    let settled = |i: usize, lead: &dyn Fn(usize, usize) -> i32| -> bool {
        let others = (0..4).filter(|&j| j != i);
        if others.clone().all(|j| lead(i, j) >= 7) {
            return true;
        }
        if rule == TieBreakRule::HeadToHead {
            let close: Vec<usize> = others.clone().filter(|&j| lead(i, j) < 7).collect();
            if let [j] = close[..] {
                return lead(i, j) == 6 && both_legs_played(set, i, j);
            }
        }
        false
    };

    for i in 0..4 {
        if settled(i, &|a, b| pts[a] - pts[b]) {
            fixed.0[i] = Fixedness::Fixed(1);
        } else if settled(i, &|a, b| pts[b] - pts[a]) {
            fixed.0[i] = Fixedness::Fixed(4);
        }
    }
    Ok(fixed)
}

/// The two outstanding matches of a five-matchday state.
fn closing_pairings(set: &MatchSet) -> Result<[Pairing; 2]> {
    let rest = set.unplayed();
    match rest[..] {
        [a, b] if ![b.home, b.away].iter().any(|&s| a.involves(s)) => Ok([a, b]),
        _ => Err(Error::InvalidState(format!(
            "expected 10 matches with two disjoint matches remaining, got {} played",
            set.len()
        ))),
    }
}

/// Decided positions after five matchdays via the four extreme completions.
pub fn fixed_after_md5(set: &MatchSet, rule: TieBreakRule, sentinel: SentinelGoals) -> Result<FixednessVector> {
    let [first, second] = closing_pairings(set)?;
    let m = sentinel.goals();
    let extremes = [Score::new(m, 0), Score::new(0, m)];
    let mut positions = [[0u8; 4]; 4];
    let mut n = 0;
    for s1 in extremes {
        for s2 in extremes {
            let mut done = *set;
            done.set(first, s1);
            done.set(second, s2);
            let t = rank(&done, rule);
            for (pos, row) in t.rows.iter().enumerate() {
                positions[n][row.slot().idx()] = pos as u8 + 1;
            }
            n += 1;
        }
    }
    let mut fixed = FixednessVector::default();
    for i in 0..4 {
        if positions.iter().all(|p| p[i] == positions[0][i]) {
            fixed.0[i] = Fixedness::Fixed(positions[0][i]);
        }
    }
    Ok(fixed)
}

/// Largest number of outstanding matches [`fixed_oracle`] accepts (three matchdays).
pub const MAX_ORACLE_MATCHES: usize = 6;

/// Brute-force reference: a slot is fixed at `p` when it finishes `p` under
/// every assignment of goals from `grid` to every remaining match.
///
/// Completions are visited outcome pattern by outcome pattern. A slot that is
/// level on points with nobody has its position set by points alone, so goals
/// are only enumerated for patterns where a still undecided slot is level
/// with another team. The answer is the same as enumerating every goal
/// assignment.
pub fn fixed_oracle(
    set: &MatchSet,
    remaining: &[Pairing],
    rule: TieBreakRule,
    grid: &[u16],
) -> Result<FixednessVector> {
    if grid.is_empty() {
        return Err(Error::InvalidInput("oracle goal grid is empty".into()));
    }
    if remaining.len() > MAX_ORACLE_MATCHES {
        return Err(Error::InvalidInput(format!(
            "oracle enumerates at most {MAX_ORACLE_MATCHES} remaining matches, got {}",
            remaining.len()
        )));
    }
    for (k, p) in remaining.iter().enumerate() {
        if set.get(*p).is_some() || remaining[..k].contains(p) {
            return Err(Error::InvalidInput(format!("remaining pairing {p} is already decided")));
        }
    }

    // Grid scores by outcome: home win, draw, away win.
    let mut by_outcome: [Vec<Score>; 3] = Default::default();
    for &h in grid {
        for &a in grid {
            let k = match h.cmp(&a) {
                std::cmp::Ordering::Greater => 0,
                std::cmp::Ordering::Equal => 1,
                std::cmp::Ordering::Less => 2,
            };
            by_outcome[k].push(Score::new(h, a));
        }
    }

    let base = points(set);
    let mut seen: [Option<u8>; 4] = [None; 4];
    let mut open = [false; 4];
    let mut observe = |slot: usize, pos: u8, open: &mut [bool; 4]| match seen[slot] {
        None => seen[slot] = Some(pos),
        Some(p) if p != pos => open[slot] = true,
        _ => {}
    };

    let n = remaining.len();
    let mut work = *set;
    'patterns: for code in 0..3usize.pow(n as u32) {
        let mut outcomes = vec![0usize; n];
        let mut pts = base;
        let mut c = code;
        for (k, p) in remaining.iter().enumerate() {
            let o = c % 3;
            c /= 3;
            if by_outcome[o].is_empty() {
                continue 'patterns;
            }
            outcomes[k] = o;
            let (h, a) = (p.home.idx(), p.away.idx());
            match o {
                0 => pts[h] += 3,
                1 => {
                    pts[h] += 1;
                    pts[a] += 1;
                }
                _ => pts[a] += 3,
            }
        }
        let level = |i: usize| (0..4).any(|j| j != i && pts[j] == pts[i]);
        if (0..4).any(|i| !open[i] && level(i)) {
            let mut digits = vec![0usize; n];
            loop {
                for (k, p) in remaining.iter().enumerate() {
                    work.set(*p, by_outcome[outcomes[k]][digits[k]]);
                }
                let t = rank(&work, rule);
                for (pos, row) in t.rows.iter().enumerate() {
                    observe(row.slot().idx(), pos as u8 + 1, &mut open);
                }
                if open.iter().all(|&o| o) {
                    break 'patterns;
                }
                let mut k = 0;
                while k < n {
                    digits[k] += 1;
                    if digits[k] < by_outcome[outcomes[k]].len() {
                        break;
                    }
                    digits[k] = 0;
                    k += 1;
                }
                if k == n {
                    break;
                }
            }
        } else {
            for i in 0..4 {
                if !level(i) {
                    let above = (0..4).filter(|&j| pts[j] > pts[i]).count() as u8;
                    observe(i, above + 1, &mut open);
                }
            }
            if open.iter().all(|&o| o) {
                break;
            }
        }
    }

    let mut fixed = FixednessVector::default();
    for i in 0..4 {
        if !open[i] {
            let pos = seen[i].expect("every slot is observed in some completion");
            fixed.0[i] = Fixedness::Fixed(pos);
        }
    }
    Ok(fixed)
}

/// Class of each match given the decided positions of its teams.
pub fn classify_matchday(fixed: &FixednessVector, pairings: &[Pairing; 2]) -> [MatchClass; 2] {
    pairings.map(|p| match (fixed.is_fixed(p.home), fixed.is_fixed(p.away)) {
        (true, true) => MatchClass::StronglyStakeless,
        (false, false) => MatchClass::Competitive,
        _ => MatchClass::WeaklyStakeless,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::MatchRecord;

    fn rec(h: u8, a: u8, hg: u16, ag: u16) -> MatchRecord {
        MatchRecord::new(PotSlot::new(h).unwrap(), PotSlot::new(a).unwrap(), Score::new(hg, ag)).unwrap()
    }

    fn set(records: &[MatchRecord]) -> MatchSet {
        MatchSet::from_records(records).unwrap()
    }

    fn slot(i: u8) -> PotSlot {
        PotSlot::new(i).unwrap()
    }

    fn group_c_md5() -> MatchSet {
        set(&[
            rec(1, 3, 1, 5),
            rec(4, 2, 1, 2),
            rec(2, 1, 1, 0),
            rec(3, 4, 2, 0),
            rec(3, 2, 4, 0),
            rec(4, 1, 1, 4),
            rec(2, 3, 1, 3),
            rec(1, 4, 4, 0),
            rec(1, 2, 3, 1),
            rec(4, 3, 1, 2),
        ])
    }

    /// Matchdays 1-4 of schedule 1231 (double pairing {1-4, 2-3}).
    fn md4_state(scores: [(u16, u16); 8]) -> MatchSet {
        let pairs = [(1, 3), (4, 2), (2, 1), (3, 4), (4, 1), (3, 2), (1, 4), (2, 3)];
        let recs: Vec<_> = pairs.iter().zip(scores).map(|(&(h, a), (x, y))| rec(h, a, x, y)).collect();
        set(&recs)
    }

    fn oracle(s: &MatchSet, rule: TieBreakRule) -> FixednessVector {
        fixed_oracle(s, &s.unplayed(), rule, &DEFAULT_ORACLE_GRID).unwrap()
    }

    #[test]
    fn md4_seven_point_lead_fixes_leader() {
        // 1: 12 pts (4 wins); 2: 5; 3: 4; 4: 1.
        let s = md4_state([(1, 0), (1, 1), (0, 1), (1, 0), (0, 1), (1, 1), (1, 0), (1, 0)]);
        let pts = points(&s);
        assert_eq!(pts, [12, 5, 4, 1]);
        let f = fixed_after_md4(&s, TieBreakRule::GoalDifference).unwrap();
        assert_eq!(f.as_array(), [Fixedness::Fixed(1), Fixedness::Open, Fixedness::Open, Fixedness::Open]);
        assert_eq!(f, oracle(&s, TieBreakRule::GoalDifference));
    }

    #[test]
    fn md4_six_point_lead_is_not_enough_under_goal_difference() {
        // 1: 12 pts, 2: 6 pts.
        let s = md4_state([(1, 0), (0, 1), (0, 1), (1, 0), (0, 1), (0, 1), (1, 0), (0, 1)]);
        let pts = points(&s);
        assert_eq!(pts[0], 12);
        assert_eq!(pts[1], 6);
        let f = fixed_after_md4(&s, TieBreakRule::GoalDifference).unwrap();
        assert_eq!(f.get(slot(1)), Fixedness::Open);
        assert_eq!(f, oracle(&s, TieBreakRule::GoalDifference));
    }

    #[test]
    fn md4_six_point_lead_after_double_header_under_head_to_head() {
        // 1: 10 pts, 4: 4, 2: 3, 3: 3; 1 has played 4 twice (1-4 is the double pairing).
        let s = md4_state([(1, 0), (1, 0), (1, 1), (1, 1), (0, 1), (1, 1), (2, 0), (1, 1)]);
        let pts = points(&s);
        assert_eq!(pts, [10, 3, 3, 4]);
        let f = fixed_after_md4(&s, TieBreakRule::HeadToHead).unwrap();
        assert_eq!(f.get(slot(1)), Fixedness::Fixed(1));
        assert_eq!(f, oracle(&s, TieBreakRule::HeadToHead));
        let gd = fixed_after_md4(&s, TieBreakRule::GoalDifference).unwrap();
        assert_eq!(gd.get(slot(1)), Fixedness::Open);
        assert_eq!(gd, oracle(&s, TieBreakRule::GoalDifference));
    }

    #[test]
    fn md4_rejects_wrong_prefix() {
        let s = set(&[rec(1, 2, 1, 0)]);
        assert!(matches!(fixed_after_md4(&s, TieBreakRule::HeadToHead), Err(Error::InvalidState(_))));
    }

    #[test]
    fn group_c_is_fully_decided_after_md5() {
        let s = group_c_md5();
        let rule = TieBreakRule::HeadToHead;
        let f = fixed_after_md5(&s, rule, SentinelGoals::default()).unwrap();
        assert_eq!(f.fixed_count(), 4);
        assert_eq!(f.get(slot(3)), Fixedness::Fixed(1));
        assert_eq!(f.get(slot(1)), Fixedness::Fixed(2));
        assert_eq!(f.get(slot(2)), Fixedness::Fixed(3));
        assert_eq!(f.get(slot(4)), Fixedness::Fixed(4));
        assert_eq!(f, oracle(&s, rule));
        let classes = classify_matchday(&f, &[Pairing::of(3, 1), Pairing::of(2, 4)]);
        assert_eq!(classes, [MatchClass::StronglyStakeless; 2]);
    }

    #[test]
    fn group_c_under_goal_difference_leaves_second_place_open() {
        // Sporting +4 vs Dortmund -6: a 0:M defeat of Sporting and M:0 win of Dortmund flips them.
        let s = group_c_md5();
        let f = fixed_after_md5(&s, TieBreakRule::GoalDifference, SentinelGoals::default()).unwrap();
        assert_eq!(f.get(slot(1)), Fixedness::Open);
        assert_eq!(f.get(slot(2)), Fixedness::Open);
        assert_eq!(f, oracle(&s, TieBreakRule::GoalDifference));
    }

    #[test]
    fn level_teams_after_md5_are_all_open() {
        // All ten matches drawn: everyone on 5 points.
        let pairs = [(1, 3), (4, 2), (2, 1), (3, 4), (4, 1), (3, 2), (1, 4), (2, 3), (1, 2), (4, 3)];
        let recs: Vec<_> = pairs.iter().map(|&(h, a)| rec(h, a, 1, 1)).collect();
        let s = set(&recs);
        for rule in [TieBreakRule::GoalDifference, TieBreakRule::HeadToHead] {
            let f = fixed_after_md5(&s, rule, SentinelGoals::default()).unwrap();
            assert_eq!(f, FixednessVector::all_open());
            assert_eq!(f, oracle(&s, rule));
        }
    }

    #[test]
    fn md5_rejects_wrong_prefix() {
        let s = group_c_md5();
        let mut short = s;
        short.clear(Pairing::of(4, 3));
        assert!(fixed_after_md5(&short, TieBreakRule::HeadToHead, SentinelGoals::default()).is_err());
    }

    #[test]
    fn sentinel_value_does_not_matter() {
        let s = group_c_md5();
        let a = fixed_after_md5(&s, TieBreakRule::HeadToHead, SentinelGoals::new(100).unwrap());
        let b = fixed_after_md5(&s, TieBreakRule::HeadToHead, SentinelGoals::new(1000).unwrap());
        assert_eq!(a, b);
        assert!(SentinelGoals::new(99).is_err());
    }

    #[test]
    fn oracle_argument_checks() {
        let s = group_c_md5();
        assert!(fixed_oracle(&s, &s.unplayed(), TieBreakRule::HeadToHead, &[]).is_err());
        assert!(fixed_oracle(&s, &[Pairing::of(1, 3)], TieBreakRule::HeadToHead, &[0]).is_err());
        let empty = MatchSet::new();
        assert!(fixed_oracle(&empty, &empty.unplayed(), TieBreakRule::HeadToHead, &[0]).is_err());
    }

    #[test]
    fn oracle_subset_grid_is_weaker() {
        // Fixed under the full grid implies fixed under the extreme-only grid.
        let s = group_c_md5();
        let rest = s.unplayed();
        for rule in [TieBreakRule::GoalDifference, TieBreakRule::HeadToHead] {
            let full = fixed_oracle(&s, &rest, rule, &DEFAULT_ORACLE_GRID).unwrap();
            let extreme = fixed_oracle(&s, &rest, rule, &[0, 100]).unwrap();
            for p in PotSlot::ALL {
                if full.is_fixed(p) {
                    assert_eq!(full.get(p), extreme.get(p));
                }
            }
        }
    }

    #[test]
    fn classify_definitions() {
        let mut f = FixednessVector::all_open();
        f.set(slot(1), Fixedness::Fixed(1));
        f.set(slot(4), Fixedness::Fixed(4));
        let c = classify_matchday(&f, &[Pairing::of(1, 4), Pairing::of(2, 3)]);
        assert_eq!(c, [MatchClass::StronglyStakeless, MatchClass::Competitive]);
        let c = classify_matchday(&f, &[Pairing::of(1, 2), Pairing::of(3, 4)]);
        assert_eq!(c, [MatchClass::WeaklyStakeless, MatchClass::WeaklyStakeless]);
    }
}
