//! The twelve legal schedules for the closing two matchdays.
//!
//! A schedule fixes matchdays 5 and 6. Matchdays 1 and 2 mirror 6 and 5, and
//! the remaining pairing is played home and away on matchdays 3 and 4. A
//! schedule is named by four digits: home and away pot of the first match of
//! matchday 5, then home and away pot of the first match of matchday 6.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{Pairing, PotSlot};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ScheduleSpec {
    label: [u8; 4],
    pub md5: [Pairing; 2],
    pub md6: [Pairing; 2],
}

/// Matchdays 5 and 6 of every legal schedule, in the customary table order.
const TABLE: [[(u8, u8); 4]; 12] = [
    [(1, 2), (4, 3), (3, 1), (2, 4)],
    [(2, 1), (3, 4), (1, 3), (4, 2)],
    [(1, 2), (3, 4), (4, 1), (2, 3)],
    [(2, 1), (4, 3), (1, 4), (3, 2)],
    [(1, 3), (4, 2), (2, 1), (3, 4)],
    [(3, 1), (2, 4), (1, 2), (4, 3)],
    [(1, 3), (2, 4), (4, 1), (3, 2)],
    [(3, 1), (4, 2), (1, 4), (2, 3)],
    [(1, 4), (3, 2), (2, 1), (4, 3)],
    [(4, 1), (2, 3), (1, 2), (3, 4)],
    [(1, 4), (2, 3), (3, 1), (4, 2)],
    [(4, 1), (3, 2), (1, 3), (2, 4)],
];

impl ScheduleSpec {
    /// Builds a spec from its closing matchdays; the label is derived.
    pub fn new(md5: [Pairing; 2], md6: [Pairing; 2]) -> Result<Self> {
        let spec = ScheduleSpec {
            label: [md5[0].home.index(), md5[0].away.index(), md6[0].home.index(), md6[0].away.index()],
            md5,
            md6,
        };
        spec.check()?;
        Ok(spec)
    }

    fn check(&self) -> Result<()> {
        for (name, md) in [("matchday 5", &self.md5), ("matchday 6", &self.md6)] {
            let slots = [md[0].home, md[0].away, md[1].home, md[1].away];
            for s in PotSlot::ALL {
                if !slots.contains(&s) {
                    return Err(Error::InvalidSchedule(format!("{name} does not involve team {s}")));
                }
            }
        }
        for a in self.md5 {
            for b in self.md6 {
                if a.same_teams(b) {
                    return Err(Error::InvalidSchedule(format!("pairing {a} is used on both closing matchdays")));
                }
            }
        }
        // One home and one away match across the two closing matchdays.
        for s in PotSlot::ALL {
            let home5 = self.md5.iter().any(|p| p.home == s);
            let home6 = self.md6.iter().any(|p| p.home == s);
            if home5 == home6 {
                return Err(Error::InvalidSchedule(format!(
                    "team {s} plays twice at {} on matchdays 5-6",
                    if home5 { "home" } else { "away" }
                )));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        self.label.iter().map(|d| char::from(b'0' + d)).collect()
    }

    /// The pairing played home and away on matchdays 3 and 4.
    pub fn double_pairing(&self) -> [Pairing; 2] {
        let used = |a: PotSlot, b: PotSlot| {
            let p = Pairing { home: a, away: b };
            self.md5.iter().chain(self.md6.iter()).any(|q| q.same_teams(p))
        };
        let one = PotSlot::ALL[0];
        let partner = PotSlot::ALL[1..].iter().copied().find(|&o| !used(one, o)).expect("legal spec");
        let rest: Vec<PotSlot> = PotSlot::ALL[1..].iter().copied().filter(|&o| o != partner).collect();
        // Lower pot hosts matchday 4, so the matchday-3 leg is hosted by the higher pot.
        [Pairing { home: partner, away: one }, Pairing { home: rest[1], away: rest[0] }]
    }

    /// Ordered pairs played after four matchdays.
    pub fn first_eight(&self) -> Vec<Pairing> {
        Pairing::all().filter(|p| !self.md5.contains(p) && !self.md6.contains(p)).collect()
    }
}

impl fmt::Display for ScheduleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for ScheduleSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        enumerate_schedules().into_iter().find(|spec| spec.label() == s).ok_or_else(|| {
            Error::InvalidSchedule(format!(
                "unknown schedule `{s}`; valid labels: {}",
                enumerate_schedules().iter().map(|x| x.label()).collect::<Vec<_>>().join(", ")
            ))
        })
    }
}

impl Serialize for ScheduleSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for ScheduleSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All twelve legal schedules, in table order.
pub fn enumerate_schedules() -> Vec<ScheduleSpec> {
    TABLE
        .iter()
        .map(|row| {
            let p = |(h, a): (u8, u8)| Pairing::of(h, a);
            ScheduleSpec::new([p(row[0]), p(row[1])], [p(row[2]), p(row[3])])
                .expect("hard-coded schedule table is legal")
        })
        .collect()
}

/// Constructs the legal schedules from scratch: team 1 picks a matchday-5
/// opponent (3 ways), a matchday-6 opponent (2 ways) and whether it is at home
/// on matchday 5 (2 ways); everything else follows.
pub fn generate_schedules() -> Vec<ScheduleSpec> {
    let one = PotSlot::ALL[0];
    let mut out = Vec::with_capacity(12);
    for o5 in &PotSlot::ALL[1..] {
        for o6 in PotSlot::ALL[1..].iter().filter(|&o| o != o5) {
            let z = *PotSlot::ALL[1..].iter().find(|&o| o != o5 && o != o6).unwrap();
            for one_home_on_5 in [true, false] {
                let spec = if one_home_on_5 {
                    // 1 away on 6, so o5 (away on 5) hosts z on 6, and z hosts o6 on 5.
                    ScheduleSpec::new(
                        [Pairing { home: one, away: *o5 }, Pairing { home: z, away: *o6 }],
                        [Pairing { home: *o6, away: one }, Pairing { home: *o5, away: z }],
                    )
                } else {
                    ScheduleSpec::new(
                        [Pairing { home: *o5, away: one }, Pairing { home: *o6, away: z }],
                        [Pairing { home: one, away: *o6 }, Pairing { home: z, away: *o5 }],
                    )
                };
                out.push(spec.expect("generated schedule is legal"));
            }
        }
    }
    out
}

/// Six matchdays of two ordered pairings each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FullFixture {
    pub matchdays: [[Pairing; 2]; 6],
}

impl FullFixture {
    /// Ordered pairs of the first `k` matchdays.
    pub fn prefix(&self, k: usize) -> Vec<Pairing> {
        self.matchdays[..k].iter().flatten().copied().collect()
    }
}

/// Expands a closing-matchday schedule into the full mirrored fixture.
pub fn expand_fixture(spec: &ScheduleSpec) -> Result<FullFixture> {
    spec.check()?;
    let md3 = spec.double_pairing();
    let fixture = FullFixture {
        matchdays: [
            spec.md6.map(Pairing::mirror),
            spec.md5.map(Pairing::mirror),
            md3,
            md3.map(Pairing::mirror),
            spec.md5,
            spec.md6,
        ],
    };
    let violations = validate_fixture(&fixture);
    if !violations.is_empty() {
        return Err(Error::InvalidSchedule(format!("{violations:?}")));
    }
    Ok(fixture)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Violation {
    /// A team plays twice on one matchday.
    SlotTwiceOnMatchday {
        matchday: u8,
        slot: PotSlot,
    },
    /// An ordered pair is played more than once.
    DuplicatePairing {
        pairing: Pairing,
    },
    /// An ordered pair is never played.
    MissingPairing {
        pairing: Pairing,
    },
    /// Matchday `matchday` (4..=6) is not the home-away mirror of `7 - matchday`.
    NotMirrored {
        matchday: u8,
    },
    ThreeConsecutiveHome {
        slot: PotSlot,
        from_matchday: u8,
    },
    ThreeConsecutiveAway {
        slot: PotSlot,
        from_matchday: u8,
    },
    /// A team without one home and one away match on matchdays 1-2.
    UnbalancedOpening {
        slot: PotSlot,
    },
    /// A team without one home and one away match on matchdays 5-6.
    UnbalancedClosing {
        slot: PotSlot,
    },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::SlotTwiceOnMatchday { .. } => "SlotTwiceOnMatchday",
            Violation::DuplicatePairing { .. } => "DuplicatePairing",
            Violation::MissingPairing { .. } => "MissingPairing",
            Violation::NotMirrored { .. } => "NotMirrored",
            Violation::ThreeConsecutiveHome { .. } => "ThreeConsecutiveHome",
            Violation::ThreeConsecutiveAway { .. } => "ThreeConsecutiveAway",
            Violation::UnbalancedOpening { .. } => "UnbalancedOpening",
            Violation::UnbalancedClosing { .. } => "UnbalancedClosing",
        }
    }
}

/// Every broken fixture constraint; empty when the fixture is legal.
pub fn validate_fixture(f: &FullFixture) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut count = std::collections::BTreeMap::<Pairing, u8>::new();

    for (d, md) in f.matchdays.iter().enumerate() {
        let slots = [md[0].home, md[0].away, md[1].home, md[1].away];
        for s in PotSlot::ALL {
            if slots.iter().filter(|&&x| x == s).count() > 1 {
                out.push(Violation::SlotTwiceOnMatchday { matchday: d as u8 + 1, slot: s });
            }
        }
        for p in md {
            *count.entry(*p).or_default() += 1;
        }
    }
    for p in Pairing::all() {
        match count.get(&p).copied().unwrap_or(0) {
            0 => out.push(Violation::MissingPairing { pairing: p }),
            1 => {}
            _ => out.push(Violation::DuplicatePairing { pairing: p }),
        }
    }
    for d in 3..6 {
        let mirrored = f.matchdays[5 - d].map(Pairing::mirror);
        let same = f.matchdays[d].iter().all(|p| mirrored.contains(p));
        if !same {
            out.push(Violation::NotMirrored { matchday: d as u8 + 1 });
        }
    }

    for s in PotSlot::ALL {
        // Some(true) = home, Some(false) = away, None = idle.
        let venue: Vec<Option<bool>> =
            f.matchdays.iter().map(|md| md.iter().find(|p| p.involves(s)).map(|p| p.home == s)).collect();
        for d in 0..4 {
            match (venue[d], venue[d + 1], venue[d + 2]) {
                (Some(true), Some(true), Some(true)) => {
                    out.push(Violation::ThreeConsecutiveHome { slot: s, from_matchday: d as u8 + 1 })
                }
                (Some(false), Some(false), Some(false)) => {
                    out.push(Violation::ThreeConsecutiveAway { slot: s, from_matchday: d as u8 + 1 })
                }
                _ => {}
            }
        }
        if !matches!((venue[0], venue[1]), (Some(a), Some(b)) if a != b) {
            out.push(Violation::UnbalancedOpening { slot: s });
        }
        if !matches!((venue[4], venue[5]), (Some(a), Some(b)) if a != b) {
            out.push(Violation::UnbalancedClosing { slot: s });
        }
    }
    out
}
