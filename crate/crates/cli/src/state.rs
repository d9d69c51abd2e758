//! Hand-written group states: one match per entry, `MD<k>: <home>-<away> <h>:<a>`,
//! with the score left out for matches still to be played. Several entries
//! of one matchday may share a line, separated by commas. `#` starts a comment.

use stakeless_core::{MatchRecord, MatchSet, Pairing, Score};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub struct GroupState {
    pub played: Vec<(u8, MatchRecord)>,
    pub remaining: Vec<(u8, Pairing)>,
}

impl GroupState {
    pub fn parse(text: &str) -> CliResult<GroupState> {
        let mut state = GroupState { played: Vec::new(), remaining: Vec::new() };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CliError::Input(format!("line {}: {msg}", i + 1));
            let (md, rest) = line.split_once(':').ok_or_else(|| err(format!("expected `MD<k>: ...`, got `{line}`")))?;
            let k: u8 = md
                .trim()
                .strip_prefix("MD")
                .and_then(|k| k.parse().ok())
                .filter(|k| (1..=6).contains(k))
                .ok_or_else(|| err(format!("`{}` is not a matchday MD1..MD6", md.trim())))?;
            for entry in rest.split(',') {
                let mut parts = entry.split_whitespace();
                let pairing: Pairing = parts
                    .next()
                    .ok_or_else(|| err("missing pairing".into()))?
                    .parse()
                    .map_err(|e| err(format!("{e}")))?;
                match parts.next() {
                    None => state.remaining.push((k, pairing)),
                    Some(s) => {
                        let score = parse_score(s).ok_or_else(|| err(format!("`{s}` is not a score `h:a`")))?;
                        state.played.push((k, MatchRecord::new(pairing.home, pairing.away, score)?));
                    }
                }
                if let Some(extra) = parts.next() {
                    return Err(err(format!("unexpected `{extra}`")));
                }
            }
        }
        state.check()?;
        Ok(state)
    }

    fn check(&self) -> CliResult<()> {
        let entries: Vec<(u8, Pairing)> =
            self.played.iter().map(|(k, r)| (*k, r.pairing())).chain(self.remaining.iter().copied()).collect();
        for (i, (k, p)) in entries.iter().enumerate() {
            if entries[..i].iter().any(|(_, q)| q == p) {
                return Err(CliError::Input(format!("inconsistent state: {p} is listed twice")));
            }
            if entries[..i].iter().any(|(j, q)| j == k && (q.involves(p.home) || q.involves(p.away))) {
                return Err(CliError::Input(format!("inconsistent state: a team plays twice on MD{k}")));
            }
        }
        Ok(())
    }

    pub fn match_set(&self) -> MatchSet {
        let mut set = MatchSet::new();
        for (_, r) in &self.played {
            set.set(r.pairing(), r.score);
        }
        set
    }

    /// Matches still to be played with their matchday, derived from the
    /// unplayed pairs when the file lists none.
    pub fn outstanding(&self) -> CliResult<Vec<(Option<u8>, Pairing)>> {
        let unplayed = self.match_set().unplayed();
        if self.remaining.is_empty() {
            return Ok(unplayed.into_iter().map(|p| (None, p)).collect());
        }
        let mut listed: Vec<Pairing> = self.remaining.iter().map(|(_, p)| *p).collect();
        listed.sort();
        let mut expected = unplayed;
        expected.sort();
        if listed != expected {
            return Err(CliError::Input(format!(
                "inconsistent state: the remaining matches must be the unplayed pairs {}",
                expected.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(", ")
            )));
        }
        Ok(self.remaining.iter().map(|(k, p)| (Some(*k), *p)).collect())
    }
}

fn parse_score(s: &str) -> Option<Score> {
    let (h, a) = s.split_once(':')?;
    Score::validated(h.parse().ok()?, a.parse().ok()?).ok()
}
