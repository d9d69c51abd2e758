use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use stakeless_core::fit::MatchObservation;
use stakeless_core::{ModelFamily, PotSlot, Rating, Score, MAX_GOALS};

use crate::error::{read_error, write_error, CliError, CliResult};

/// One historical match.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub season: String,
    pub home_name: String,
    pub away_name: String,
    pub home_pot: u8,
    pub away_pot: u8,
    pub home_coeff: f64,
    pub away_coeff: f64,
    pub home_goals: u16,
    pub away_goals: u16,
}

impl DatasetRow {
    fn check(&self, line: u64) -> CliResult<()> {
        let bad = |msg: String| Err(CliError::Input(format!("line {line}: {msg}")));
        for pot in [self.home_pot, self.away_pot] {
            if !(1..=4).contains(&pot) {
                return bad(format!("pot {pot} is outside 1..=4"));
            }
        }
        if self.home_pot == self.away_pot {
            return bad(format!("both teams are in pot {}", self.home_pot));
        }
        for goals in [self.home_goals, self.away_goals] {
            if goals > MAX_GOALS {
                return bad(format!("{goals} goals exceeds the cap of {MAX_GOALS}"));
            }
        }
        for c in [self.home_coeff, self.away_coeff] {
            if !(c.is_finite() && c >= 0.0) {
                return bad(format!("coefficient {c} must be a non-negative number"));
            }
        }
        Ok(())
    }

    pub fn score(&self) -> Score {
        Score::new(self.home_goals, self.away_goals)
    }
}

/// A validated dataset with the file line number of every row.
pub struct Dataset {
    pub rows: Vec<(u64, DatasetRow)>,
}

impl Dataset {
    pub fn read(path: &Path) -> CliResult<Dataset> {
        let file = std::fs::File::open(path).map_err(|e| read_error(path, e))?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: Read>(reader: R) -> CliResult<Dataset> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let malformed = |e: csv::Error| {
            let line = e.position().map(|p| p.line()).unwrap_or(1);
            CliError::Input(format!("line {line}: malformed row: {e}"))
        };
        let headers = rdr.headers().map_err(malformed)?.clone();
        let mut rows = Vec::new();
        let mut rec = csv::StringRecord::new();
        while rdr.read_record(&mut rec).map_err(malformed)? {
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            let row: DatasetRow = rec
                .deserialize(Some(&headers))
                .map_err(|e| CliError::Input(format!("line {line}: malformed row: {e}")))?;
            row.check(line)?;
            rows.push((line, row));
        }
        Ok(Dataset { rows })
    }

    /// Observations with pot or coefficient ratings, as `family` requires.
    pub fn observations(&self, family: ModelFamily) -> CliResult<Vec<MatchObservation>> {
        self.rows
            .iter()
            .map(|(line, r)| {
                let (rh, ra) = if family.uses_pots() || family == ModelFamily::Baseline {
                    (pot(r.home_pot), pot(r.away_pot))
                } else {
                    let coeff = |c: f64| {
                        Rating::new(c).map_err(|_| {
                            CliError::Input(format!("line {line}: coefficient {c} must be positive for {family}"))
                        })
                    };
                    (coeff(r.home_coeff)?, coeff(r.away_coeff)?)
                };
                MatchObservation::new(r.season.clone(), rh, ra, r.score())
                    .map_err(|e| CliError::Input(format!("line {line}: {e}")))
            })
            .collect()
    }
}

fn pot(i: u8) -> Rating {
    Rating::pot(PotSlot::new(i).expect("checked pot"))
}

pub fn write_rows<W: Write>(writer: W, rows: &[DatasetRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_file(path: &Path, rows: &[DatasetRow]) -> CliResult<()> {
    let file = std::fs::File::create(path).map_err(|e| write_error(path, e))?;
    write_rows(file, rows).map_err(|e| write_error(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "season,home_name,away_name,home_pot,away_pot,home_coeff,away_coeff,home_goals,away_goals\n";

    fn row() -> DatasetRow {
        DatasetRow {
            season: "2018-19".into(),
            home_name: "A".into(),
            away_name: "B".into(),
            home_pot: 1,
            away_pot: 3,
            home_coeff: 120.5,
            away_coeff: 30.25,
            home_goals: 2,
            away_goals: 1,
        }
    }

    #[test]
    fn round_trip() {
        let rows = vec![row(), DatasetRow { home_name: "C, D".into(), ..row() }];
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        let back = Dataset::from_reader(buf.as_slice()).unwrap();
        assert_eq!(back.rows.into_iter().map(|(_, r)| r).collect::<Vec<_>>(), rows);
    }

    #[test]
    fn bad_pot_cites_line() {
        let text = format!("{HEADER}2018-19,A,B,1,2,1,1,0,0\n2018-19,A,B,5,2,1,1,0,0\n");
        let err = Dataset::from_reader(text.as_bytes()).err().unwrap();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
    }

    #[test]
    fn malformed_row_cites_line() {
        let text = format!("{HEADER}2018-19,A,B,1,2,1,1,x,0\n");
        let err = Dataset::from_reader(text.as_bytes()).err().unwrap();
        assert!(err.to_string().starts_with("line 2:"), "{err}");
    }

    #[test]
    fn zero_coefficient_only_matters_for_coefficient_models() {
        let text = format!("{HEADER}2018-19,A,B,1,2,0,1,0,0\n");
        let d = Dataset::from_reader(text.as_bytes()).unwrap();
        assert!(d.observations(ModelFamily::FourPPot).is_ok());
        assert!(d.observations(ModelFamily::FourPCoeff).is_err());
    }
}
