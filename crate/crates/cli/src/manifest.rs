use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

use crate::error::{write_error, CliResult};

/// Provenance block embedded in every report. Only `started_unix` and
/// `wall_clock_seconds` vary between identical invocations.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub args: Vec<String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub outputs: Value,
}

pub struct Clock {
    started_unix: u64,
    start: Instant,
}

impl Clock {
    pub fn start() -> Clock {
        let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Clock { started_unix, start: Instant::now() }
    }

    pub fn manifest(&self, command: &str, config: Value, seed: Option<u64>, outputs: Value) -> Manifest {
        Manifest {
            command: command.to_string(),
            args: std::env::args().skip(1).collect(),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix: self.started_unix,
            wall_clock_seconds: self.start.elapsed().as_secs_f64(),
            outputs,
        }
    }
}

/// `# manifest: {...}` line placed above a CSV header.
pub fn csv_preamble(m: &Manifest) -> String {
    format!("# manifest: {}\n", serde_json::to_string(m).expect("manifest serializes"))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| write_error(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| write_error(path, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| write_error(path, e))
}
