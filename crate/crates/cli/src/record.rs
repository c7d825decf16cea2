use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::commands::CliError;

/// One invocation: replaying `command` with `config` reproduces `results`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub config: Value,
    pub results: Value,
}

impl RunRecord {
    pub fn new(command: &str, config: Value, results: Value) -> Self {
        RunRecord {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            config,
            results,
        }
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Usage(e.to_string()))
    }
}

pub fn write_outputs(dir: &Path, rec: &RunRecord, csv: Option<&str>) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Usage(format!("cannot write to {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join(format!("{}.json", rec.command)), rec.to_json()? + "\n").map_err(io)?;
    if let Some(csv) = csv {
        std::fs::write(dir.join(format!("{}.csv", rec.command)), csv).map_err(io)?;
    }
    Ok(())
}
