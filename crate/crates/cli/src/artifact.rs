//! JSON and CSV artifact files with provenance.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const TOOL: &str = "sossa";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Envelope written around every JSON payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact<T> {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub master_seed: u64,
    pub config: RunConfig,
    pub payload: T,
}

impl<T> Artifact<T> {
    pub fn new(kind: &str, config: &RunConfig, payload: T) -> Self {
        Artifact {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            kind: kind.to_string(),
            master_seed: config.seed,
            config: config.clone(),
            payload,
        }
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_text(path, &to_json(value)?)
}

/// Reads an artifact of the expected kind; serde errors report line and column.
pub fn read_artifact<T: DeserializeOwned>(path: &Path, kind: &str) -> CliResult<Artifact<T>> {
    let text = read_text(path)?;
    let a: Artifact<T> =
        serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), msg: e.to_string() })?;
    if a.kind != kind {
        return Err(CliError::Parse { path: path.to_path_buf(), msg: format!("expected a {kind} artifact, found {}", a.kind) });
    }
    Ok(a)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse { path: path.to_path_buf(), msg: e.to_string() })
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> CliResult<()> {
    let io = |e: csv::Error| CliError::Parse { path: path.to_path_buf(), msg: e.to_string() };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    for r in rows {
        w.serialize(r).map_err(io)?;
    }
    w.flush().map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}
