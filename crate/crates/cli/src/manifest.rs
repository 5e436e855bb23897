use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Provenance of a report. `wall_time_ms` is the only field that may differ
/// between two runs with the same inputs and config; the worker count is
/// deliberately left out.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub config: Config,
    pub wall_time_ms: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Config {
    pub budget_states: Option<usize>,
    pub seed: u64,
    pub params: Value,
}

impl RunManifest {
    pub fn new(command: &str, config: Config) -> Self {
        RunManifest {
            tool: "cylindra",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            inputs: BTreeMap::new(),
            config,
            wall_time_ms: 0,
        }
    }
}

/// Reads a file and records its SHA-256 under the path as given.
pub fn read_input(manifest: &mut RunManifest, path: &Path) -> Result<Vec<u8>> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    manifest.inputs.insert(path.display().to_string(), hex::encode(Sha256::digest(&bytes)));
    Ok(bytes)
}

/// Writes through a sibling temporary file, so a reader never sees a
/// half-written report.
pub fn write_atomically(path: &Path, text: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
