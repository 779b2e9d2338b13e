//! Run manifests: what was run, with which parameters, and the checksum of
//! every file it wrote.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commands::{execute, CommandOutput, Invocation};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: Option<u64>,
    pub parameters: Invocation,
    pub outputs: Vec<ManifestEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(invocation: &Invocation, output: &CommandOutput) -> Self {
        Self {
            command: invocation.name().to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: invocation.seed(),
            parameters: invocation.clone(),
            outputs: output
                .files
                .iter()
                .map(|f| ManifestEntry {
                    file: f.name.clone(),
                    sha256: sha256_hex(&f.bytes),
                    bytes: f.bytes.len() as u64,
                })
                .collect(),
        }
    }

    pub fn file_name(&self) -> String {
        format!("{}.manifest.json", self.command)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

/// Writes every output file into `dir` followed by the manifest; returns the
/// manifest path.
pub fn write_run(dir: &Path, invocation: &Invocation, output: &CommandOutput) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    for f in &output.files {
        let path = dir.join(&f.name);
        fs::write(&path, &f.bytes).map_err(|e| CliError::io(&path, e))?;
    }
    let manifest = RunManifest::new(invocation, output);
    let path = dir.join(manifest.file_name());
    let json =
        serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Internal(e.to_string()))?;
    fs::write(&path, json + "\n").map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayOutcome {
    pub matched: Vec<String>,
    /// Files whose regenerated bytes differ from the recorded checksum, or
    /// that were recorded but not produced (and vice versa).
    pub mismatched: Vec<String>,
}

impl ReplayOutcome {
    pub fn is_identical(&self) -> bool {
        self.mismatched.is_empty()
    }
}

/// Re-executes the manifest's command and compares each output with its
/// recorded checksum. With `out`, the regenerated run is also written there.
pub fn replay(manifest_path: &Path, out: Option<&Path>) -> Result<ReplayOutcome> {
    let manifest = RunManifest::load(manifest_path)?;
    let output = execute(&manifest.parameters)?;
    if let Some(dir) = out {
        write_run(dir, &manifest.parameters, &output)?;
    }
    let regenerated = RunManifest::new(&manifest.parameters, &output);
    let mut outcome = ReplayOutcome {
        matched: Vec::new(),
        mismatched: Vec::new(),
    };
    for entry in &manifest.outputs {
        match regenerated.outputs.iter().find(|e| e.file == entry.file) {
            Some(e) if e.sha256 == entry.sha256 => outcome.matched.push(entry.file.clone()),
            _ => outcome.mismatched.push(entry.file.clone()),
        }
    }
    for e in &regenerated.outputs {
        if !manifest.outputs.iter().any(|m| m.file == e.file) {
            outcome.mismatched.push(e.file.clone());
        }
    }
    Ok(outcome)
}
