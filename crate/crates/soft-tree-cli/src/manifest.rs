//! Run manifests: enough provenance to reproduce any output exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub format_version: u32,
    pub command: String,
    pub config_sha256: String,
    pub seed: Option<u64>,
    /// Checksums of every data file the run read, keyed by path.
    pub dataset_sha256: BTreeMap<String, String>,
    pub git: String,
    pub metrics: serde_json::Value,
    pub outputs: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path)
        .map_err(|e| CliError::Io(format!("cannot checksum {}: {e}", path.display())))?;
    Ok(sha256_hex(&bytes))
}

pub fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
        .unwrap_or_else(|| "unknown".to_string())
}

impl Manifest {
    pub fn new<C: Serialize>(
        command: &str,
        effective_config: &C,
        seed: Option<u64>,
        data_files: &[PathBuf],
        metrics: serde_json::Value,
        outputs: &[String],
    ) -> Result<Self, CliError> {
        let config_bytes = serde_json::to_vec(effective_config)
            .map_err(|e| CliError::Internal(format!("config serialization: {e}")))?;
        let mut dataset_sha256 = BTreeMap::new();
        for file in data_files {
            dataset_sha256.insert(file.display().to_string(), sha256_file(file)?);
        }
        Ok(Manifest {
            format_version: 1,
            command: command.to_string(),
            config_sha256: sha256_hex(&config_bytes),
            seed,
            dataset_sha256,
            git: git_describe(),
            metrics,
            outputs: outputs.to_vec(),
        })
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Internal(format!("manifest serialization: {e}")))?;
        fs::write(&path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}
