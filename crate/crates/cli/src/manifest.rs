//! Run manifests: what was run, with which inputs, and what it wrote.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileHash {
    pub path: String,
    pub sha256: String,
}

/// Every output file is listed with the SHA-256 of the bytes written.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub version: String,
    pub inputs: Vec<FileHash>,
    pub outputs: Vec<FileHash>,
    pub timestamp: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// RFC 3339 UTC. Honors `SOURCE_DATE_EPOCH` so repeated runs can produce
/// identical manifests.
pub fn timestamp() -> Result<String> {
    let when = match std::env::var("SOURCE_DATE_EPOCH") {
        Ok(raw) => {
            let secs: i64 = raw
                .trim()
                .parse()
                .with_context(|| format!("SOURCE_DATE_EPOCH is not an integer: {raw:?}"))?;
            DateTime::<Utc>::from_timestamp(secs, 0)
                .with_context(|| format!("SOURCE_DATE_EPOCH out of range: {secs}"))?
        }
        Err(_) => Utc::now(),
    };
    Ok(when.to_rfc3339_opts(SecondsFormat::Secs, true))
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            parameters,
            version: env!("CARGO_PKG_VERSION").to_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            timestamp: String::new(),
        }
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(FileHash {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
    }

    /// Writes `bytes` to `out_dir/name` and records its hash.
    pub fn write_output(&mut self, out_dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        fs::create_dir_all(out_dir).with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
        let path = out_dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
        self.outputs.push(FileHash {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    /// Writes `out_dir/<command>.manifest.json`.
    pub fn finish(mut self, out_dir: &Path) -> Result<PathBuf> {
        self.timestamp = timestamp()?;
        let mut text = serde_json::to_string_pretty(&self)?;
        text.push('\n');
        fs::create_dir_all(out_dir)?;
        let path = out_dir.join(format!("{}.manifest.json", self.command));
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}
