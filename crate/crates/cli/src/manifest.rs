//! Run manifest: config snapshot, emitted files with SHA-256 hashes, and the
//! anomaly log.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// One emitted file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    /// Path relative to the output directory.
    pub path: String,
    /// Hex SHA-256 of the content.
    pub sha256: String,
    /// Size in bytes.
    pub bytes: usize,
}

/// Record of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// Subcommand name.
    pub command: String,
    /// Tool version.
    pub version: String,
    /// Resolved configuration.
    pub config: RunConfig,
    /// Wall-clock duration in seconds.
    pub wall_clock_seconds: f64,
    /// Emitted files in emission order.
    pub artifacts: Vec<Artifact>,
    /// Computational anomalies; any entry makes the exit code 1.
    pub anomalies: Vec<String>,
    /// Informational notes such as conventions and known discrepancies.
    pub notes: Vec<String>,
}

/// Writes artifacts into an output directory and records them.
#[derive(Debug)]
pub struct Recorder {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Recorder {
    /// Creates the output directory if needed.
    pub fn new(command: &str, config: &RunConfig) -> Result<Self> {
        let dir = PathBuf::from(&config.out);
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir,
            manifest: RunManifest {
                command: command.to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                config: config.clone(),
                wall_clock_seconds: 0.0,
                artifacts: Vec::new(),
                anomalies: Vec::new(),
                notes: Vec::new(),
            },
        })
    }

    /// Writes `content` to `name` under the output directory and hashes it.
    pub fn write(&mut self, name: &str, content: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.artifacts.push(Artifact {
            path: name.to_string(),
            sha256: sha256_hex(content.as_bytes()),
            bytes: content.len(),
        });
        Ok(path)
    }

    /// Logs an anomaly.
    pub fn anomaly(&mut self, text: impl Into<String>) {
        self.manifest.anomalies.push(text.into());
    }

    /// Logs a note.
    pub fn note(&mut self, text: impl Into<String>) {
        self.manifest.notes.push(text.into());
    }

    /// Number of anomalies so far.
    pub fn anomaly_count(&self) -> usize {
        self.manifest.anomalies.len()
    }

    /// Writes manifest.json and returns the manifest.
    pub fn finish(mut self, seconds: f64) -> Result<RunManifest> {
        self.manifest.wall_clock_seconds = seconds;
        let text = serde_json::to_string_pretty(&self.manifest)? + "\n";
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(self.manifest)
    }

    /// Output directory.
    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

/// Lower-case hex SHA-256 digest.
pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
