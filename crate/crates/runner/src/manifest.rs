//! Run manifests: a JSON sidecar written before a run and finalized after it.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{io_err, RunResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Running,
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    /// File name relative to the output directory.
    pub file: String,
    pub sha256: String,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub version: String,
    pub started_unix: u64,
    pub wall_clock_seconds: Option<f64>,
    pub status: Status,
    pub outputs: Vec<OutputRecord>,
    /// Cells that failed without aborting the run.
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

/// Manifest bound to its file; every mutation is flushed to disk.
#[derive(Debug)]
pub struct ManifestWriter {
    path: PathBuf,
    started: Instant,
    pub manifest: RunManifest,
}

pub fn sha256_file(path: &Path) -> RunResult<String> {
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn manifest_path(cfg: &RunConfig) -> PathBuf {
    cfg.out.join(format!("{}.manifest.json", cfg.experiment))
}

impl ManifestWriter {
    pub fn begin(cfg: &RunConfig) -> RunResult<Self> {
        std::fs::create_dir_all(&cfg.out).map_err(io_err(&cfg.out))?;
        let started_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let w = Self {
            path: manifest_path(cfg),
            started: Instant::now(),
            manifest: RunManifest {
                config: cfg.clone(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                started_unix,
                wall_clock_seconds: None,
                status: Status::Running,
                outputs: Vec::new(),
                failures: Vec::new(),
                notes: Vec::new(),
            },
        };
        w.flush()?;
        Ok(w)
    }

    fn flush(&self) -> RunResult<()> {
        let text = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(&self.path, text + "\n").map_err(io_err(&self.path))
    }

    pub fn record_output(&mut self, path: &Path, rows: usize) -> RunResult<()> {
        let sha256 = sha256_file(path)?;
        let file = path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default();
        self.manifest.outputs.push(OutputRecord { file, sha256, rows });
        self.flush()
    }

    pub fn record_failure(&mut self, what: String) -> RunResult<()> {
        log::error!("{what}");
        self.manifest.failures.push(what);
        self.flush()
    }

    pub fn note(&mut self, what: impl Into<String>) -> RunResult<()> {
        self.manifest.notes.push(what.into());
        self.flush()
    }

    pub fn finish(mut self, status: Status) -> RunResult<RunManifest> {
        self.manifest.status = status;
        self.manifest.wall_clock_seconds = Some(self.started.elapsed().as_secs_f64());
        self.flush()?;
        Ok(self.manifest)
    }
}
