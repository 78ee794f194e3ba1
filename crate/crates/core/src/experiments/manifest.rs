//! Run manifests: what ran, with which settings, and digests of everything it wrote.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    /// Path relative to the output directory.
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestError {
    pub category: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputDigest>,
    pub status: String,
    pub error: Option<ManifestError>,
}

impl RunManifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Recomputes every digest; returns the files that are missing or changed.
    pub fn verify(&self, dir: &Path) -> Vec<String> {
        self.outputs
            .iter()
            .filter(|o| digest_file(&dir.join(&o.file)).map_or(true, |d| &d != *o))
            .map(|o| o.file.clone())
            .collect()
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn digest_file(path: &Path) -> Result<OutputDigest> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(OutputDigest {
        file: path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        sha256: sha256_hex(&bytes),
        bytes: bytes.len() as u64,
    })
}

/// Runs `body` and writes `manifest.json` into `out_dir` whether it succeeds or fails.
///
/// `body` returns the files it wrote (inside `out_dir`) along with its own result.
pub fn run_recorded<T>(
    command: &str,
    config: &ExperimentConfig,
    seeds: Vec<u64>,
    out_dir: &Path,
    body: impl FnOnce(&Path) -> Result<(T, Vec<PathBuf>)>,
) -> Result<T> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let start = Instant::now();
    let outcome = body(out_dir);
    let mut manifest = RunManifest {
        command: command.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        seeds,
        wall_clock_seconds: 0.0,
        outputs: Vec::new(),
        status: "ok".into(),
        error: None,
    };
    let result = match outcome {
        Ok((value, files)) => match files
            .iter()
            .map(|f| digest_file(f))
            .collect::<Result<Vec<_>>>()
        {
            Ok(digests) => {
                manifest.outputs = digests;
                Ok(value)
            }
            Err(e) => Err(e),
        },
        Err(e) => Err(e),
    };
    if let Err(e) = &result {
        manifest.status = "error".into();
        manifest.error = Some(ManifestError {
            category: e.category().into(),
            message: e.to_string(),
        });
    }
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    let path = out_dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest)?;
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    result
}
