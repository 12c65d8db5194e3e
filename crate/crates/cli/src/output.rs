use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Marker appended to any CSV whose stream ended before its last checkpoint.
pub const TRUNCATION_MARKER: &str = "# truncated: stream exhausted before the last checkpoint";

/// 17 significant digits, enough to round-trip any double.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Empty field for undefined values, so no NaN reaches a CSV.
pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub struct Csv {
    writer: csv::Writer<Vec<u8>>,
    truncated: bool,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self {
            writer,
            truncated: false,
        }
    }

    pub fn row<S: AsRef<[u8]>>(&mut self, fields: &[S]) {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn mark_truncated(&mut self) {
        self.truncated = true;
    }

    pub fn into_bytes(self) -> Vec<u8> {
        let mut bytes = self.writer.into_inner().expect("in-memory flush");
        if self.truncated {
            bytes.extend_from_slice(TRUNCATION_MARKER.as_bytes());
            bytes.push(b'\n');
        }
        bytes
    }
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

/// Collects output files and their digests for the run manifest.
pub struct Outputs {
    dir: PathBuf,
    pub files: Vec<FileDigest>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        write_file(&path, bytes)?;
        self.record(name.to_string(), bytes);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn record(&mut self, path: String, bytes: &[u8]) {
        self.files.push(FileDigest {
            path,
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len() as u64,
        });
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn unix_seconds() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

/// Everything needed to regenerate a run's outputs. Its `config` member is
/// itself a valid `--config` document.
#[derive(Debug, Serialize)]
pub struct RunManifest<C: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: C,
    /// Derived quantities: solved constants, evaluation point, seeds.
    pub resolved: serde_json::Value,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<FileDigest>,
}

impl<C: Serialize> RunManifest<C> {
    pub fn write(
        command: &str,
        config: C,
        resolved: serde_json::Value,
        started: f64,
        outputs: Outputs,
    ) -> Result<(), CliError> {
        let dir = outputs.dir.clone();
        let manifest = Self {
            tool: "gaplab",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            resolved,
            started_unix: started,
            finished_unix: unix_seconds(),
            outputs: outputs.files,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
        bytes.push(b'\n');
        write_file(&dir.join(format!("{command}_manifest.json")), &bytes)
    }
}
