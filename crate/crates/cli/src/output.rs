//! CSV tables and the JSON run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::RunError;

/// One CSV file: `name.csv` with a fixed header.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        Self { name: name.into(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, header: &str) -> Option<Vec<&str>> {
        let i = self.headers.iter().position(|h| h == header)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, RunError> {
        let path = dir.join(format!("{}.csv", self.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(path)
    }
}

/// Shortest round-trip formatting, so equal numbers print identically.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v}")
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn point(p: &[f64]) -> String {
    p.iter().map(|v| num(*v)).collect::<Vec<_>>().join(" ")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
    pub seed: Option<u64>,
    pub path: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: String,
    pub experiment: String,
    pub seed: u64,
    pub workers: usize,
    pub config_sha256: String,
    /// The resolved configuration; re-running it reproduces every CSV.
    pub config: String,
    pub wall_time_s: f64,
    pub status: &'static str,
    pub outputs: Vec<OutputFile>,
    pub failure: Option<Failure>,
    pub summary: serde_json::Value,
}

pub fn version_string() -> String {
    format!("v{}-{}", env!("CARGO_PKG_VERSION"), option_env!("RGSDE_BUILD_REV").unwrap_or("release"))
}

pub fn write_manifest(dir: &Path, manifest: &Manifest) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(manifest).map_err(|e| RunError::Io(e.to_string()))?;
    fs::write(dir.join("manifest.json"), text + "\n")?;
    Ok(())
}

/// Writes every table and returns its name and digest.
pub fn write_tables(dir: &Path, tables: &[Table]) -> Result<Vec<OutputFile>, RunError> {
    tables
        .iter()
        .map(|t| {
            let p = t.write(dir)?;
            let bytes = fs::read(&p)?;
            Ok(OutputFile { file: format!("{}.csv", t.name), sha256: sha256_hex(&bytes) })
        })
        .collect()
}
