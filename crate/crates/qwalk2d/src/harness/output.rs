//! Deterministic artifact rendering: CSV tables, PGM heatmaps and the run
//! manifest. Every byte is a pure function of the experiment config.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::lattice::ProbabilityField;

use super::HarnessError;

/// A named output file held in memory until written.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        Artifact {
            name: name.into(),
            bytes,
        }
    }

    pub fn sha256(&self) -> String {
        sha256_hex(&self.bytes)
    }
}

/// Round-trippable float formatting: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Render a comma-separated table with a header row and `\n` line endings.
pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Vec<u8> {
    let mut out = Vec::new();
    writeln!(out, "{}", header.join(",")).expect("writing to a Vec cannot fail");
    for row in rows {
        writeln!(out, "{}", row.join(",")).expect("writing to a Vec cannot fail");
    }
    out
}

/// A probability field as a CSV grid: header row of x-coordinates, leading
/// column of y-coordinates, y decreasing downwards so the text matches the
/// image orientation.
pub fn heatmap_csv_bytes(field: &ProbabilityField) -> Vec<u8> {
    let e = field.extent() as i64;
    let mut out = Vec::new();
    let header: Vec<String> = std::iter::once(String::new())
        .chain((-e..=e).map(|x| x.to_string()))
        .collect();
    writeln!(out, "{}", header.join(",")).expect("writing to a Vec cannot fail");
    for y in (-e..=e).rev() {
        let row: Vec<String> = std::iter::once(y.to_string())
            .chain((-e..=e).map(|x| fmt_f64(field.get(x, y))))
            .collect();
        writeln!(out, "{}", row.join(",")).expect("writing to a Vec cannot fail");
    }
    out
}

/// An 8-bit plain-text PGM (P2) image of the field, linearly scaled from 0
/// to the field maximum, top row at the largest y.
pub fn pgm_bytes(field: &ProbabilityField) -> Vec<u8> {
    let e = field.extent() as i64;
    let side = 2 * field.extent() + 1;
    let max = field.max_value();
    let mut out = Vec::new();
    writeln!(out, "P2").expect("writing to a Vec cannot fail");
    writeln!(out, "{side} {side}").expect("writing to a Vec cannot fail");
    writeln!(out, "255").expect("writing to a Vec cannot fail");
    for y in (-e..=e).rev() {
        let row: Vec<String> = (-e..=e)
            .map(|x| {
                let level = if max > 0.0 {
                    (field.get(x, y) / max * 255.0 + 0.5).floor() as u32
                } else {
                    0
                };
                level.min(255).to_string()
            })
            .collect();
        writeln!(out, "{}", row.join(" ")).expect("writing to a Vec cannot fail");
    }
    out
}

#[derive(Serialize)]
struct ManifestEntry {
    name: String,
    sha256: String,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a serde_json::Value,
    files: Vec<ManifestEntry>,
}

/// The full result of one experiment run: the resolved config and the
/// artifacts it determines.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: serde_json::Value,
    pub artifacts: Vec<Artifact>,
}

impl RunOutput {
    /// The run manifest: resolved config plus a checksum per artifact.
    pub fn manifest_bytes(&self) -> Vec<u8> {
        let manifest = Manifest {
            config: &self.config,
            files: self
                .artifacts
                .iter()
                .map(|a| ManifestEntry {
                    name: a.name.clone(),
                    sha256: a.sha256(),
                    bytes: a.bytes.len(),
                })
                .collect(),
        };
        let mut bytes =
            serde_json::to_vec_pretty(&manifest).expect("manifest serialization cannot fail");
        bytes.push(b'\n');
        bytes
    }

    /// Write every artifact plus `manifest.json` into `dir`, creating it if
    /// needed. Returns the written paths.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        let io_err = |path: &Path| {
            let path = path.to_path_buf();
            move |source: std::io::Error| HarnessError::Io { path, source }
        };
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut written = Vec::new();
        for artifact in &self.artifacts {
            let path = dir.join(&artifact.name);
            std::fs::write(&path, &artifact.bytes).map_err(io_err(&path))?;
            written.push(path);
        }
        let manifest_path = dir.join("manifest.json");
        std::fs::write(&manifest_path, self.manifest_bytes()).map_err(io_err(&manifest_path))?;
        written.push(manifest_path);
        Ok(written)
    }
}
