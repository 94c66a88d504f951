//! Run manifests: resolved config, seeds, wall times and content digests
//! of every produced file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Fully resolved configuration (TOML rendered verbatim).
    pub config: String,
    /// Wall time per stage, in seconds.
    pub stages: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

impl RunManifest {
    pub fn new(command: &str, config_toml: String) -> Self {
        RunManifest {
            tool: "sensid".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config_toml,
            stages: BTreeMap::new(),
            warnings: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn record_stage(&mut self, name: &str, seconds: f64) {
        self.stages.insert(name.into(), seconds);
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        self.warnings.push(message.into());
    }

    /// Digest a produced file (path stored relative to the output dir).
    pub fn add_file(&mut self, out_dir: &Path, rel: &str) -> Result<()> {
        let full = out_dir.join(rel);
        let bytes =
            std::fs::read(&full).with_context(|| format!("digesting {}", full.display()))?;
        self.files.push(FileEntry {
            path: rel.into(),
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    /// Write the manifest itself into the output directory.
    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join(MANIFEST_NAME);
        let json = serde_json::to_string_pretty(self).context("serializing manifest")?;
        std::fs::write(&path, json).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_NAME);
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).context("parsing manifest")
    }

    /// Re-hash every listed file and compare digests.
    pub fn verify(&self, dir: &Path) -> Result<()> {
        for entry in &self.files {
            let bytes = std::fs::read(dir.join(&entry.path))
                .with_context(|| format!("reading {} for verification", entry.path))?;
            let actual = sha256_hex(&bytes);
            if actual != entry.sha256 {
                bail!(
                    "digest mismatch for {}: manifest {} vs actual {actual}",
                    entry.path,
                    entry.sha256
                );
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_verify_and_detect_tampering() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), "x,y\n1,2\n").unwrap();
        let mut manifest = RunManifest::new("test", String::new());
        manifest.add_file(dir.path(), "a.csv").unwrap();
        manifest.write(dir.path()).unwrap();

        let loaded = RunManifest::read(dir.path()).unwrap();
        loaded.verify(dir.path()).unwrap();

        std::fs::write(dir.path().join("a.csv"), "tampered").unwrap();
        assert!(loaded.verify(dir.path()).is_err());
    }
}
