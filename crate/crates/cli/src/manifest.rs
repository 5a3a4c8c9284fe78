//! Output files with checksums, and the run manifest that lists them.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const GENERATOR: &str = "ChaCha8Rng (rand_chacha 0.3)";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub scenario: String,
    pub config_hash: String,
    pub seed: u64,
    pub version: String,
    pub generator: String,
    pub workers: usize,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub passed: bool,
    pub failures: Vec<String>,
    pub files: Vec<FileRecord>,
}

impl RunManifest {
    /// `(path, sha256)` pairs, the part of the manifest that must not depend on
    /// timing or worker count.
    pub fn checksums(&self) -> Vec<(String, String)> {
        self.files.iter().map(|f| (f.path.clone(), f.sha256.clone())).collect()
    }

    pub fn read(dir: impl AsRef<Path>) -> Result<Self, CliError> {
        let path = dir.as_ref().join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(CliError::io(format!("reading {}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed manifest {}: {e}", path.display())))
    }

    /// Recomputes every listed checksum; returns the paths that differ.
    pub fn verify(&self, dir: impl AsRef<Path>) -> Result<Vec<String>, CliError> {
        let mut bad = Vec::new();
        for f in &self.files {
            let path = dir.as_ref().join(&f.path);
            let bytes = std::fs::read(&path).map_err(CliError::io(format!("reading {}", path.display())))?;
            if sha256_hex(&bytes) != f.sha256 {
                bad.push(f.path.clone());
            }
        }
        Ok(bad)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn now_unix_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

/// Writes files under one directory and records their checksums.
#[derive(Debug)]
pub struct Outputs {
    dir: PathBuf,
    files: Vec<FileRecord>,
}

impl Outputs {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(CliError::io(format!("creating {}", dir.display())))?;
        Ok(Self { dir, files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(CliError::io(format!("writing {}", path.display())))?;
        self.files.push(FileRecord { path: name.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut bytes = serde_json::to_vec_pretty(value).expect("result serializes");
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    /// CSV with the given header; each row is already formatted.
    pub fn write_csv<I, R>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = R>,
        R: IntoIterator<Item = String>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header).map_err(|e| CliError::Usage(e.to_string()))?;
        for row in rows {
            w.write_record(row).map_err(|e| CliError::Usage(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        self.write_bytes(name, &bytes)
    }

    pub fn into_files(self) -> Vec<FileRecord> {
        self.files
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_known_input() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn outputs_record_checksums_that_verify() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = Outputs::new(dir.path()).unwrap();
        out.write_json("a.json", &serde_json::json!({"x": 1})).unwrap();
        out.write_csv("b.csv", &["p", "q"], vec![vec!["1".to_string(), "2".to_string()]]).unwrap();
        let manifest = RunManifest {
            scenario: "test".into(),
            config_hash: String::new(),
            seed: 0,
            version: "0".into(),
            generator: GENERATOR.into(),
            workers: 1,
            started_unix_ms: 0,
            finished_unix_ms: 0,
            passed: true,
            failures: vec![],
            files: out.into_files(),
        };
        assert_eq!(std::fs::read_to_string(dir.path().join("b.csv")).unwrap(), "p,q\n1,2\n");
        assert!(manifest.verify(dir.path()).unwrap().is_empty());
        std::fs::write(dir.path().join("a.json"), "{}").unwrap();
        assert_eq!(manifest.verify(dir.path()).unwrap(), vec!["a.json".to_string()]);
    }
}
