//! Atomic artifact writes and the run manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
pub struct ArtifactEntry {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Collects artifacts under one directory, each written through a temporary
/// file that is renamed into place.
pub struct ArtifactWriter {
    dir: PathBuf,
    written: Vec<ArtifactEntry>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        write_atomic(&self.dir.join(name), contents.as_bytes())?;
        self.written.push(ArtifactEntry {
            file: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
            bytes: contents.len(),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(mut self, manifest: Manifest) -> Result<Vec<ArtifactEntry>, CliError> {
        let m = ManifestFile {
            subcommand: manifest.subcommand,
            config_sha256: manifest.config_sha256,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_seconds: manifest.wall_time.as_secs_f64(),
            threads: manifest.threads,
            seed: manifest.seed,
            artifacts: &self.written,
        };
        let mut text = serde_json::to_string_pretty(&m).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        write_atomic(&self.dir.join("manifest.json"), text.as_bytes())?;
        Ok(std::mem::take(&mut self.written))
    }
}

pub struct Manifest {
    pub subcommand: &'static str,
    pub config_sha256: String,
    pub wall_time: Duration,
    pub threads: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Serialize)]
struct ManifestFile<'a> {
    subcommand: &'static str,
    config_sha256: String,
    version: &'static str,
    wall_time_seconds: f64,
    threads: Option<usize>,
    seed: Option<u64>,
    artifacts: &'a [ArtifactEntry],
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_and_hashes() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = ArtifactWriter::new(dir.path()).unwrap();
        w.write("a.csv", "x\n1\n").unwrap();
        let entries = w
            .finish(Manifest {
                subcommand: "test",
                config_sha256: sha256_hex(b""),
                wall_time: Duration::from_millis(5),
                threads: None,
                seed: None,
            })
            .unwrap();
        assert_eq!(std::fs::read_to_string(dir.path().join("a.csv")).unwrap(), "x\n1\n");
        assert_eq!(entries[0].sha256, sha256_hex(b"x\n1\n"));
        let m: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(m["artifacts"][0]["file"], "a.csv");
        assert_eq!(
            m["config_sha256"],
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
        );
        let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(leftovers, 2);
    }
}
