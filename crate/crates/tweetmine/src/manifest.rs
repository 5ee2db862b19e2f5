//! Run manifests: content hashes of inputs and outputs, the effective
//! configuration, and the seed. Two runs with identical manifests produced
//! identical outputs; the manifest itself contains nothing volatile.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("manifest serialization: {0}")]
    Serialize(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: serde_json::Value,
    /// Logical input name -> sha256 of file contents.
    pub inputs: BTreeMap<String, String>,
    /// Output file name -> sha256 of file contents.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: serde_json::Value) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn add_input(&mut self, name: &str, path: &Path) -> Result<(), ManifestError> {
        self.inputs.insert(name.to_string(), sha256_file(path)?);
        Ok(())
    }

    pub fn add_output(&mut self, name: &str, path: &Path) -> Result<(), ManifestError> {
        self.outputs.insert(name.to_string(), sha256_file(path)?);
        Ok(())
    }

    /// Write `<dir>/manifests/<command>.json`.
    pub fn write(&self, dir: &Path) -> Result<std::path::PathBuf, ManifestError> {
        let manifest_dir = dir.join("manifests");
        std::fs::create_dir_all(&manifest_dir).map_err(|source| ManifestError::Io {
            path: manifest_dir.display().to_string(),
            source,
        })?;
        let path = manifest_dir.join(format!("{}.json", self.command));
        let body = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, body + "\n").map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(path)
    }
}

/// Hex-encoded sha256 of a file's bytes.
pub fn sha256_file(path: &Path) -> Result<String, ManifestError> {
    let mut file = std::fs::File::open(path).map_err(|source| ManifestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|source| ManifestError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex_string(&hasher.finalize()))
}

fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
