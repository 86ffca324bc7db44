use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Record of one invocation: what ran, on which inputs, and where it wrote.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Value,
    pub config_paths: Vec<String>,
    pub seed: u64,
    /// SHA-256 over the command, its arguments (minus the output directory) and
    /// the bytes of every input file.
    pub input_hash: String,
    pub output_dir: String,
}

fn files_under(path: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    if path.is_dir() {
        let mut entries: Vec<PathBuf> = fs::read_dir(path)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
        entries.sort();
        for e in entries {
            files_under(&e, out)?;
        }
    } else if path.exists() {
        out.push(path.to_path_buf());
    }
    Ok(())
}

impl RunManifest {
    pub fn new(command: &str, args: Value, inputs: &[&Path], seed: u64, output_dir: &Path) -> Result<Self, CliError> {
        let mut hasher = Sha256::new();
        hasher.update(command.as_bytes());
        let mut hashed = args.clone();
        if let Value::Object(map) = &mut hashed {
            map.remove("out");
        }
        hasher.update(serde_json::to_vec(&hashed)?);
        for input in inputs {
            let mut files = Vec::new();
            files_under(input, &mut files)?;
            for f in files {
                let rel = f.strip_prefix(input).unwrap_or(&f);
                hasher.update(rel.to_string_lossy().as_bytes());
                hasher.update(fs::read(&f)?);
            }
        }
        Ok(Self {
            command: command.to_string(),
            args,
            config_paths: inputs.iter().map(|p| p.display().to_string()).collect(),
            seed,
            input_hash: hex::encode(hasher.finalize()),
            output_dir: output_dir.display().to_string(),
        })
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        write_json(&dir.join("manifest.json"), self)
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Hex SHA-256 of a file's bytes.
pub fn file_hash(path: &Path) -> Result<String, CliError> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}
