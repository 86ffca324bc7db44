use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::trajectory::Trajectory;
use crate::env_sim::write_jsonl;
use crate::error::RolloutError;

/// Writes one trajectory per line.
pub fn write_trajectories(path: &Path, trajectories: &[Trajectory]) -> Result<(), RolloutError> {
    write_jsonl(path, trajectories).map_err(|e| match e {
        crate::error::EnvError::Io(io) => RolloutError::Io(io),
        crate::error::EnvError::Json(j) => RolloutError::Json(j),
        other => RolloutError::Env(other),
    })
}

pub fn read_trajectories(path: &Path) -> Result<Vec<Trajectory>, RolloutError> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}
