use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::Path;

use sha2::{Digest, Sha256};

use super::{RunMetadata, Trajectory};
use crate::error::Result;
use crate::spectral::io::{read_field_binary, write_field_binary};
use crate::spectral::FourierField;

/// Hex SHA-256 of the little-endian bytes of the noise samples.
pub fn noise_hash(rows: &[Vec<f64>]) -> String {
    let mut h = Sha256::new();
    for row in rows {
        for v in row {
            h.update(v.to_le_bytes());
        }
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes every `stride`-th state as `state_<index>.bin` plus `run.json`.
pub fn write_checkpoints(dir: &Path, traj: &Trajectory, stride: usize, meta: &RunMetadata) -> Result<Vec<String>> {
    fs::create_dir_all(dir)?;
    let mut names = Vec::new();
    for (k, u) in traj.states.iter().enumerate().step_by(stride.max(1)) {
        let name = format!("state_{k:06}.bin");
        write_field_binary(u, BufWriter::new(File::create(dir.join(&name))?))?;
        names.push(name);
    }
    serde_json::to_writer_pretty(BufWriter::new(File::create(dir.join("run.json"))?), meta)?;
    Ok(names)
}

pub fn read_checkpoint(path: &Path) -> Result<FourierField> {
    read_field_binary(BufReader::new(File::open(path)?))
}
