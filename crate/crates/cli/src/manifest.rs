//! Run manifests: enough to rerun a command and check that it reproduced.
//! No timestamps or host data, so a rerun writes the same bytes.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{InputError, ValidationFailure};
use crate::io::write_json;

pub const TOOL: &str = "kuramoto-eq";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Arguments after the program name.
    pub argv: Vec<String>,
    pub params: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

/// What a command reports back so that its manifest can be written.
#[derive(Debug, Default)]
pub struct RunRecord {
    pub command: String,
    pub params: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub manifest_path: PathBuf,
    /// Set when the outputs were written but a check failed.
    pub failure: Option<String>,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn digests(paths: &[PathBuf]) -> Result<Vec<FileDigest>> {
    paths
        .iter()
        .map(|p| {
            Ok(FileDigest {
                path: p.display().to_string(),
                sha256: sha256_file(p)?,
            })
        })
        .collect()
}

/// `dir/out.csv` -> `dir/out.manifest.json`.
pub fn manifest_beside(output: &Path) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    output.with_file_name(format!("{stem}.manifest.json"))
}

pub fn write_manifest(record: &RunRecord, argv: &[String]) -> Result<Manifest> {
    let manifest = Manifest {
        tool: TOOL.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: record.command.clone(),
        argv: argv.to_vec(),
        params: record.params.clone(),
        seeds: record.seeds.clone(),
        inputs: digests(&record.inputs)?,
        outputs: digests(&record.outputs)?,
    };
    write_json(&record.manifest_path, &manifest)?;
    Ok(manifest)
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let m: Manifest = serde_json::from_str(&text)
        .map_err(|e| InputError::at(path, e.line() as u64, e.column(), e))?;
    if m.tool != TOOL {
        return Err(InputError::new(format!("{}: not a {TOOL} manifest", path.display())).into());
    }
    Ok(m)
}

/// Fails if any recorded input changed since the manifest was written.
pub fn check_inputs(m: &Manifest) -> Result<()> {
    for input in &m.inputs {
        let now = sha256_file(Path::new(&input.path))?;
        if now != input.sha256 {
            return Err(ValidationFailure(format!(
                "input {} changed since the manifest was written (sha256 {} != {})",
                input.path, now, input.sha256
            ))
            .into());
        }
    }
    Ok(())
}

/// Compares a rerun against the recorded output digests.
pub fn check_outputs(recorded: &Manifest, rerun: &Manifest) -> Result<()> {
    let mismatched: Vec<&str> = recorded
        .outputs
        .iter()
        .filter(|o| !rerun.outputs.contains(o))
        .map(|o| o.path.as_str())
        .collect();
    if mismatched.is_empty() && recorded.outputs.len() == rerun.outputs.len() {
        Ok(())
    } else {
        Err(ValidationFailure(format!("rerun differs from manifest in: {}", mismatched.join(", "))).into())
    }
}
