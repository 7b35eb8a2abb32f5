//! File formats: matrices, phase vectors, trajectories, JSON artifacts.
//! Everything is written through [`write_atomic`].

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use kuramoto_core::dynamics::{PhaseVector, Trajectory};
use kuramoto_core::graphs::{AdjacencyMatrix, MatrixFlags};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::InputError;

/// Writes via a temp file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)
        .with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn parse_number(path: &Path, line: u64, col: usize, field: &str) -> std::result::Result<f64, InputError> {
    let v: f64 = field.trim().parse().map_err(|_| {
        InputError::at(path, line, col, format!("cannot parse {:?} as a number", field.trim()))
    })?;
    if !v.is_finite() {
        return Err(InputError::at(path, line, col, format!("non-finite value {v}")));
    }
    Ok(v)
}

/// Numeric CSV rows without a header. Lines starting with `#` are skipped.
fn read_numeric_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            InputError::at(path, line, 1, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .enumerate()
            .map(|(c, f)| parse_number(path, line, c + 1, f))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_matrix_csv(path: &Path) -> Result<AdjacencyMatrix> {
    let rows = read_numeric_rows(path)?;
    let n = rows.len();
    if n == 0 {
        return Err(InputError::at(path, 1, 1, "empty matrix").into());
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(InputError::at(
                path,
                i as u64 + 1,
                row.len().min(n) + 1,
                format!("row {} has {} columns; a {n}x{n} matrix needs {n}", i + 1, row.len()),
            )
            .into());
        }
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(AdjacencyMatrix::from_dense(m)?)
}

pub fn matrix_csv(a: &AdjacencyMatrix) -> String {
    let mut out = String::new();
    for i in 0..a.n() {
        let row: Vec<String> = (0..a.n()).map(|j| fmt_f64(a.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSidecar {
    pub n: usize,
    pub flags: MatrixFlags,
    pub generator: String,
    pub seed: Option<u64>,
    pub params: serde_json::Value,
}

pub fn sidecar_path(matrix: &Path) -> PathBuf {
    matrix.with_extension("json")
}

/// Writes `path` and its JSON sidecar; returns both paths.
pub fn write_matrix(
    path: &Path,
    a: &AdjacencyMatrix,
    generator: &str,
    seed: Option<u64>,
    params: serde_json::Value,
) -> Result<Vec<PathBuf>> {
    write_atomic(path, matrix_csv(a).as_bytes())?;
    let side = sidecar_path(path);
    let meta = MatrixSidecar {
        n: a.n(),
        flags: a.flags(),
        generator: generator.to_string(),
        seed,
        params,
    };
    write_json(&side, &meta)?;
    Ok(vec![path.to_path_buf(), side])
}

/// A phase vector from a `.json` array or a CSV holding one row or one
/// column of numbers.
pub fn read_phases(path: &Path) -> Result<Vec<f64>> {
    if path.extension().is_some_and(|e| e == "json") {
        let text = read_text(path)?;
        let v: Vec<f64> = serde_json::from_str(&text).map_err(|e| {
            InputError::at(path, e.line() as u64, e.column(), e.to_string())
        })?;
        return Ok(v);
    }
    let rows = read_numeric_rows(path)?;
    match rows.as_slice() {
        [] => Err(InputError::at(path, 1, 1, "no phases found").into()),
        [row] => Ok(row.clone()),
        _ => {
            if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.len() != 1) {
                return Err(InputError::at(
                    path,
                    i as u64 + 1,
                    2,
                    "expected a single row or a single column of phases",
                )
                .into());
            }
            Ok(rows.into_iter().map(|r| r[0]).collect())
        }
    }
}

pub fn phases_csv(theta: &[f64]) -> String {
    let mut out: String = theta.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join("\n");
    out.push('\n');
    out
}

/// Options for trajectory output.
#[derive(Debug, Clone, Copy, Default)]
pub struct TrajectoryStyle {
    /// Natural frequency added as `omega t` to every phase before wrapping.
    pub omega: f64,
    pub order_parameter: bool,
}

fn display_phases(traj: &Trajectory, k: usize, omega: f64) -> PhaseVector {
    let t = traj.times[k];
    let p = traj.phases_at(k);
    if omega == 0.0 {
        p
    } else {
        p.shifted(omega * t)
    }
}

/// `t, theta_1..theta_n[, abs_1..abs_n][, R]`.
pub fn trajectory_csv(traj: &Trajectory, style: TrajectoryStyle) -> String {
    let n = traj.phases_at(0).len();
    let complex = traj.complex_states();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("theta_{i}")));
    if complex.is_some() {
        header.extend((1..=n).map(|i| format!("abs_{i}")));
    }
    if style.order_parameter {
        header.push("R".into());
    }
    let mut out = header.join(",");
    out.push('\n');
    for k in 0..traj.len() {
        let phases = display_phases(traj, k, style.omega);
        let mut row = vec![fmt_f64(traj.times[k])];
        row.extend(phases.as_slice().iter().map(|v| fmt_f64(*v)));
        if let Some(states) = complex {
            row.extend(states[k].moduli().into_iter().map(fmt_f64));
        }
        if style.order_parameter {
            row.push(fmt_f64(kuramoto_core::dynamics::order_parameter(
                traj.phases_at(k).as_slice(),
            )));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `t, node, phase` rows for spatiotemporal plots; nodes are 1-based.
pub fn long_form_csv(traj: &Trajectory, omega: f64) -> String {
    let mut out = String::from("t,node,phase\n");
    for k in 0..traj.len() {
        let t = fmt_f64(traj.times[k]);
        for (i, v) in display_phases(traj, k, omega).as_slice().iter().enumerate() {
            let _ = writeln!(out, "{t},{},{}", i + 1, fmt_f64(*v));
        }
    }
    out
}
