//! Plain-text import/export of target trajectories, so externally sourced
//! profiles can replace the generated ones.
//!
//! One point per line, space-separated full-precision decimals: 4 values
//! `w x y z` per orientation, `d²` row-major values per SPD matrix.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::manifold::{SpdMatrix, UnitQuaternion};

fn fmt_floats(values: impl Iterator<Item = f64>) -> String {
    let mut line = String::new();
    for (i, v) in values.enumerate() {
        if i > 0 {
            line.push(' ');
        }
        write!(line, "{v}").unwrap();
    }
    line
}

pub fn write_quat_traj(path: &Path, traj: &[UnitQuaternion]) -> std::io::Result<()> {
    let mut out = String::new();
    for q in traj {
        out.push_str(&fmt_floats(q.as_vector().iter().copied()));
        out.push('\n');
    }
    std::fs::write(path, out)
}

pub fn write_spd_traj(path: &Path, traj: &[SpdMatrix]) -> std::io::Result<()> {
    let mut out = String::new();
    for m in traj {
        let d = m.dim();
        out.push_str(&fmt_floats(
            (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| m.matrix()[(i, j)]),
        ));
        out.push('\n');
    }
    std::fs::write(path, out)
}

fn parse_line(line: &str, lineno: usize) -> Result<Vec<f64>, String> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|e| format!("line {lineno}: bad number {tok:?}: {e}"))
        })
        .collect()
}

/// Reads an orientation trajectory (4 values per line). Points are
/// normalized but not hemisphere-flipped, so imported profiles keep their
/// sign convention.
pub fn read_quat_traj(path: &Path) -> Result<Vec<UnitQuaternion>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut traj = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals = parse_line(line, k + 1)?;
        if vals.len() != 4 {
            return Err(format!("line {}: expected 4 values, got {}", k + 1, vals.len()));
        }
        traj.push(
            UnitQuaternion::new(vals[0], vals[1], vals[2], vals[3])
                .map_err(|e| format!("line {}: {e}", k + 1))?,
        );
    }
    Ok(traj)
}

/// Reads an SPD trajectory (`d²` row-major values per line); `d` is inferred
/// from the first line.
pub fn read_spd_traj(path: &Path) -> Result<Vec<SpdMatrix>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut traj: Vec<SpdMatrix> = Vec::new();
    let mut dim = None;
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals = parse_line(line, k + 1)?;
        let d = match dim {
            Some(d) => d,
            None => {
                let d = (vals.len() as f64).sqrt().round() as usize;
                if d * d != vals.len() {
                    return Err(format!(
                        "line {}: {} values is not a square matrix",
                        k + 1,
                        vals.len()
                    ));
                }
                dim = Some(d);
                d
            }
        };
        if vals.len() != d * d {
            return Err(format!(
                "line {}: expected {} values, got {}",
                k + 1,
                d * d,
                vals.len()
            ));
        }
        traj.push(
            SpdMatrix::new(DMatrix::from_row_slice(d, d, &vals))
                .map_err(|e| format!("line {}: {e}", k + 1))?,
        );
    }
    Ok(traj)
}
